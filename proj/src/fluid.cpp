#include "spnjd/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spnjd/error.hpp"

namespace spnjd {

double fluid_speed(const SpnModel& model, std::span<const double> x, std::size_t t) {
  double level = std::numeric_limits<double>::infinity();
  for (const Arc& a : model.inputs_of(t)) level = std::min(level, x[a.place] / static_cast<double>(a.weight));
  return model.rate(t) * std::max(level, 0.0);
}

void drift_into(const SpnModel& model, std::span<const double> x, std::span<const std::size_t> transitions,
                std::span<double> out) {
  for (std::size_t t : transitions) {
    const double speed = fluid_speed(model, x, t);
    if (speed == 0.0) continue;
    for (const Arc& c : model.changes_of(t)) out[c.place] += speed * static_cast<double>(c.weight);
  }
}

std::vector<double> drift(const SpnModel& model, std::span<const double> x) {
  std::vector<double> out(model.num_places(), 0.0);
  std::vector<std::size_t> all(model.num_transitions());
  std::iota(all.begin(), all.end(), 0);
  drift_into(model, x, all, out);
  return out;
}

Trajectory solve_ode(const SpnModel& model, double t_final, double step) {
  if (!(step > 0.0)) throw EngineError("step must be positive");
  if (t_final < 0.0) throw EngineError("negative final time");
  const std::size_t np = model.num_places();

  Trajectory traj;
  FluidState x = FluidState::from(model.initial_marking());
  traj.times.push_back(0.0);
  traj.states.push_back(x);

  auto guard = [&](std::vector<double>& v) {
    for (double& c : v) {
      if (!std::isfinite(c)) throw EngineError("non-finite state in ODE integration");
      if (c < 0.0) {
        c = 0.0;
        ++traj.negative_clamps;
      }
    }
  };

  std::vector<double> stage(np);
  std::size_t k = 0;
  double u = 0.0;
  while (u < t_final) {
    ++k;
    // recompute from the step index so long runs do not accumulate drift in u
    double next = std::min(t_final, static_cast<double>(k) * step);
    if (t_final - next < 1e-12 * std::max(1.0, t_final)) next = t_final;
    const double h = next - u;

    const auto k1 = drift(model, x.values);
    for (std::size_t i = 0; i < np; ++i) stage[i] = x[i] + 0.5 * h * k1[i];
    guard(stage);
    const auto k2 = drift(model, stage);
    for (std::size_t i = 0; i < np; ++i) stage[i] = x[i] + 0.5 * h * k2[i];
    guard(stage);
    const auto k3 = drift(model, stage);
    for (std::size_t i = 0; i < np; ++i) stage[i] = x[i] + h * k3[i];
    guard(stage);
    const auto k4 = drift(model, stage);
    for (std::size_t i = 0; i < np; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    guard(x.values);

    u = next;
    traj.times.push_back(u);
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace spnjd

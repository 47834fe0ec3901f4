#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spnjd/spn.hpp"

namespace spnjd {

/// Fluid speed of t: lambda(t) * min over input places of x_j / I(p_j,t).
/// Continuous relaxation of the enabling degree (no floor).
double fluid_speed(const SpnModel& model, std::span<const double> x, std::size_t t);

/// Generator / ODE right-hand side: sum_t fluid_speed(t, x) * L(:, t).
std::vector<double> drift(const SpnModel& model, std::span<const double> x);

/// Drift restricted to `transitions`, accumulated into `out` (length n_p).
void drift_into(const SpnModel& model, std::span<const double> x, std::span<const std::size_t> transitions,
                std::span<double> out);

struct Trajectory {
  std::vector<double> times;
  std::vector<FluidState> states;
  /// Number of coordinates clamped at 0 after an integrator stage.
  std::size_t negative_clamps = 0;
};

/// Classical fixed-step RK4 from the initial marking. Samples every step;
/// the last step is shortened to land on t_final. Throws EngineError on a
/// non-finite state.
Trajectory solve_ode(const SpnModel& model, double t_final, double step);

}  // namespace spnjd

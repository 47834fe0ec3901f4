#pragma once

// Jump-diffusion approximation of an SPN on its bounded state box.
//
// Transitions that do not touch a place sitting at MIN/MAX are fluidified
// (drift sigma * L plus sqrt(sigma) * L dW, one Brownian channel each);
// transitions that do are kept discrete and fire as unit jumps with the
// floored intensity lambda * min floor(x_j / I(p_j,t)). The solver is an
// explicit Euler-Maruyama scheme whose step is cut short at the first jump.
// After every step the state is clamped into the box and the P-invariants
// are restored exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "spnjd/error.hpp"
#include "spnjd/fluid.hpp"
#include "spnjd/random.hpp"
#include "spnjd/spn.hpp"
#include "spnjd/structural.hpp"

namespace spnjd {

struct SdeRunConfig {
  double step = 0.01;
  std::size_t runs = 1;
  double t_final = 1.0;
  std::uint64_t seed = 42;
  /// Sampling interval for per-run trajectories; 0 disables tracing.
  double trace_every = 0.0;

  /// Throws EngineError unless 0 < step <= t_final and runs >= 1.
  void validate() const;
  /// 0, trace_every, 2 * trace_every, ..., t_final when tracing; empty otherwise.
  std::vector<double> sample_times() const;
};

struct SdeDiagnostics {
  std::vector<std::uint64_t> jumps;  // per transition
  std::uint64_t steps = 0;
  std::uint64_t box_clamps = 0;        // coordinates moved back into [MIN, MAX]
  std::uint64_t sigma_clamps = 0;      // negative speeds clamped before sqrt
  std::uint64_t fallback_projections = 0;

  void merge(const SdeDiagnostics& other);
};

struct DiffusionColumn {
  std::size_t transition;
  std::vector<double> column;  // sqrt(sigma(t, x)) * L(:, t)
};

/// Diffusion coefficient columns for the `active` transitions.
std::vector<DiffusionColumn> diffusion_columns(const SpnModel& model, std::span<const double> x,
                                               std::span<const std::size_t> active);

/// lambda(t) * min over inputs of floor(x_j / I(p_j,t)).
double jump_intensity(const SpnModel& model, std::span<const double> x, std::size_t t);

struct JumpDraw {
  std::optional<std::size_t> winner;  // position in the intensity list
  double h = 0.0;
};

/// Competing exponentials with frozen intensities over at most `step`.
/// Returns (none, step) when no jump happens first.
template <RandomSource S>
JumpDraw sample_next_jump(std::span<const double> intensities, double step, S& src) {
  double total = 0.0;
  for (double mu : intensities) total += mu;
  if (total <= 0.0) return {std::nullopt, step};
  const double tau = src.exponential(total);
  if (!(tau < step)) return {std::nullopt, step};
  double pick = src.uniform() * total;
  std::size_t winner = 0;
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    if (intensities[i] <= 0.0) continue;
    winner = i;
    if (pick < intensities[i]) break;
    pick -= intensities[i];
  }
  return {winner, tau};
}

/// x + L(:, t). Throws EngineError if the result leaves the box.
FluidState apply_jump(const FluidState& x, const SpnModel& model, std::size_t t, const PlaceBounds& bounds);

/// Euler-Maruyama increment over the `interior` transitions with
/// coefficients frozen at x; one standard normal per transition, drawn in
/// list order. Negative speeds count as 0 (tallied in diag).
template <RandomSource S>
void em_increment(const SpnModel& model, std::span<const double> x, std::span<const std::size_t> interior, double h,
                  S& src, std::span<double> out, SdeDiagnostics* diag = nullptr) {
  const double sqrt_h = std::sqrt(h);
  for (std::size_t t : interior) {
    double level = std::numeric_limits<double>::infinity();
    for (const Arc& a : model.inputs_of(t)) level = std::min(level, x[a.place] / static_cast<double>(a.weight));
    if (level < 0.0) {
      level = 0.0;
      if (diag) ++diag->sigma_clamps;
    }
    const double sigma = model.rate(t) * level;
    const double xi = src.normal();
    const double amount = sigma * h + std::sqrt(sigma) * sqrt_h * xi;
    if (amount == 0.0) continue;
    for (const Arc& c : model.changes_of(t)) out[c.place] += amount * static_cast<double>(c.weight);
  }
}

template <RandomSource S>
FluidState em_substep(const SpnModel& model, const FluidState& x, std::span<const std::size_t> interior, double h,
                      S& src) {
  FluidState next = x;
  em_increment(model, x.values, interior, h, src, std::span<double>(next.values));
  return next;
}

/// Per semiflow, the place recomputed from the others: largest
/// coefficient, ties by declaration order, distinct across semiflows.
std::vector<std::size_t> choose_dependents(const SemiflowBasis& basis);

/// Clamp into the box, recompute each dependent place so x . nu = c
/// exactly, re-clamp; if a dependent lands outside its box, project onto
/// the invariant subspace within the box instead. Throws EngineError when
/// the invariants cannot be met inside the box.
FluidState normalize(const FluidState& x, const SemiflowBasis& basis, const PlaceBounds& bounds,
                     std::span<const std::size_t> dependents, SdeDiagnostics* diag = nullptr);

struct SdeStepRecord {
  double time;
  FluidState state;
  std::optional<std::size_t> jump;  // transition fired at the end of this step
};

struct SdeRunResult {
  FluidState final_state;
  std::vector<FluidState> samples;  // one per requested sample time
  std::vector<SdeStepRecord> steps;  // only when recording steps
  SdeDiagnostics diagnostics;
};

/// Reusable jump-diffusion integrator for one (model, basis, bounds).
class JumpDiffusionSolver {
 public:
  JumpDiffusionSolver(SpnModel model, SemiflowBasis basis, PlaceBounds bounds);

  const SpnModel& model() const noexcept { return model_; }
  const SemiflowBasis& basis() const noexcept { return basis_; }
  const PlaceBounds& bounds() const noexcept { return bounds_; }
  std::span<const std::size_t> dependents() const noexcept { return dependents_; }

  /// One run from the initial marking to t_final with at most `step` per
  /// Euler-Maruyama substep. `sample_times` must be sorted within [0, t_final].
  template <RandomSource S>
  SdeRunResult run(double t_final, double step, S& src, std::span<const double> sample_times = {},
                   bool record_steps = false) const;

 private:
  SpnModel model_;
  SemiflowBasis basis_;
  PlaceBounds bounds_;
  std::vector<std::size_t> dependents_;
};

/// solve_run with the production stream StreamSource(config.seed, run_index).
SdeRunResult solve_run(const JumpDiffusionSolver& solver, const SdeRunConfig& config, std::size_t run_index);

struct Ensemble {
  std::vector<FluidState> final_states;
  std::vector<double> sample_times;
  std::vector<std::vector<FluidState>> samples;  // [run][sample]
  SdeRunConfig config;
  SdeDiagnostics diagnostics;

  std::size_t runs() const noexcept { return final_states.size(); }
  std::vector<double> final_values(std::size_t place) const;
};

/// Independent runs, run r on stream (config.seed, r). Identical output for
/// any worker count (0 = worker_count()).
Ensemble solve_ensemble(const JumpDiffusionSolver& solver, const SdeRunConfig& config, std::size_t workers = 0);

// ---------------------------------------------------------------------------

template <RandomSource S>
SdeRunResult JumpDiffusionSolver::run(double t_final, double step, S& src, std::span<const double> sample_times,
                                      bool record_steps) const {
  const std::size_t np = model_.num_places(), nt = model_.num_transitions();
  SdeRunResult result;
  result.diagnostics.jumps.assign(nt, 0);
  SdeDiagnostics& diag = result.diagnostics;

  FluidState x = FluidState::from(model_.initial_marking());
  std::vector<char> star_place(np);
  std::vector<std::size_t> star, interior;
  std::vector<double> intensity;
  star.reserve(nt);
  interior.reserve(nt);
  intensity.reserve(nt);

  std::size_t next_sample = 0;
  double u = 0.0;
  auto take_samples = [&] {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= u) {
      result.samples.push_back(x);
      ++next_sample;
    }
  };
  take_samples();

  const double t_eps = 1e-12 * std::max(1.0, t_final);
  while (t_final - u > t_eps) {
    const double stop =
        next_sample < sample_times.size() ? std::min(sample_times[next_sample], t_final) : t_final;
    const double horizon = stop - u;
    const double max_h = std::min(step, horizon);

    // split places and transitions
    for (std::size_t p = 0; p < np; ++p) star_place[p] = at_bound(x[p], p, bounds_);
    star.clear();
    interior.clear();
    intensity.clear();
    for (std::size_t t = 0; t < nt; ++t) {
      bool touches = false;
      for (const Arc& c : model_.changes_of(t)) touches |= star_place[c.place] != 0;
      if (touches) {
        star.push_back(t);
        intensity.push_back(jump_intensity(model_, x.values, t));
      } else {
        interior.push_back(t);
      }
    }

    const JumpDraw draw = sample_next_jump(std::span<const double>(intensity), max_h, src);
    const double h = draw.h;
    FluidState next = x;
    std::optional<std::size_t> fired;
    if (draw.winner) {
      fired = star[*draw.winner];
      next = apply_jump(x, model_, *fired, bounds_);
      ++diag.jumps[*fired];
    }
    em_increment(model_, x.values, interior, h, src, std::span<double>(next.values), &diag);
    x = normalize(next, basis_, bounds_, dependents_, &diag);
    ++diag.steps;

    u = (h >= horizon) ? stop : u + h;
    if (record_steps) result.steps.push_back({u, x, fired});
    take_samples();
  }
  result.final_state = x;
  while (next_sample < sample_times.size()) {
    result.samples.push_back(x);
    ++next_sample;
  }
  return result;
}

}  // namespace spnjd

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spnjd/random.hpp"
#include "spnjd/spn.hpp"
#include "spnjd/stats.hpp"

namespace spnjd {

/// Reachability set with the CTMC edges between its markings. State 0 is
/// the initial marking; edge rates equal state_rate(source, target) > 0.
class ReachabilityGraph {
 public:
  struct Edge {
    std::size_t source;
    std::size_t target;
    double rate;
  };

  std::size_t size() const noexcept { return num_places_ == 0 ? 0 : states_.size() / num_places_; }
  std::size_t num_places() const noexcept { return num_places_; }
  std::size_t num_edges() const noexcept { return targets_.size(); }

  std::span<const Count> state(std::size_t i) const {
    return std::span<const Count>(states_).subspan(i * num_places_, num_places_);
  }
  Marking marking(std::size_t i) const;
  std::optional<std::size_t> find(const Marking& m) const;

  std::span<const std::uint32_t> targets(std::size_t s) const {
    return std::span<const std::uint32_t>(targets_).subspan(out_ptr_[s], out_ptr_[s + 1] - out_ptr_[s]);
  }
  std::span<const double> rates(std::size_t s) const {
    return std::span<const double>(rates_).subspan(out_ptr_[s], out_ptr_[s + 1] - out_ptr_[s]);
  }
  double exit_rate(std::size_t s) const;
  std::vector<Edge> edges() const;

 private:
  friend ReachabilityGraph build_reachability(const SpnModel& model, std::size_t cap);

  std::size_t num_places_ = 0;
  std::vector<Count> states_;
  // open-addressing table of state indices, keyed by the count vector
  std::vector<std::uint32_t> slots_;
  std::vector<std::uint64_t> out_ptr_{0};
  std::vector<std::uint32_t> targets_;
  std::vector<double> rates_;
};

/// Breadth-first closure under enabled firings. Throws EngineError once
/// more than `cap` states are discovered (use SSA instead).
ReachabilityGraph build_reachability(const SpnModel& model, std::size_t cap);

struct StateDistribution {
  std::vector<double> probabilities;
  double time = 0.0;
};

/// Poisson(mean) weights on [left, left + weights.size()), truncated so the
/// neglected mass is below `tol`, renormalized to sum to 1.
struct PoissonWindow {
  std::size_t left = 0;
  std::vector<double> weights;
};

PoissonWindow poisson_window(double mean, double tol);

/// Transient distribution at time t by uniformization with rate
/// 1.05 * max exit rate.
StateDistribution transient_uniformization(const ReachabilityGraph& rg, double t, double tol = 1e-12);

/// Distribution of the token count of `place`.
EmpiricalPmf marginal(const StateDistribution& dist, const ReachabilityGraph& rg, std::size_t place);

/// E[m(place)] under dist.
double expected_tokens(const StateDistribution& dist, const ReachabilityGraph& rg, std::size_t place);

struct SsaTrajectory {
  std::vector<double> jump_times;  // jump_times[0] == 0 holds the initial marking
  std::vector<Marking> states;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Advances `m` with Gillespie's direct method from `clock` to `until`
/// (or absorption). `on_jump(t, marking, transition)` is called after
/// every firing. Returns the number of firings.
template <RandomSource S, class OnJump>
std::size_t ssa_advance(const SpnModel& model, Marking& m, double& clock, double until, S& src, OnJump&& on_jump) {
  const std::size_t nt = model.num_transitions();
  std::vector<double> intensity(nt);
  std::size_t fired = 0;
  while (clock < until) {
    double total = 0.0;
    for (std::size_t t = 0; t < nt; ++t) total += intensity[t] = transition_intensity(model, m, t);
    if (total <= 0.0) break;
    const double tau = src.exponential(total);
    if (clock + tau > until) break;
    clock += tau;
    double pick = src.uniform() * total;
    std::size_t winner = nt;
    for (std::size_t t = 0; t < nt; ++t) {
      if (intensity[t] <= 0.0) continue;
      winner = t;
      if (pick < intensity[t]) break;
      pick -= intensity[t];
    }
    for (const Arc& c : model.changes_of(winner)) m[c.place] += c.weight;
    ++fired;
    on_jump(clock, m, winner);
  }
  clock = std::max(clock, until);
  return fired;
}

/// Single SSA sample path on [0, t_final], recording every jump.
template <RandomSource S>
SsaTrajectory ssa_run(const SpnModel& model, double t_final, S& src) {
  SsaTrajectory traj;
  traj.jump_times.push_back(0.0);
  traj.states.push_back(model.initial_marking());
  Marking m = model.initial_marking();
  double clock = 0.0;
  ssa_advance(model, m, clock, t_final, src, [&](double t, const Marking& now, std::size_t) {
    traj.jump_times.push_back(t);
    traj.states.push_back(now);
  });
  return traj;
}

SsaTrajectory ssa_run(const SpnModel& model, double t_final, std::uint64_t seed, std::uint64_t stream = 0);

struct SsaEnsemble {
  std::vector<Marking> final_states;
  /// samples[run][k] is the marking at sample_times[k] (empty without sampling).
  std::vector<double> sample_times;
  std::vector<std::vector<Marking>> samples;
  std::vector<std::uint64_t> firings;  // per transition, summed over runs
  std::uint64_t seed = 0;
  double t_final = 0.0;

  std::size_t runs() const noexcept { return final_states.size(); }
  /// Token counts of `place` across runs, as doubles for the stats module.
  std::vector<double> final_values(std::size_t place) const;
};

/// Independent runs; run r uses StreamSource(seed, r). Output does not depend
/// on `workers`.
SsaEnsemble ssa_ensemble(const SpnModel& model, double t_final, std::size_t runs, std::uint64_t seed,
                         std::span<const double> sample_times = {}, std::size_t workers = 0);

}  // namespace spnjd

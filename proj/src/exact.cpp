#include "spnjd/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spnjd/error.hpp"
#include "spnjd/kernels.hpp"
#include "spnjd/parallel.hpp"

namespace spnjd {

namespace {

constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

std::uint64_t hash_counts(std::span<const Count> c) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (Count v : c) h = mix64(h ^ static_cast<std::uint64_t>(v));
  return h;
}

}  // namespace

Marking ReachabilityGraph::marking(std::size_t i) const {
  auto s = state(i);
  return Marking{std::vector<Count>(s.begin(), s.end())};
}

std::optional<std::size_t> ReachabilityGraph::find(const Marking& m) const {
  if (m.size() != num_places_ || slots_.empty()) return std::nullopt;
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t slot = hash_counts(m.counts) & mask;; slot = (slot + 1) & mask) {
    if (slots_[slot] == kEmpty) return std::nullopt;
    auto s = state(slots_[slot]);
    if (std::equal(s.begin(), s.end(), m.counts.begin())) return slots_[slot];
  }
}

double ReachabilityGraph::exit_rate(std::size_t s) const {
  double r = 0.0;
  for (double x : rates(s)) r += x;
  return r;
}

std::vector<ReachabilityGraph::Edge> ReachabilityGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t s = 0; s < size(); ++s) {
    auto tg = targets(s);
    auto rt = rates(s);
    for (std::size_t k = 0; k < tg.size(); ++k) out.push_back({s, tg[k], rt[k]});
  }
  return out;
}

ReachabilityGraph build_reachability(const SpnModel& model, std::size_t cap) {
  if (cap == 0) throw EngineError("state cap must be positive");
  if (cap >= kEmpty) cap = kEmpty - 1;
  const std::size_t np = model.num_places(), nt = model.num_transitions();

  ReachabilityGraph rg;
  rg.num_places_ = np;
  rg.slots_.assign(1024, kEmpty);

  auto grow = [&] {
    std::vector<std::uint32_t> bigger(rg.slots_.size() * 2, kEmpty);
    const std::size_t mask = bigger.size() - 1;
    for (std::uint32_t idx : rg.slots_) {
      if (idx == kEmpty) continue;
      std::size_t slot = hash_counts(rg.state(idx)) & mask;
      while (bigger[slot] != kEmpty) slot = (slot + 1) & mask;
      bigger[slot] = idx;
    }
    rg.slots_ = std::move(bigger);
  };

  // Returns the index of `m`, inserting it if new.
  auto intern = [&](std::span<const Count> m) -> std::uint32_t {
    const std::size_t mask = rg.slots_.size() - 1;
    std::size_t slot = hash_counts(m) & mask;
    for (; rg.slots_[slot] != kEmpty; slot = (slot + 1) & mask) {
      auto s = rg.state(rg.slots_[slot]);
      if (std::equal(s.begin(), s.end(), m.begin())) return rg.slots_[slot];
    }
    const std::size_t idx = rg.size();
    if (idx >= cap)
      throw EngineError("reachability set exceeds the cap of " + std::to_string(cap) + " states; use SSA instead");
    rg.states_.insert(rg.states_.end(), m.begin(), m.end());
    rg.slots_[slot] = static_cast<std::uint32_t>(idx);
    if (2 * (idx + 1) > rg.slots_.size()) grow();
    return static_cast<std::uint32_t>(idx);
  };

  intern(model.initial_marking().counts);
  Marking cur{std::vector<Count>(np)};
  std::vector<Count> next(np);
  std::vector<std::pair<std::uint32_t, double>> out;
  // BFS order equals index order, so the frontier is just the next index.
  for (std::size_t s = 0; s < rg.size(); ++s) {
    auto st = rg.state(s);
    std::copy(st.begin(), st.end(), cur.counts.begin());
    out.clear();
    for (std::size_t t = 0; t < nt; ++t) {
      const double rate = transition_intensity(model, cur, t);
      if (rate <= 0.0) continue;
      next = cur.counts;
      for (const Arc& c : model.changes_of(t)) next[c.place] += c.weight;
      const std::uint32_t target = intern(next);
      // transitions with equal incidence columns share one CTMC edge
      auto same = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == target; });
      if (same != out.end()) same->second += rate;
      else out.emplace_back(target, rate);
    }
    for (const auto& [target, rate] : out) {
      rg.targets_.push_back(target);
      rg.rates_.push_back(rate);
    }
    rg.out_ptr_.push_back(rg.targets_.size());
  }
  return rg;
}

PoissonWindow poisson_window(double mean, double tol) {
  PoissonWindow win;
  if (mean <= 0.0) {
    win.weights = {1.0};
    return win;
  }
  const auto mode = static_cast<std::size_t>(std::floor(mean));
  const double md = static_cast<double>(mode);
  const double w_mode = std::exp(-mean + md * std::log(mean) - std::lgamma(md + 1.0));
  const double half_tol = tol / 2.0;

  std::vector<double> right{w_mode};
  for (std::size_t k = mode;; ++k) {
    const double rho = mean / static_cast<double>(k + 1);
    const double w = right.back();
    if (rho < 1.0 && w * rho / (1.0 - rho) < half_tol) break;
    right.push_back(w * mean / static_cast<double>(k + 1));
  }
  std::vector<double> left;
  double w = w_mode;
  for (std::size_t k = mode; k > 0; --k) {
    const double rho = static_cast<double>(k) / mean;
    if (rho < 1.0 && w * rho / (1.0 - rho) < half_tol) break;
    w *= rho;
    left.push_back(w);
  }
  win.left = mode - left.size();
  win.weights.assign(left.rbegin(), left.rend());
  win.weights.insert(win.weights.end(), right.begin(), right.end());
  double total = 0.0;
  for (double x : win.weights) total += x;
  for (double& x : win.weights) x /= total;
  return win;
}

StateDistribution transient_uniformization(const ReachabilityGraph& rg, double t, double tol) {
  if (t < 0.0) throw EngineError("negative time");
  const std::size_t n = rg.size();
  StateDistribution dist;
  dist.time = t;
  dist.probabilities.assign(n, 0.0);
  dist.probabilities[0] = 1.0;

  double max_exit = 0.0;
  for (std::size_t s = 0; s < n; ++s) max_exit = std::max(max_exit, rg.exit_rate(s));
  if (t == 0.0 || max_exit == 0.0) return dist;
  const double unif = 1.05 * max_exit;

  // Incoming-edge CSR of the uniformized DTMC P = I + Q / unif, so one
  // DTMC step is a row-gather matvec: v'[j] = diag[j] v[j] + sum_i P[i][j] v[i].
  std::vector<std::uint64_t> row_ptr(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::uint32_t target : rg.targets(s)) ++row_ptr[target + 1];
  for (std::size_t j = 0; j < n; ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<std::int32_t> cols(rg.num_edges());
  std::vector<double> values(rg.num_edges());
  std::vector<double> diag(n);
  {
    std::vector<std::uint64_t> fill(row_ptr.begin(), row_ptr.end() - 1);
    for (std::size_t s = 0; s < n; ++s) {
      auto tg = rg.targets(s);
      auto rt = rg.rates(s);
      for (std::size_t k = 0; k < tg.size(); ++k) {
        const std::uint64_t at = fill[tg[k]]++;
        cols[at] = static_cast<std::int32_t>(s);
        values[at] = rt[k] / unif;
      }
      diag[s] = 1.0 - rg.exit_rate(s) / unif;
    }
  }
  const kernels::CsrView dtmc{row_ptr, cols, values, diag};

  const PoissonWindow win = poisson_window(unif * t, tol);
  std::vector<double> v(n, 0.0), scratch(n);
  v[0] = 1.0;
  dist.probabilities.assign(n, 0.0);
  const std::size_t last = win.left + win.weights.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    if (k >= win.left) kernels::axpy(win.weights[k - win.left], v, dist.probabilities);
    if (k == last) break;
    kernels::csr_matvec(dtmc, v, scratch);
    v.swap(scratch);
  }
  for (double& p : dist.probabilities) p = std::max(p, 0.0);
  kernels::scale(1.0 / kernels::sum(dist.probabilities), dist.probabilities);
  return dist;
}

EmpiricalPmf marginal(const StateDistribution& dist, const ReachabilityGraph& rg, std::size_t place) {
  std::vector<std::pair<Count, double>> pairs;
  pairs.reserve(rg.size());
  for (std::size_t s = 0; s < rg.size(); ++s) pairs.emplace_back(rg.state(s)[place], dist.probabilities[s]);
  return EmpiricalPmf::from_pairs(std::move(pairs));
}

double expected_tokens(const StateDistribution& dist, const ReachabilityGraph& rg, std::size_t place) {
  double e = 0.0;
  for (std::size_t s = 0; s < rg.size(); ++s) e += static_cast<double>(rg.state(s)[place]) * dist.probabilities[s];
  return e;
}

SsaTrajectory ssa_run(const SpnModel& model, double t_final, std::uint64_t seed, std::uint64_t stream) {
  StreamSource src(seed, stream);
  SsaTrajectory traj = ssa_run(model, t_final, src);
  traj.seed = seed;
  traj.stream = stream;
  return traj;
}

std::vector<double> SsaEnsemble::final_values(std::size_t place) const {
  std::vector<double> v;
  v.reserve(final_states.size());
  for (const auto& m : final_states) v.push_back(static_cast<double>(m[place]));
  return v;
}

SsaEnsemble ssa_ensemble(const SpnModel& model, double t_final, std::size_t runs, std::uint64_t seed,
                         std::span<const double> sample_times, std::size_t workers) {
  if (runs == 0) throw EngineError("runs must be >= 1");
  if (t_final < 0.0) throw EngineError("negative final time");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
      (!sample_times.empty() && (sample_times.front() < 0.0 || sample_times.back() > t_final)))
    throw EngineError("sample times must be sorted and within [0, t_final]");

  const std::size_t nt = model.num_transitions();
  SsaEnsemble ens;
  ens.seed = seed;
  ens.t_final = t_final;
  ens.sample_times.assign(sample_times.begin(), sample_times.end());
  ens.final_states.resize(runs);
  if (!sample_times.empty()) ens.samples.resize(runs);
  std::vector<std::vector<std::uint64_t>> fired(runs, std::vector<std::uint64_t>(nt, 0));

  parallel_for(
      runs,
      [&](std::size_t r) {
        StreamSource src(seed, r);
        Marking m = model.initial_marking();
        double clock = 0.0;
        auto count = [&](double, const Marking&, std::size_t t) { ++fired[r][t]; };
        for (double ts : sample_times) {
          ssa_advance(model, m, clock, ts, src, count);
          ens.samples[r].push_back(m);
        }
        ssa_advance(model, m, clock, t_final, src, count);
        ens.final_states[r] = std::move(m);
      },
      workers == 0 ? worker_count() : workers);

  ens.firings.assign(nt, 0);
  for (const auto& f : fired)
    for (std::size_t t = 0; t < nt; ++t) ens.firings[t] += f[t];
  return ens;
}

}  // namespace spnjd

#include "spnjd/jump_sde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spnjd/parallel.hpp"

namespace spnjd {

void SdeRunConfig::validate() const {
  if (!(step > 0.0)) throw EngineError("step must be positive");
  if (!(t_final > 0.0)) throw EngineError("final time must be positive");
  if (step > t_final) throw EngineError("step must not exceed the final time");
  if (runs < 1) throw EngineError("runs must be >= 1");
  if (trace_every < 0.0) throw EngineError("trace interval must be non-negative");
}

std::vector<double> SdeRunConfig::sample_times() const {
  std::vector<double> times;
  if (trace_every <= 0.0) return times;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * trace_every;
    if (t >= t_final - 1e-12 * std::max(1.0, t_final)) break;
    times.push_back(t);
  }
  times.push_back(t_final);
  return times;
}

void SdeDiagnostics::merge(const SdeDiagnostics& other) {
  if (jumps.size() < other.jumps.size()) jumps.resize(other.jumps.size(), 0);
  for (std::size_t t = 0; t < other.jumps.size(); ++t) jumps[t] += other.jumps[t];
  steps += other.steps;
  box_clamps += other.box_clamps;
  sigma_clamps += other.sigma_clamps;
  fallback_projections += other.fallback_projections;
}

std::vector<DiffusionColumn> diffusion_columns(const SpnModel& model, std::span<const double> x,
                                               std::span<const std::size_t> active) {
  std::vector<DiffusionColumn> cols;
  cols.reserve(active.size());
  for (std::size_t t : active) {
    const double root = std::sqrt(std::max(fluid_speed(model, x, t), 0.0));
    DiffusionColumn col{t, std::vector<double>(model.num_places(), 0.0)};
    for (const Arc& c : model.changes_of(t)) col.column[c.place] = root * static_cast<double>(c.weight);
    cols.push_back(std::move(col));
  }
  return cols;
}

double jump_intensity(const SpnModel& model, std::span<const double> x, std::size_t t) {
  double degree = std::numeric_limits<double>::infinity();
  for (const Arc& a : model.inputs_of(t))
    degree = std::min(degree, std::floor(x[a.place] / static_cast<double>(a.weight)));
  return model.rate(t) * std::max(degree, 0.0);
}

FluidState apply_jump(const FluidState& x, const SpnModel& model, std::size_t t, const PlaceBounds& bounds) {
  FluidState next = x;
  for (const Arc& c : model.changes_of(t)) next[c.place] += static_cast<double>(c.weight);
  for (const Arc& c : model.changes_of(t)) {
    const double hi = static_cast<double>(bounds.max[c.place]);
    const double eps = kBoundaryTolerance * std::max(1.0, hi);
    if (next[c.place] < static_cast<double>(bounds.min[c.place]) - eps || next[c.place] > hi + eps)
      throw EngineError("jump of '" + model.transition_names()[t] + "' leaves the bounding box at place '" +
                        model.place_names()[c.place] + "'");
  }
  return next;
}

std::vector<std::size_t> choose_dependents(const SemiflowBasis& basis) {
  std::vector<std::size_t> deps;
  std::vector<bool> used;
  for (const auto& nu : basis.vectors) {
    used.resize(nu.size(), false);
    std::vector<std::size_t> order(nu.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nu[a] > nu[b]; });
    auto pick = std::find_if(order.begin(), order.end(), [&](std::size_t p) { return nu[p] > 0 && !used[p]; });
    if (pick == order.end()) throw EngineError("no free dependent place for a semiflow");
    used[*pick] = true;
    deps.push_back(*pick);
  }
  return deps;
}

namespace {

double dot(const std::vector<Count>& nu, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (nu[i] != 0) s += static_cast<double>(nu[i]) * x[i];
  return s;
}

std::size_t clamp_into(std::vector<double>& y, const PlaceBounds& b) {
  std::size_t moved = 0;
  for (std::size_t p = 0; p < y.size(); ++p) {
    const double lo = static_cast<double>(b.min[p]), hi = static_cast<double>(b.max[p]);
    if (y[p] < lo) y[p] = lo, ++moved;
    else if (y[p] > hi) y[p] = hi, ++moved;
  }
  return moved;
}

// Solves for the dependent coordinates so that every invariant holds
// exactly given the other coordinates. Returns false if the small system is
// singular.
bool restore_dependents(std::vector<double>& y, const SemiflowBasis& basis, std::span<const std::size_t> deps) {
  const std::size_t m = basis.size();
  if (m == 0) return true;
  std::vector<bool> is_dep(y.size(), false);
  for (std::size_t d : deps) is_dep[d] = true;
  // A z = r with A[k][j] = nu_k[dep_j], r_k = c_k - sum over non-dependents
  std::vector<double> a(m * m), r(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& nu = basis.vectors[k];
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!is_dep[i] && nu[i] != 0) s += static_cast<double>(nu[i]) * y[i];
    r[k] = static_cast<double>(basis.constants[k]) - s;
    for (std::size_t j = 0; j < m; ++j) a[k * m + j] = static_cast<double>(nu[deps[j]]);
  }
  // Gaussian elimination with partial pivoting; m is tiny.
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < m; ++row)
      if (std::abs(a[row * m + col]) > std::abs(a[piv * m + col])) piv = row;
    if (std::abs(a[piv * m + col]) < 1e-12) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < m; ++j) std::swap(a[piv * m + j], a[col * m + j]);
      std::swap(r[piv], r[col]);
    }
    for (std::size_t row = col + 1; row < m; ++row) {
      const double f = a[row * m + col] / a[col * m + col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < m; ++j) a[row * m + j] -= f * a[col * m + j];
      r[row] -= f * r[col];
    }
  }
  std::vector<double> z(m);
  for (std::size_t k = m; k-- > 0;) {
    double s = r[k];
    for (std::size_t j = k + 1; j < m; ++j) s -= a[k * m + j] * z[j];
    z[k] = s / a[k * m + k];
  }
  for (std::size_t j = 0; j < m; ++j) y[deps[j]] = z[j];
  return true;
}

bool inside(const std::vector<double>& y, const PlaceBounds& b, std::span<const std::size_t> which) {
  for (std::size_t p : which) {
    const double hi = static_cast<double>(b.max[p]);
    const double eps = kBoundaryTolerance * std::max(1.0, hi);
    if (y[p] < static_cast<double>(b.min[p]) - eps || y[p] > hi + eps) return false;
  }
  return true;
}

double max_residual(const std::vector<double>& y, const SemiflowBasis& basis) {
  double worst = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double c = static_cast<double>(basis.constants[k]);
    worst = std::max(worst, std::abs(c - dot(basis.vectors[k], y)) / std::max(1.0, c));
  }
  return worst;
}

}  // namespace

FluidState normalize(const FluidState& x, const SemiflowBasis& basis, const PlaceBounds& bounds,
                     std::span<const std::size_t> dependents, SdeDiagnostics* diag) {
  std::vector<double> y = x.values;
  std::size_t clamps = clamp_into(y, bounds);

  std::vector<double> trial = y;
  if (restore_dependents(trial, basis, dependents) && inside(trial, bounds, dependents)) {
    clamps += clamp_into(trial, bounds);
    if (diag) diag->box_clamps += clamps;
    return FluidState(std::move(trial));
  }

  // Fallback: alternate least-squares corrections on each invariant
  // hyperplane, restricted to coordinates with room, with box clamping.
  if (diag) ++diag->fallback_projections;
  for (int iter = 0; iter < 200 && max_residual(y, basis) > 1e-13; ++iter) {
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const auto& nu = basis.vectors[k];
      const double r = static_cast<double>(basis.constants[k]) - dot(nu, y);
      if (r == 0.0) continue;
      double norm2 = 0.0;
      for (std::size_t p = 0; p < y.size(); ++p) {
        if (nu[p] == 0) continue;
        const bool room = r > 0 ? y[p] < static_cast<double>(bounds.max[p]) : y[p] > static_cast<double>(bounds.min[p]);
        if (room) norm2 += static_cast<double>(nu[p] * nu[p]);
      }
      if (norm2 == 0.0) throw EngineError("P-invariant constant is incompatible with the place bounds");
      const double step = r / norm2;
      for (std::size_t p = 0; p < y.size(); ++p) {
        if (nu[p] == 0) continue;
        const bool room = r > 0 ? y[p] < static_cast<double>(bounds.max[p]) : y[p] > static_cast<double>(bounds.min[p]);
        if (room) y[p] += step * static_cast<double>(nu[p]);
      }
      clamps += clamp_into(y, bounds);
    }
  }
  trial = y;
  if (restore_dependents(trial, basis, dependents) && inside(trial, bounds, dependents)) {
    clamp_into(trial, bounds);
    y = std::move(trial);
  }
  if (max_residual(y, basis) > 1e-9) throw EngineError("P-invariant constant is incompatible with the place bounds");
  if (diag) diag->box_clamps += clamps;
  return FluidState(std::move(y));
}

JumpDiffusionSolver::JumpDiffusionSolver(SpnModel model, SemiflowBasis basis, PlaceBounds bounds)
    : model_(std::move(model)), basis_(std::move(basis)), bounds_(std::move(bounds)) {
  const std::size_t np = model_.num_places();
  if (bounds_.min.size() != np || bounds_.max.size() != np) throw EngineError("bounds do not match the model");
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const auto& nu = basis_.vectors[k];
    double lo = 0.0, hi = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      lo += static_cast<double>(nu[p] * bounds_.min[p]);
      hi += static_cast<double>(nu[p]) * static_cast<double>(bounds_.max[p]);
    }
    const double c = static_cast<double>(basis_.constants[k]);
    if (c < lo || c > hi) throw EngineError("P-invariant constant is incompatible with the place bounds");
  }
  for (std::size_t p = 0; p < np; ++p) {
    const Count m0 = model_.initial_marking()[p];
    if (m0 < bounds_.min[p] || m0 > bounds_.max[p])
      throw EngineError("initial marking outside the bounds at place '" + model_.place_names()[p] + "'");
  }
  dependents_ = choose_dependents(basis_);
}

SdeRunResult solve_run(const JumpDiffusionSolver& solver, const SdeRunConfig& config, std::size_t run_index) {
  config.validate();
  StreamSource src(config.seed, run_index);
  const auto times = config.sample_times();
  return solver.run(config.t_final, config.step, src, times);
}

std::vector<double> Ensemble::final_values(std::size_t place) const {
  std::vector<double> v;
  v.reserve(final_states.size());
  for (const auto& s : final_states) v.push_back(s[place]);
  return v;
}

Ensemble solve_ensemble(const JumpDiffusionSolver& solver, const SdeRunConfig& config, std::size_t workers) {
  config.validate();
  Ensemble ens;
  ens.config = config;
  ens.sample_times = config.sample_times();
  ens.final_states.resize(config.runs);
  if (!ens.sample_times.empty()) ens.samples.resize(config.runs);
  std::vector<SdeDiagnostics> diags(config.runs);

  parallel_for(
      config.runs,
      [&](std::size_t r) {
        StreamSource src(config.seed, r);
        SdeRunResult res = solver.run(config.t_final, config.step, src, ens.sample_times);
        ens.final_states[r] = std::move(res.final_state);
        if (!ens.sample_times.empty()) ens.samples[r] = std::move(res.samples);
        diags[r] = std::move(res.diagnostics);
      },
      workers == 0 ? worker_count() : workers);

  ens.diagnostics.jumps.assign(solver.model().num_transitions(), 0);
  for (const auto& d : diags) ens.diagnostics.merge(d);
  return ens;
}

}  // namespace spnjd

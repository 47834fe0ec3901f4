#include "spnjd/structural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spnjd/error.hpp"
#include "spnjd/exact.hpp"

namespace spnjd {

namespace {

using Row = std::vector<Count>;

void reduce_gcd(Row& r) {
  Count g = 0;
  for (Count v : r) g = std::gcd(g, v < 0 ? -v : v);
  if (g > 1)
    for (Count& v : r) v /= g;
}

std::vector<std::size_t> support(const Row& r, std::size_t offset) {
  std::vector<std::size_t> s;
  for (std::size_t i = offset; i < r.size(); ++i)
    if (r[i] != 0) s.push_back(i - offset);
  return s;
}

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Drops rows whose support (over the identity block) strictly contains the
// support of another row, plus duplicates of equal support after reduction.
void keep_minimal_support(std::vector<Row>& rows, std::size_t offset) {
  std::vector<std::vector<std::size_t>> supp;
  supp.reserve(rows.size());
  for (const auto& r : rows) supp.push_back(support(r, offset));

  std::vector<bool> drop(rows.size(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size() && !drop[i]; ++j) {
      if (i == j || drop[j]) continue;
      if (supp[j].size() < supp[i].size() && subset(supp[j], supp[i])) drop[i] = true;
      else if (supp[j] == supp[i] && j < i) drop[i] = true;
    }
  }
  std::vector<Row> kept;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(rows[i]));
  rows = std::move(kept);
}

}  // namespace

std::string_view to_string(Dependence d) {
  switch (d) {
    case Dependence::density_dependent: return "density-dependent";
    case Dependence::nearly_density_dependent: return "nearly-density-dependent";
    case Dependence::not_covered: return "not-covered";
  }
  return "unknown";
}

SemiflowBasis minimal_psemiflows(const SpnModel& model) {
  const std::size_t np = model.num_places(), nt = model.num_transitions();
  std::vector<Row> rows;
  for (std::size_t p = 0; p < np; ++p) {
    Row r(nt + np, 0);
    for (std::size_t t = 0; t < nt; ++t) r[t] = model.incidence(p, t);
    r[nt + p] = 1;
    rows.push_back(std::move(r));
  }

  for (std::size_t col = 0; col < nt; ++col) {
    std::vector<Row> next;
    std::vector<const Row*> pos, neg;
    for (const auto& r : rows) {
      if (r[col] == 0) next.push_back(r);
      else if (r[col] > 0) pos.push_back(&r);
      else neg.push_back(&r);
    }
    for (const Row* a : pos) {
      for (const Row* b : neg) {
        const Count ca = -(*b)[col], cb = (*a)[col];
        Row c(nt + np);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = ca * (*a)[k] + cb * (*b)[k];
        reduce_gcd(c);
        next.push_back(std::move(c));
      }
    }
    keep_minimal_support(next, nt);
    rows = std::move(next);
  }

  std::vector<std::pair<std::vector<std::size_t>, Row>> found;
  for (auto& r : rows) {
    Row nu(r.begin() + static_cast<std::ptrdiff_t>(nt), r.end());
    reduce_gcd(nu);
    found.emplace_back(support(nu, 0), std::move(nu));
  }
  std::sort(found.begin(), found.end());

  SemiflowBasis basis;
  const Marking& m0 = model.initial_marking();
  for (auto& [s, nu] : found) {
    Count c = 0;
    for (std::size_t p = 0; p < np; ++p) c += nu[p] * m0[p];
    basis.vectors.push_back(std::move(nu));
    basis.constants.push_back(c);
  }
  return basis;
}

bool check_coverage(const SpnModel& model, const SemiflowBasis& basis) {
  for (std::size_t p = 0; p < model.num_places(); ++p) {
    bool covered = false;
    for (const auto& nu : basis.vectors) covered |= nu[p] > 0;
    if (!covered) return false;
  }
  return true;
}

DependenceReport classify_density_dependence(const SpnModel& model, const SemiflowBasis& basis) {
  DependenceReport report;
  report.covered = check_coverage(model, basis);
  for (std::size_t t = 0; t < model.num_transitions(); ++t)
    for (const Arc& a : model.inputs_of(t))
      if (a.weight > 1) report.nonunit_arcs.emplace_back(a.place, t);
  if (!report.covered) report.classification = Dependence::not_covered;
  else if (report.nonunit_arcs.empty()) report.classification = Dependence::density_dependent;
  else report.classification = Dependence::nearly_density_dependent;
  return report;
}

PlaceBounds place_bounds(const SpnModel& model, const SemiflowBasis& basis, BoundsMode mode,
                         std::size_t state_cap) {
  const std::size_t np = model.num_places();
  PlaceBounds b;
  if (mode == BoundsMode::exact) {
    const ReachabilityGraph rg = build_reachability(model, state_cap);
    b.min.assign(np, std::numeric_limits<Count>::max());
    b.max.assign(np, 0);
    for (std::size_t s = 0; s < rg.size(); ++s) {
      const auto st = rg.state(s);
      for (std::size_t p = 0; p < np; ++p) {
        b.min[p] = std::min<Count>(b.min[p], st[p]);
        b.max[p] = std::max<Count>(b.max[p], st[p]);
      }
    }
    b.provenance.assign(np, BoundProvenance::reachability);
    return b;
  }

  if (!check_coverage(model, basis))
    throw EngineError("semiflow bounds require every place to be covered by a P-semiflow");
  b.min.assign(np, 0);
  b.max.assign(np, std::numeric_limits<Count>::max());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& nu = basis.vectors[k];
    for (std::size_t p = 0; p < np; ++p)
      if (nu[p] > 0) b.max[p] = std::min(b.max[p], basis.constants[k] / nu[p]);
  }
  b.provenance.assign(np, BoundProvenance::semiflow);
  return b;
}

bool at_bound(double x, std::size_t place, const PlaceBounds& bounds) {
  const double hi = static_cast<double>(bounds.max[place]);
  const double lo = static_cast<double>(bounds.min[place]);
  const double eps = kBoundaryTolerance * std::max(1.0, hi);
  return std::abs(x - lo) <= eps || std::abs(x - hi) <= eps;
}

BoundarySplit boundary_split(const FluidState& state, const PlaceBounds& bounds, const SpnModel& model) {
  const std::size_t np = model.num_places(), nt = model.num_transitions();
  BoundarySplit split;
  std::vector<bool> star(np, false);
  for (std::size_t p = 0; p < np; ++p) {
    const double hi = static_cast<double>(bounds.max[p]);
    const double lo = static_cast<double>(bounds.min[p]);
    const double eps = kBoundaryTolerance * std::max(1.0, hi);
    if (!(state[p] >= lo - eps && state[p] <= hi + eps))
      throw EngineError("state outside the bounding box at place '" + model.place_names()[p] + "'");
    if (at_bound(state[p], p, bounds)) {
      star[p] = true;
      split.star_places.push_back(p);
    }
  }
  split.theta.assign(nt, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    for (const Arc& c : model.changes_of(t))
      if (star[c.place]) split.theta[t] += c.weight < 0 ? -c.weight : c.weight;
    (split.theta[t] != 0 ? split.star_transitions : split.interior_transitions).push_back(t);
  }
  return split;
}

}  // namespace spnjd

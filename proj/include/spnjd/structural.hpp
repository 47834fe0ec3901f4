#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "spnjd/spn.hpp"

namespace spnjd {

/// Minimal P-semiflows nu (nu * L = 0, nu >= 0) with conserved constants m0 * nu^T.
struct SemiflowBasis {
  std::vector<std::vector<Count>> vectors;
  std::vector<Count> constants;

  std::size_t size() const noexcept { return vectors.size(); }
  bool empty() const noexcept { return vectors.empty(); }
};

enum class BoundProvenance { semiflow, reachability };

struct PlaceBounds {
  std::vector<Count> min;
  std::vector<Count> max;
  std::vector<BoundProvenance> provenance;
};

enum class BoundsMode { semiflow, exact };

enum class Dependence { density_dependent, nearly_density_dependent, not_covered };

std::string_view to_string(Dependence d);

struct DependenceReport {
  Dependence classification = Dependence::not_covered;
  bool covered = false;
  /// (place, transition) pairs with input multiplicity > 1.
  std::vector<std::pair<std::size_t, std::size_t>> nonunit_arcs;
};

struct BoundarySplit {
  std::vector<std::size_t> star_places;
  std::vector<std::size_t> star_transitions;
  std::vector<std::size_t> interior_transitions;
  /// theta(t) = sum_i |L(p_i,t)| * [p_i at a bound]
  std::vector<Count> theta;
};

/// Farkas elimination over the incidence matrix, exact integer arithmetic.
/// Vectors are gcd-reduced, support-minimal, and ordered lexicographically
/// by support set.
SemiflowBasis minimal_psemiflows(const SpnModel& model);

/// Every place has a positive entry in some basis vector.
bool check_coverage(const SpnModel& model, const SemiflowBasis& basis);

DependenceReport classify_density_dependence(const SpnModel& model, const SemiflowBasis& basis);

/// Semiflow mode: MAX(p) = min over nu with nu_p > 0 of floor(c / nu_p), MIN = 0.
/// Exact mode: coordinate-wise min/max over the reachability set (throws
/// EngineError past `state_cap`).
PlaceBounds place_bounds(const SpnModel& model, const SemiflowBasis& basis, BoundsMode mode,
                         std::size_t state_cap = 1'000'000);

/// Relative tolerance for "at a bound": |x - b| <= kBoundaryTolerance * max(1, MAX(p)).
inline constexpr double kBoundaryTolerance = 1e-9;

bool at_bound(double x, std::size_t place, const PlaceBounds& bounds);

/// Splits places into bound/interior and transitions into star/interior.
/// Throws EngineError if the state is outside the closed box.
BoundarySplit boundary_split(const FluidState& state, const PlaceBounds& bounds, const SpnModel& model);

}  // namespace spnjd

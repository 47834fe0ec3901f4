#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "spnjd/catalog.hpp"
#include "spnjd/error.hpp"
#include "spnjd/exact.hpp"
#include "spnjd/structural.hpp"

using namespace spnjd;
using spnjd::testing::cycle_doc;

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// Exhaustive search for nonnegative integer left-annihilators with entries
// in [0, hi]; returns the support-minimal ones with gcd 1.
std::vector<std::vector<Count>> brute_force_semiflows(const SpnModel& m, Count hi) {
  const std::size_t np = m.num_places();
  std::vector<std::vector<Count>> found;
  std::vector<Count> nu(np, 0);
  for (;;) {
    std::size_t i = 0;
    while (i < np && nu[i] == hi) nu[i++] = 0;
    if (i == np) break;
    ++nu[i];
    bool zero = true;
    for (std::size_t t = 0; t < m.num_transitions() && zero; ++t) {
      Count s = 0;
      for (std::size_t p = 0; p < np; ++p) s += nu[p] * m.incidence(p, t);
      zero = s == 0;
    }
    if (zero) found.push_back(nu);
  }
  auto support = [](const std::vector<Count>& v) {
    std::vector<bool> s;
    for (Count c : v) s.push_back(c > 0);
    return s;
  };
  std::vector<std::vector<Count>> minimal;
  for (const auto& v : found) {
    const auto sv = support(v);
    bool is_min = true;
    for (const auto& w : found) {
      const auto sw = support(w);
      bool strict_subset = sw != sv;
      for (std::size_t p = 0; p < np && strict_subset; ++p) strict_subset = !sw[p] || sv[p];
      if (strict_subset) is_min = false;
    }
    Count g = 0;
    for (Count c : v) g = std::gcd(g, c);
    if (is_min && g == 1) minimal.push_back(v);
  }
  std::sort(minimal.begin(), minimal.end());
  return minimal;
}

}  // namespace

TEST_SUITE("structural") {

TEST_CASE("semiflows of the cycle and SIR nets") {
  const SpnModel cyc = validate_model(cycle_doc());
  const SemiflowBasis b = minimal_psemiflows(cyc);
  REQUIRE(b.size() == 1);
  CHECK(b.vectors[0] == std::vector<Count>{1, 1});
  CHECK(b.constants[0] == 100);

  for (SirExperiment e : {SirExperiment::exp1, SirExperiment::exp2}) {
    const SemiflowBasis s = minimal_psemiflows(sir(e));
    REQUIRE(s.size() == 1);
    CHECK(s.vectors[0] == std::vector<Count>{1, 1, 1, 1});
    CHECK(s.constants[0] == 200);
  }
}

TEST_CASE("a token-producing transition leaves no semiflow") {
  ModelDocument doc;
  doc.places = {"A"};
  doc.transitions = {{"dup", 1.0, {{"A", 1}}, {{"A", 2}}}};
  const SpnModel m = validate_model(doc);
  const SemiflowBasis b = minimal_psemiflows(m);
  CHECK(b.empty());
  CHECK_FALSE(check_coverage(m, b));
  CHECK(classify_density_dependence(m, b).classification == Dependence::not_covered);
}

TEST_CASE("semiflows match brute force on small nets") {
  // weighted conversion 2A -> B, B -> 2A plus an independent cycle C <-> D
  ModelDocument doc;
  doc.places = {"A", "B", "C", "D"};
  doc.transitions = {{"join", 1.0, {{"A", 2}}, {{"B", 1}}},
                     {"split", 1.0, {{"B", 1}}, {{"A", 2}}},
                     {"cd", 1.0, {{"C", 1}}, {{"D", 1}}},
                     {"dc", 1.0, {{"D", 1}}, {{"C", 1}}}};
  doc.initial_marking = {{"A", 4}, {"C", 1}};
  const SpnModel m = validate_model(doc);
  const SemiflowBasis b = minimal_psemiflows(m);
  // ordered by support set: {A, B} before {C, D}
  CHECK(b.vectors == std::vector<std::vector<Count>>{{1, 2, 0, 0}, {0, 0, 1, 1}});
  CHECK(b.constants == std::vector<Count>{4, 1});
  auto sorted = b.vectors;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == brute_force_semiflows(m, 3));

  for (const auto& entry : catalog()) {
    if (entry.model.num_places() > 4) continue;
    auto sorted = minimal_psemiflows(entry.model).vectors;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == brute_force_semiflows(entry.model, 3));
  }
}

TEST_CASE("client-server has a server and a client semiflow") {
  const SpnModel cs = client_server();
  const SemiflowBasis b = minimal_psemiflows(cs);
  REQUIRE(b.size() == 2);
  std::vector<Count> constants = b.constants;
  std::sort(constants.begin(), constants.end());
  CHECK(constants == std::vector<Count>{120, 10000});
  const PlaceBounds pb = place_bounds(cs, b, BoundsMode::semiflow);
  CHECK(pb.max[*cs.place_index("Cwaiting")] == 10000);
  CHECK(pb.max[*cs.place_index("Slog")] == 120);
}

TEST_CASE("coverage and classification") {
  const SpnModel cyc = validate_model(cycle_doc());
  const SemiflowBasis b = minimal_psemiflows(cyc);
  CHECK(check_coverage(cyc, b));
  CHECK_FALSE(check_coverage(cyc, SemiflowBasis{}));
  const DependenceReport r = classify_density_dependence(cyc, b);
  CHECK(r.classification == Dependence::density_dependent);
  CHECK(r.covered);
  CHECK(r.nonunit_arcs.empty());
  CHECK(to_string(r.classification) == "density-dependent");

  ModelDocument doc = cycle_doc();
  doc.transitions[0].input = {{"A", 2}};
  doc.transitions[0].output = {{"B", 2}};
  const SpnModel heavy = validate_model(doc);
  const DependenceReport h = classify_density_dependence(heavy, minimal_psemiflows(heavy));
  CHECK(h.classification == Dependence::nearly_density_dependent);
  CHECK(h.nonunit_arcs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});

  const SpnModel s = sir(SirExperiment::exp1);
  CHECK(check_coverage(s, minimal_psemiflows(s)));
}

TEST_CASE("place bounds") {
  const SpnModel cyc = validate_model(cycle_doc());
  const SemiflowBasis b = minimal_psemiflows(cyc);
  const PlaceBounds semi = place_bounds(cyc, b, BoundsMode::semiflow);
  CHECK(semi.max == std::vector<Count>{100, 100});
  CHECK(semi.min == std::vector<Count>{0, 0});
  CHECK(semi.provenance[0] == BoundProvenance::semiflow);
  const PlaceBounds exact = place_bounds(cyc, b, BoundsMode::exact);
  CHECK(exact.max == semi.max);
  CHECK(exact.min == semi.min);
  CHECK(exact.provenance[1] == BoundProvenance::reachability);

  const SpnModel s = sir(SirExperiment::exp1);
  const PlaceBounds sb = place_bounds(s, minimal_psemiflows(s), BoundsMode::semiflow);
  CHECK(sb.max == std::vector<Count>{200, 200, 200, 200});
  CHECK(sb.min == std::vector<Count>{0, 0, 0, 0});
  CHECK_THROWS_AS(place_bounds(s, minimal_psemiflows(s), BoundsMode::exact, 1000), EngineError);

  CHECK_THROWS_AS(place_bounds(cyc, SemiflowBasis{}, BoundsMode::semiflow), EngineError);
}

TEST_CASE("property: every bundled net has orthogonal semiflows and bounds that contain the RS") {
  for (const auto& entry : catalog()) {
    CAPTURE(entry.name);
    const SpnModel& m = entry.model;
    const SemiflowBasis b = minimal_psemiflows(m);
    CHECK(check_coverage(m, b));
    CHECK(classify_density_dependence(m, b).classification != Dependence::not_covered);
    for (const auto& nu : b.vectors)
      for (std::size_t t = 0; t < m.num_transitions(); ++t) {
        Count s = 0;
        for (std::size_t p = 0; p < m.num_places(); ++p) s += nu[p] * m.incidence(p, t);
        CHECK(s == 0);
      }

    ReachabilityGraph rg;
    try {
      rg = build_reachability(m, 200'000);
    } catch (const EngineError&) {
      continue;
    }
    const PlaceBounds semi = place_bounds(m, b, BoundsMode::semiflow);
    const PlaceBounds exact = place_bounds(m, b, BoundsMode::exact, 200'000);
    for (std::size_t p = 0; p < m.num_places(); ++p) {
      CHECK(exact.min[p] >= 0);
      CHECK(semi.max[p] >= exact.max[p]);
      // all bundled nets are fully connected, so the two modes agree
      CHECK(semi.max[p] == exact.max[p]);
      CHECK(semi.min[p] == exact.min[p]);
    }
    for (std::size_t i = 0; i < rg.size(); ++i) {
      const auto st = rg.state(i);
      for (std::size_t k = 0; k < b.size(); ++k) {
        Count s = 0;
        for (std::size_t p = 0; p < m.num_places(); ++p) s += b.vectors[k][p] * st[p];
        CHECK(s == b.constants[k]);
      }
    }
  }
}

TEST_CASE("boundary split") {
  const SpnModel s = sir(SirExperiment::exp1);
  const PlaceBounds b = place_bounds(s, minimal_psemiflows(s), BoundsMode::semiflow);
  const std::size_t I = *s.place_index("I");

  const BoundarySplit at_i = boundary_split(FluidState({60.0, 70.0, 0.0, 70.0}), b, s);
  CHECK(at_i.star_places == std::vector<std::size_t>{I});
  for (const char* name : {"BecomeI", "BecomeR", "LeaveI", "ArriveI"})
    CHECK(contains(at_i.star_transitions, *s.transition_index(name)));
  for (const char* name : {"ArriveS", "LeaveS", "LeaveR"})
    CHECK(contains(at_i.interior_transitions, *s.transition_index(name)));

  const BoundarySplit inner = boundary_split(FluidState({50.0, 50.0, 50.0, 50.0}), b, s);
  CHECK(inner.star_places.empty());
  CHECK(inner.star_transitions.empty());
  CHECK(inner.interior_transitions.size() == s.num_transitions());
  CHECK(std::all_of(inner.theta.begin(), inner.theta.end(), [](Count c) { return c == 0; }));

  const SpnModel s2 = sir(SirExperiment::exp2);
  const BoundarySplit corner = boundary_split(FluidState::from(s2.initial_marking()), b, s2);
  CHECK(corner.star_places.size() == 4);  // Outside at MAX, the rest at MIN
  CHECK(corner.star_transitions.size() == s2.num_transitions());
  CHECK(corner.theta[*s2.transition_index("BecomeI")] == 2);  // S and I both empty
}

TEST_CASE("boundary tolerance and out-of-box states") {
  const SpnModel cyc = validate_model(cycle_doc());
  const PlaceBounds b = place_bounds(cyc, minimal_psemiflows(cyc), BoundsMode::semiflow);
  CHECK(at_bound(1e-8, 0, b));
  CHECK(at_bound(100.0 - 5e-8, 0, b));
  CHECK_FALSE(at_bound(1e-6, 0, b));
  CHECK_THROWS_AS(boundary_split(FluidState({-1.0, 101.0}), b, cyc), EngineError);
}

TEST_CASE("property: theta and the split agree, split is idempotent") {
  const SpnModel s = sir(SirExperiment::exp1);
  const PlaceBounds b = place_bounds(s, minimal_psemiflows(s), BoundsMode::semiflow);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (int k = 0; k < 500; ++k) {
    FluidState x({u(rng), u(rng), u(rng), u(rng)});
    for (auto& v : x.values)
      if (pick(rng) == 0) v = 0.0;
    const BoundarySplit a = boundary_split(x, b, s);
    const BoundarySplit again = boundary_split(x, b, s);
    CHECK(a.star_places == again.star_places);
    CHECK(a.star_transitions == again.star_transitions);
    CHECK(a.star_transitions.size() + a.interior_transitions.size() == s.num_transitions());
    for (std::size_t t = 0; t < s.num_transitions(); ++t) {
      Count theta = 0;
      for (std::size_t p = 0; p < 4; ++p)
        if (x[p] == 0.0) theta += std::abs(s.incidence(p, t));
      CHECK(a.theta[t] == theta);
      CHECK((a.theta[t] == 0) == contains(a.interior_transitions, t));
    }
  }
}

}

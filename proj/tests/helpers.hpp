#pragma once

#include <random>
#include <string>
#include <vector>

#include "spnjd/spn.hpp"

namespace spnjd::testing {

inline ModelDocument cycle_doc(Count a0 = 100, double r1 = 1.0, double r2 = 2.0) {
  ModelDocument doc;
  doc.places = {"A", "B"};
  doc.transitions = {{"t1", r1, {{"A", 1}}, {{"B", 1}}}, {"t2", r2, {{"B", 1}}, {{"A", 1}}}};
  doc.initial_marking = {{"A", a0}};
  return doc;
}

// Deterministic source for exercising the update formulas by hand.
struct ScriptedSource {
  std::vector<double> normals;
  std::size_t next = 0;
  double normal() { return next < normals.size() ? normals[next++] : 0.0; }
  double exponential(double) { return 1e300; }
  double uniform() { return 0.0; }
};

// No noise and no jumps: reduces the jump-diffusion scheme to explicit Euler.
struct SilentSource {
  double normal() { return 0.0; }
  double exponential(double) { return std::numeric_limits<double>::infinity(); }
  double uniform() { return 0.0; }
};

inline Marking random_marking(std::mt19937_64& rng, std::size_t n, Count hi) {
  std::uniform_int_distribution<Count> d(0, hi);
  Marking m{std::vector<Count>(n)};
  for (auto& c : m.counts) c = d(rng);
  return m;
}

}  // namespace spnjd::testing

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "spnjd/spn.hpp"

namespace spnjd {

/// Probability mass over integer token counts. Support is sorted ascending
/// and holds only values with positive mass.
struct EmpiricalPmf {
  std::vector<Count> support;
  std::vector<double> mass;
  std::size_t sample_count = 0;

  double at(Count value) const;
  double mean() const;
  /// Builds from (value, mass) pairs; merges duplicates, drops zeros, sorts.
  static EmpiricalPmf from_pairs(std::vector<std::pair<Count, double>> pairs, std::size_t samples = 0);
};

struct MeanCI {
  double mean = 0.0;
  double halfwidth = 0.0;
  double level = 0.95;
  std::size_t n = 0;

  double lower() const { return mean - halfwidth; }
  double upper() const { return mean + halfwidth; }
  bool overlaps(const MeanCI& other) const { return lower() <= other.upper() && other.lower() <= upper(); }
};

/// Rounds each sample to the nearest integer, clamps into [lo, hi] and
/// counts. Throws std::invalid_argument on an empty sample set.
EmpiricalPmf histogram(std::span<const double> samples, Count lo, Count hi);

/// Two-sided normal quantile for the given confidence level.
double normal_quantile(double level);

/// Sample mean with z(level) * s / sqrt(n) halfwidth. Requires n >= 2.
MeanCI mean_ci(std::span<const double> samples, double level = 0.95);

/// Half the L1 distance over the union support.
double total_variation(const EmpiricalPmf& p, const EmpiricalPmf& q);

struct Mode {
  Count location;
  double mass;
  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Local maxima of the window-3 moving average of the pmf (densified over
/// [min support, max support]). A plateau reports its leftmost point once.
/// Peaks below `min_mass` are dropped; among peaks closer than
/// `min_separation`, the heavier one is kept (leftmost on ties). Result is
/// sorted by location.
std::vector<Mode> find_modes(const EmpiricalPmf& pmf, Count min_separation, double min_mass);

/// Merges consecutive values into bins of `width`. The result's support is
/// in bin-index units (floor(value / width)), so find_modes can run on it
/// directly; multiply locations back by `width` to get token counts.
EmpiricalPmf coarsen(const EmpiricalPmf& pmf, Count width);

}  // namespace spnjd

#include "spnjd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace spnjd {

double EmpiricalPmf::at(Count value) const {
  auto it = std::lower_bound(support.begin(), support.end(), value);
  if (it == support.end() || *it != value) return 0.0;
  return mass[static_cast<std::size_t>(it - support.begin())];
}

double EmpiricalPmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += static_cast<double>(support[i]) * mass[i];
  return m;
}

EmpiricalPmf EmpiricalPmf::from_pairs(std::vector<std::pair<Count, double>> pairs, std::size_t samples) {
  std::map<Count, double> merged;
  for (const auto& [v, w] : pairs) merged[v] += w;
  EmpiricalPmf pmf;
  pmf.sample_count = samples;
  for (const auto& [v, w] : merged) {
    if (w <= 0.0) continue;
    pmf.support.push_back(v);
    pmf.mass.push_back(w);
  }
  return pmf;
}

EmpiricalPmf histogram(std::span<const double> samples, Count lo, Count hi) {
  if (samples.empty()) throw std::invalid_argument("histogram of an empty sample set");
  std::map<Count, std::size_t> counts;
  for (double x : samples) {
    Count k = static_cast<Count>(std::llround(x));
    counts[std::clamp(k, lo, hi)] += 1;
  }
  EmpiricalPmf pmf;
  pmf.sample_count = samples.size();
  const double n = static_cast<double>(samples.size());
  for (const auto& [v, c] : counts) {
    pmf.support.push_back(v);
    pmf.mass.push_back(static_cast<double>(c) / n);
  }
  return pmf;
}

double normal_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0,1)");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + level / 2.0);
}

MeanCI mean_ci(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw std::invalid_argument("mean_ci needs at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double s = std::sqrt(ss / (n - 1.0));
  return MeanCI{mean, normal_quantile(level) * s / std::sqrt(n), level, samples.size()};
}

double total_variation(const EmpiricalPmf& p, const EmpiricalPmf& q) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < p.support.size() || j < q.support.size()) {
    if (j == q.support.size() || (i < p.support.size() && p.support[i] < q.support[j])) {
      sum += p.mass[i++];
    } else if (i == p.support.size() || q.support[j] < p.support[i]) {
      sum += q.mass[j++];
    } else {
      sum += std::abs(p.mass[i++] - q.mass[j++]);
    }
  }
  return std::min(1.0, 0.5 * sum);
}

std::vector<Mode> find_modes(const EmpiricalPmf& pmf, Count min_separation, double min_mass) {
  if (pmf.support.empty()) return {};
  const Count lo = pmf.support.front(), hi = pmf.support.back();
  const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> dense(n, 0.0);
  for (std::size_t i = 0; i < pmf.support.size(); ++i) dense[static_cast<std::size_t>(pmf.support[i] - lo)] = pmf.mass[i];

  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = dense[i];
    int w = 1;
    if (i > 0) s += dense[i - 1], ++w;
    if (i + 1 < n) s += dense[i + 1], ++w;
    smooth[i] = s / w;
  }

  std::vector<Mode> peaks;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && smooth[j + 1] == smooth[i]) ++j;
    const double left = i > 0 ? smooth[i - 1] : neg_inf;
    const double right = j + 1 < n ? smooth[j + 1] : neg_inf;
    if (left < smooth[i] && right < smooth[i] && smooth[i] >= min_mass && smooth[i] > 0.0)
      peaks.push_back({lo + static_cast<Count>(i), smooth[i]});
    i = j + 1;
  }

  std::stable_sort(peaks.begin(), peaks.end(), [](const Mode& a, const Mode& b) { return a.mass > b.mass; });
  std::vector<Mode> kept;
  for (const Mode& m : peaks) {
    bool far = true;
    for (const Mode& k : kept) far &= std::abs(m.location - k.location) >= min_separation;
    if (far) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end(), [](const Mode& a, const Mode& b) { return a.location < b.location; });
  return kept;
}

EmpiricalPmf coarsen(const EmpiricalPmf& pmf, Count width) {
  if (width < 1) throw std::invalid_argument("bin width must be >= 1");
  std::vector<std::pair<Count, double>> pairs;
  for (std::size_t i = 0; i < pmf.support.size(); ++i) {
    const Count v = pmf.support[i];
    const Count bin = v >= 0 ? v / width : -((-v + width - 1) / width);
    pairs.emplace_back(bin, pmf.mass[i]);
  }
  return EmpiricalPmf::from_pairs(std::move(pairs), pmf.sample_count);
}

}  // namespace spnjd

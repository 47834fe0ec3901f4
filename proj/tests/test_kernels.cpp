#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spnjd/catalog.hpp"
#include "spnjd/exact.hpp"
#include "spnjd/kernels.hpp"

using namespace spnjd;
using namespace spnjd::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

struct RandomCsr {
  std::vector<std::uint64_t> row_ptr{0};
  std::vector<std::int32_t> cols;
  std::vector<double> values;
  std::vector<double> diag;
  CsrView view() const { return {row_ptr, cols, values, diag}; }
};

RandomCsr random_csr(std::mt19937_64& rng, std::size_t n) {
  RandomCsr m;
  std::uniform_int_distribution<int> nnz(0, 11);
  std::uniform_int_distribution<std::int32_t> col(0, static_cast<std::int32_t>(n) - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (int k = nnz(rng); k > 0; --k) {
      m.cols.push_back(col(rng));
      m.values.push_back(u(rng));
    }
    m.row_ptr.push_back(m.cols.size());
    m.diag.push_back(u(rng));
  }
  return m;
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  if (supported(Isa::avx2)) out.push_back(Isa::avx2);
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference") {
  const KernelTable& s = table(Isa::scalar);
  std::vector<double> x{1, 2, 3}, y{1, 1, 1};
  s.axpy(2.0, x.data(), y.data(), 3);
  CHECK(y == std::vector<double>{3, 5, 7});
  s.scale(0.5, y.data(), 3);
  CHECK(y == std::vector<double>{1.5, 2.5, 3.5});
  CHECK(s.sum(y.data(), 3) == 7.5);
  CHECK(s.sum(y.data(), 0) == 0.0);

  // [[2, 1], [0, 3]] as diag + off-diagonal
  const std::vector<std::uint64_t> rp{0, 1, 1};
  const std::vector<std::int32_t> cols{1};
  const std::vector<double> vals{1.0}, diag{2.0, 3.0};
  std::vector<double> out(2);
  s.csr_matvec(CsrView{rp, cols, vals, diag}, std::vector<double>{1.0, 4.0}.data(), out.data());
  CHECK(out == std::vector<double>{6.0, 12.0});
}

TEST_CASE("vector variants agree with the scalar reference") {
  std::mt19937_64 rng(31);
  const KernelTable& ref = table(Isa::scalar);
  for (Isa isa : vector_isas()) {
    CAPTURE(to_string(isa));
    const KernelTable& vec = table(isa);
    CHECK(vec.isa == isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 31u, 64u, 1001u}) {
      CAPTURE(n);
      const auto x = random_vector(rng, n);
      auto y1 = random_vector(rng, n);
      auto y2 = y1;
      ref.axpy(0.37, x.data(), y1.data(), n);
      vec.axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-15).scale(1.0));

      ref.scale(-1.25, y1.data(), n);
      vec.scale(-1.25, y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-15).scale(1.0));

      CHECK(vec.sum(x.data(), n) == doctest::Approx(ref.sum(x.data(), n)).epsilon(1e-13).scale(1.0));

      const RandomCsr m = random_csr(rng, std::max<std::size_t>(n, 1));
      const auto v = random_vector(rng, m.diag.size());
      std::vector<double> o1(m.diag.size()), o2(m.diag.size());
      ref.csr_matvec(m.view(), v.data(), o1.data());
      vec.csr_matvec(m.view(), v.data(), o2.data());
      for (std::size_t i = 0; i < o1.size(); ++i) CHECK(o2[i] == doctest::Approx(o1[i]).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("uniformization gives the same answer on every kernel set") {
  // The active table is fixed per process, so compare one DTMC step chain by hand.
  const ReachabilityGraph rg = build_reachability(cycle(50), 1000);
  const StateDistribution d = transient_uniformization(rg, 0.8);
  double total = 0.0;
  for (double p : d.probabilities) {
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expected_tokens(d, rg, 0) == doctest::Approx(50.0 * (2.0 / 3 + std::exp(-2.4) / 3)).epsilon(1e-10));
}

TEST_CASE("unsupported tables are refused") {
  if (!supported(Isa::avx2)) CHECK_THROWS_AS(table(Isa::avx2), std::invalid_argument);
  CHECK(supported(Isa::scalar));
  CHECK((active().isa == Isa::scalar || supported(active().isa)));
}

}

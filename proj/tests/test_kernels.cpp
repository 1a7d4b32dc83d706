#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "simharm/kernels.hpp"
#include "simharm/rng.hpp"

using namespace simharm;

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) / scale;
}

}  // namespace

TEST_CASE("corner product sum matches hand-computed values") {
  const std::vector<double> vals{2.0, 3.0, 5.0};
  const std::vector<std::int32_t> ea{0, 1, 2};
  const std::vector<std::int32_t> eb{1, 2, 0};
  CHECK(kernels::corner_product_sum_scalar(vals.data(), ea.data(), eb.data(), 3) ==
        doctest::Approx(31.0).epsilon(1e-15));
  CHECK(kernels::corner_product_sum(vals.data(), ea.data(), eb.data(), 3) ==
        doctest::Approx(31.0).epsilon(1e-15));
}

TEST_CASE("corner energy sum: hand value and zero-length convention") {
  {
    const std::vector<double> l{1.0, 2.0};
    const std::vector<double> L{3.0, 10.0};
    const std::vector<std::int32_t> ea{0}, eb{1};
    // stretches 3 and 5: 0.5*(9+25)*1*2 = 34
    CHECK(kernels::corner_energy_sum_scalar(l.data(), L.data(), ea.data(), eb.data(), 1) ==
          doctest::Approx(34.0).epsilon(1e-15));
    CHECK(kernels::corner_energy_sum(l.data(), L.data(), ea.data(), eb.data(), 1) ==
          doctest::Approx(34.0).epsilon(1e-15));
  }
  {
    // A corner with a zero-length edge contributes exactly 0, no matter the
    // other stretch.
    const std::vector<double> l{0.0, 2.0};
    const std::vector<double> L{0.0, 10.0};
    const std::vector<std::int32_t> ea{0, 1}, eb{1, 0};
    CHECK(kernels::corner_energy_sum_scalar(l.data(), L.data(), ea.data(), eb.data(), 2) ==
          0.0);
    CHECK(kernels::corner_energy_sum(l.data(), L.data(), ea.data(), eb.data(), 2) == 0.0);
  }
}

TEST_CASE("weighted square sum: hand value") {
  const std::vector<double> w{2.0, 3.0};
  const std::vector<double> x{3.0, 4.0};
  CHECK(kernels::weighted_square_sum_scalar(w.data(), x.data(), 2) == 66.0);
  CHECK(kernels::weighted_square_sum(w.data(), x.data(), 2) == 66.0);
}

TEST_CASE("unit-stretch energy is bitwise the corner product sum") {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 3u, 4u, 6u, 9u, 257u}) {
    const std::size_t vals_n = std::max<std::size_t>(4, n / 2);
    std::vector<double> l(vals_n);
    for (double& v : l) v = rng.unit() < 0.15 ? 0.0 : rng.uniform(0.01, 10.0);
    std::vector<std::int32_t> ea(n), eb(n);
    for (std::size_t i = 0; i < n; ++i) {
      ea[i] = static_cast<std::int32_t>(rng.index(vals_n));
      eb[i] = static_cast<std::int32_t>(rng.index(vals_n));
    }
    CHECK(kernels::corner_energy_sum(l.data(), l.data(), ea.data(), eb.data(), n) ==
          kernels::corner_product_sum(l.data(), ea.data(), eb.data(), n));
    CHECK(kernels::corner_energy_sum_scalar(l.data(), l.data(), ea.data(), eb.data(), n) ==
          kernels::corner_product_sum_scalar(l.data(), ea.data(), eb.data(), n));
  }
}

TEST_CASE("dispatched kernels agree with scalar reference on random data") {
  const std::string backend = kernels::active_backend();
  CHECK((backend == "avx2" || backend == "scalar"));
  INFO("active backend: ", backend);

  Rng rng(20260814);
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 33u, 1000u, 10001u}) {
    const std::size_t vals_n = std::max<std::size_t>(4, n / 2);
    std::vector<double> l(vals_n), L(vals_n), w(n), x(n);
    for (std::size_t i = 0; i < vals_n; ++i) {
      l[i] = rng.uniform(0.1, 10.0);
      L[i] = rng.uniform(0.0, 10.0);
      if (rng.unit() < 0.1) {
        l[i] = 0.0;
        L[i] = 0.0;
      }
    }
    std::vector<std::int32_t> ea(n), eb(n);
    for (std::size_t i = 0; i < n; ++i) {
      ea[i] = static_cast<std::int32_t>(rng.index(vals_n));
      eb[i] = static_cast<std::int32_t>(rng.index(vals_n));
      w[i] = rng.uniform(0.0, 5.0);
      x[i] = rng.uniform(-4.0, 4.0);
    }
    CHECK(rel_diff(kernels::corner_product_sum(l.data(), ea.data(), eb.data(), n),
                   kernels::corner_product_sum_scalar(l.data(), ea.data(), eb.data(), n)) <
          1e-12);
    CHECK(rel_diff(
              kernels::corner_energy_sum(l.data(), L.data(), ea.data(), eb.data(), n),
              kernels::corner_energy_sum_scalar(l.data(), L.data(), ea.data(), eb.data(),
                                                n)) < 1e-12);
    CHECK(rel_diff(kernels::weighted_square_sum(w.data(), x.data(), n),
                   kernels::weighted_square_sum_scalar(w.data(), x.data(), n)) < 1e-12);
  }
}

#include "simharm/kernels.hpp"

#include <cstdlib>
#include <mutex>

namespace simharm::kernels {

double corner_product_sum_scalar(const double* vals, const std::int32_t* ea,
                                 const std::int32_t* eb, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += vals[ea[k]] * vals[eb[k]];
  return acc;
}

double corner_energy_sum_scalar(const double* l, const double* L,
                                const std::int32_t* ea, const std::int32_t* eb,
                                std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double la = l[ea[k]], lb = l[eb[k]];
    if (la == 0.0 || lb == 0.0) continue;
    const double sa = L[ea[k]] / la, sb = L[eb[k]] / lb;
    acc += 0.5 * (sa * sa + sb * sb) * la * lb;
  }
  return acc;
}

double weighted_square_sum_scalar(const double* w, const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += w[k] * x[k] * x[k];
  return acc;
}

#if defined(SIMHARM_HAVE_AVX2_TU)
double corner_product_sum_avx2(const double*, const std::int32_t*, const std::int32_t*,
                               std::size_t);
double corner_energy_sum_avx2(const double*, const double*, const std::int32_t*,
                              const std::int32_t*, std::size_t);
double weighted_square_sum_avx2(const double*, const double*, std::size_t);
#endif

namespace {

using CornerProductFn = double (*)(const double*, const std::int32_t*,
                                   const std::int32_t*, std::size_t);
using CornerEnergyFn = double (*)(const double*, const double*, const std::int32_t*,
                                  const std::int32_t*, std::size_t);
using WeightedSquareFn = double (*)(const double*, const double*, std::size_t);

struct Dispatch {
  CornerProductFn corner_product = corner_product_sum_scalar;
  CornerEnergyFn corner_energy = corner_energy_sum_scalar;
  WeightedSquareFn weighted_square = weighted_square_sum_scalar;
  const char* name = "scalar";
};

const Dispatch& dispatch() {
  static Dispatch d;
  static std::once_flag once;
  std::call_once(once, [] {
#if defined(SIMHARM_HAVE_AVX2_TU)
    const char* force = std::getenv("SIMHARM_FORCE_SCALAR");
    if ((force == nullptr || force[0] == '0') && __builtin_cpu_supports("avx2")) {
      d.corner_product = corner_product_sum_avx2;
      d.corner_energy = corner_energy_sum_avx2;
      d.weighted_square = weighted_square_sum_avx2;
      d.name = "avx2";
    }
#endif
  });
  return d;
}

}  // namespace

double corner_product_sum(const double* vals, const std::int32_t* ea,
                          const std::int32_t* eb, std::size_t n) {
  return dispatch().corner_product(vals, ea, eb, n);
}

double corner_energy_sum(const double* l, const double* L, const std::int32_t* ea,
                         const std::int32_t* eb, std::size_t n) {
  return dispatch().corner_energy(l, L, ea, eb, n);
}

double weighted_square_sum(const double* w, const double* x, std::size_t n) {
  return dispatch().weighted_square(w, x, n);
}

const char* active_backend() { return dispatch().name; }

}  // namespace simharm::kernels

#pragma once

#include <cstddef>
#include <cstdint>

// Flat reduction kernels used by the area/energy evaluators. Each kernel has a
// scalar reference implementation and, on x86-64 CPUs with AVX2, a vectorized
// variant; the dispatched entry points pick the variant once at startup.
// Index arrays point into edge-length buffers so callers can reuse the corner
// tables owned by the complex without gathering into temporaries.

namespace simharm::kernels {

// sum over k of vals[ea[k]] * vals[eb[k]]
double corner_product_sum_scalar(const double* vals, const std::int32_t* ea,
                                 const std::int32_t* eb, std::size_t n);
double corner_product_sum(const double* vals, const std::int32_t* ea,
                          const std::int32_t* eb, std::size_t n);

// sum over k of 0.5 * (sa^2 + sb^2) * l[ea[k]] * l[eb[k]] with s = L/l.
// A corner with l[ea[k]] == 0 or l[eb[k]] == 0 contributes exactly 0; callers
// must screen the infinite-energy case (l == 0 with L > 0) beforehand.
// With L == l elementwise (unit stretch) the result is bitwise equal to
// corner_product_sum(l, ...); both backends keep the accumulation aligned.
double corner_energy_sum_scalar(const double* l, const double* L,
                                const std::int32_t* ea, const std::int32_t* eb,
                                std::size_t n);
double corner_energy_sum(const double* l, const double* L, const std::int32_t* ea,
                         const std::int32_t* eb, std::size_t n);

// sum over k of w[k] * x[k]^2
double weighted_square_sum_scalar(const double* w, const double* x, std::size_t n);
double weighted_square_sum(const double* w, const double* x, std::size_t n);

// "avx2" or "scalar"; fixed for the lifetime of the process.
const char* active_backend();

}  // namespace simharm::kernels

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

// AVX2 variants of the reduction kernels. Terms are gathered through 32-bit
// index vectors; zero-length corners are masked with a bitwise AND so the
// division artifacts of dead lanes never reach the accumulator. Remainders go
// through masked gathers instead of scalar code so corner_product_sum and
// corner_energy_sum accumulate lane for lane in the same order: with L == l
// every live corner reduces to fma(l_a, l_b, acc) in both kernels, which keeps
// the unit-stretch energy bitwise equal to the area.

namespace simharm::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// All-ones in the first r lanes; r in [1, 3].
inline __m256d tail_mask(std::size_t r) {
  const __m256i lane = _mm256_setr_epi64x(0, 1, 2, 3);
  return _mm256_castsi256_pd(
      _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(r)), lane));
}

inline __m128i load_tail_indices(const std::int32_t* idx, std::size_t r) {
  alignas(16) std::int32_t pad[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < r; ++i) pad[i] = idx[i];
  return _mm_load_si128(reinterpret_cast<const __m128i*>(pad));
}

}  // namespace

double corner_product_sum_avx2(const double* vals, const std::int32_t* ea,
                               const std::int32_t* eb, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m128i ia = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ea + k));
    const __m128i ib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(eb + k));
    const __m256d a = _mm256_i32gather_pd(vals, ia, 8);
    const __m256d b = _mm256_i32gather_pd(vals, ib, 8);
    acc = _mm256_fmadd_pd(a, b, acc);
  }
  if (k < n) {
    const __m256d m = tail_mask(n - k);
    const __m128i ia = load_tail_indices(ea + k, n - k);
    const __m128i ib = load_tail_indices(eb + k, n - k);
    const __m256d a = _mm256_mask_i32gather_pd(zero, vals, ia, m, 8);
    const __m256d b = _mm256_mask_i32gather_pd(zero, vals, ib, m, 8);
    acc = _mm256_fmadd_pd(a, b, acc);
  }
  return hsum(acc);
}

namespace {

inline __m256d energy_step(__m256d acc, __m256d la, __m256d lb, __m256d La,
                           __m256d Lb) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d sa = _mm256_div_pd(La, la);
  const __m256d sb = _mm256_div_pd(Lb, lb);
  const __m256d s2 = _mm256_fmadd_pd(sa, sa, _mm256_mul_pd(sb, sb));
  __m256d left = _mm256_mul_pd(_mm256_mul_pd(half, s2), la);
  const __m256d live = _mm256_and_pd(_mm256_cmp_pd(la, zero, _CMP_NEQ_OQ),
                                     _mm256_cmp_pd(lb, zero, _CMP_NEQ_OQ));
  left = _mm256_and_pd(left, live);
  return _mm256_fmadd_pd(left, lb, acc);
}

}  // namespace

double corner_energy_sum_avx2(const double* l, const double* L, const std::int32_t* ea,
                              const std::int32_t* eb, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m128i ia = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ea + k));
    const __m128i ib = _mm_loadu_si128(reinterpret_cast<const __m128i*>(eb + k));
    acc = energy_step(acc, _mm256_i32gather_pd(l, ia, 8), _mm256_i32gather_pd(l, ib, 8),
                      _mm256_i32gather_pd(L, ia, 8), _mm256_i32gather_pd(L, ib, 8));
  }
  if (k < n) {
    const __m256d m = tail_mask(n - k);
    const __m128i ia = load_tail_indices(ea + k, n - k);
    const __m128i ib = load_tail_indices(eb + k, n - k);
    acc = energy_step(acc, _mm256_mask_i32gather_pd(zero, l, ia, m, 8),
                      _mm256_mask_i32gather_pd(zero, l, ib, m, 8),
                      _mm256_mask_i32gather_pd(zero, L, ia, m, 8),
                      _mm256_mask_i32gather_pd(zero, L, ib, m, 8));
  }
  return hsum(acc);
}

double weighted_square_sum_avx2(const double* w, const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d wv = _mm256_loadu_pd(w + k);
    const __m256d xv = _mm256_loadu_pd(x + k);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(wv, xv), xv, acc);
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += w[k] * x[k] * x[k];
  return hsum(acc) + tail;
}

}  // namespace simharm::kernels

// AVX2/FMA variants of the node-loop kernels. Compiled with -mavx2 -mfma in a
// separate translation unit; only reached after the runtime CPUID check.

#include "becload/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace becload::kernels {

#if defined(__AVX2__)

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

void weighted_gram_avx2(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& wts,
                        std::complex<double>* C, std::size_t ldc, std::size_t a_begin,
                        std::size_t a_end, bool upper_only) {
  const std::size_t n = A.stride;  // multiple of 4, padding is zero weighted
  const double* w = wts.data();
  for (std::size_t a = a_begin; a < a_end; ++a) {
    const double* ar = A.col_re(a);
    const double* ai = A.col_im(a);
    const std::size_t b0 = upper_only ? a : 0;
    for (std::size_t b = b0; b < B.cols; ++b) {
      const double* br = B.col_re(b);
      const double* bi = B.col_im(b);
      __m256d acc_re = _mm256_setzero_pd();
      __m256d acc_im = _mm256_setzero_pd();
      for (std::size_t k = 0; k < n; k += 4) {
        const __m256d vw = _mm256_loadu_pd(w + k);
        const __m256d var = _mm256_loadu_pd(ar + k);
        const __m256d vai = _mm256_loadu_pd(ai + k);
        const __m256d vbr = _mm256_loadu_pd(br + k);
        const __m256d vbi = _mm256_loadu_pd(bi + k);
        // conj(A)*B: re = ar*br + ai*bi, im = ar*bi - ai*br
        __m256d re = _mm256_fmadd_pd(vai, vbi, _mm256_mul_pd(var, vbr));
        __m256d im = _mm256_fmsub_pd(var, vbi, _mm256_mul_pd(vai, vbr));
        acc_re = _mm256_fmadd_pd(vw, re, acc_re);
        acc_im = _mm256_fmadd_pd(vw, im, acc_im);
      }
      C[a * ldc + b] += std::complex<double>(hsum(acc_re), hsum(acc_im));
    }
  }
}

void axpy_real_avx2(std::complex<double>* dst, const std::complex<double>* src, double s,
                    std::size_t n) {
  double* d = reinterpret_cast<double*>(dst);
  const double* x = reinterpret_cast<const double*>(src);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  const std::size_t n2 = 2 * n;
  for (; i + 4 <= n2; i += 4) {
    __m256d vd = _mm256_loadu_pd(d + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(d + i, _mm256_fmadd_pd(vs, vx, vd));
  }
  for (; i < n2; ++i) d[i] += s * x[i];
}

#else

void weighted_gram_avx2(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& w,
                        std::complex<double>* C, std::size_t ldc, std::size_t a_begin,
                        std::size_t a_end, bool upper_only) {
  weighted_gram_scalar(A, B, w, C, ldc, a_begin, a_end, upper_only);
}

void axpy_real_avx2(std::complex<double>* dst, const std::complex<double>* src, double s,
                    std::size_t n) {
  axpy_real_scalar(dst, src, s, n);
}

#endif

}  // namespace becload::kernels

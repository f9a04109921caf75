#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace becload::kernels {

// Complex data laid out for node-wise vectorization: one contiguous column of
// length `stride` (zero padded past `rows`) per logical column, split into
// real and imaginary planes.
struct NodeMatrix {
  std::size_t rows = 0;    // active node count
  std::size_t cols = 0;
  std::size_t stride = 0;  // padded row count, multiple of 4
  std::vector<double> re;
  std::vector<double> im;

  void resize(std::size_t r, std::size_t c);
  void set(std::size_t w, std::size_t col, std::complex<double> v) {
    re[col * stride + w] = v.real();
    im[col * stride + w] = v.imag();
  }
  std::complex<double> get(std::size_t w, std::size_t col) const {
    return {re[col * stride + w], im[col * stride + w]};
  }
  const double* col_re(std::size_t c) const { return re.data() + c * stride; }
  const double* col_im(std::size_t c) const { return im.data() + c * stride; }
};

// Weight vector padded to the same stride (padding entries are zero, so the
// vector loops never need a scalar tail).
struct PaddedWeights {
  std::size_t rows = 0;
  std::size_t stride = 0;
  std::vector<double> w;

  void assign(const std::vector<double>& weights);
  const double* data() const { return w.data(); }
};

enum class Backend { scalar, avx2 };

Backend detect_best();
Backend active();
void set_active(Backend b);      // tests force the scalar reference path
std::string backend_name(Backend b);

// C[a*ldc + b] += sum_w w[w] * conj(A[w,a]) * B[w,b]   for all a in [0,na), b in [0,nb)
// A and B must share rows/stride with the weight vector.
void weighted_gram(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& w,
                   std::complex<double>* C, std::size_t ldc);

// Hermitian case (A == B): fills the upper triangle a <= b only.
void weighted_gram_upper(const NodeMatrix& A, const PaddedWeights& w, std::complex<double>* C,
                         std::size_t ldc);

// Restriction to rows a in [a_begin, a_end) so builders can parallelize over
// disjoint output slices.
void weighted_gram_range(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& w,
                         std::complex<double>* C, std::size_t ldc, std::size_t a_begin,
                         std::size_t a_end, bool upper_only);

// dst[i] += s * src[i]
void axpy_real(std::complex<double>* dst, const std::complex<double>* src, double s,
               std::size_t n);

// Explicit-backend entry points (exposed for equivalence tests).
void weighted_gram_scalar(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& w,
                          std::complex<double>* C, std::size_t ldc, std::size_t a_begin,
                          std::size_t a_end, bool upper_only);
void weighted_gram_avx2(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& w,
                        std::complex<double>* C, std::size_t ldc, std::size_t a_begin,
                        std::size_t a_end, bool upper_only);
void axpy_real_scalar(std::complex<double>* dst, const std::complex<double>* src, double s,
                      std::size_t n);
void axpy_real_avx2(std::complex<double>* dst, const std::complex<double>* src, double s,
                    std::size_t n);

}  // namespace becload::kernels

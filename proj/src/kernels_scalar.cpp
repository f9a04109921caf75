#include "becload/kernels.hpp"

namespace becload::kernels {

void NodeMatrix::resize(std::size_t r, std::size_t c) {
  rows = r;
  cols = c;
  stride = (r + 3) & ~std::size_t{3};
  if (stride == 0) stride = 4;
  re.assign(stride * c, 0.0);
  im.assign(stride * c, 0.0);
}

void PaddedWeights::assign(const std::vector<double>& weights) {
  rows = weights.size();
  stride = (rows + 3) & ~std::size_t{3};
  if (stride == 0) stride = 4;
  w.assign(stride, 0.0);
  for (std::size_t i = 0; i < rows; ++i) w[i] = weights[i];
}

void weighted_gram_scalar(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& wts,
                          std::complex<double>* C, std::size_t ldc, std::size_t a_begin,
                          std::size_t a_end, bool upper_only) {
  const std::size_t n = A.stride;
  const double* w = wts.data();
  for (std::size_t a = a_begin; a < a_end; ++a) {
    const double* ar = A.col_re(a);
    const double* ai = A.col_im(a);
    const std::size_t b0 = upper_only ? a : 0;
    for (std::size_t b = b0; b < B.cols; ++b) {
      const double* br = B.col_re(b);
      const double* bi = B.col_im(b);
      double cre = 0.0, cim = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        // conj(A) * B
        cre += w[k] * (ar[k] * br[k] + ai[k] * bi[k]);
        cim += w[k] * (ar[k] * bi[k] - ai[k] * br[k]);
      }
      C[a * ldc + b] += std::complex<double>(cre, cim);
    }
  }
}

void axpy_real_scalar(std::complex<double>* dst, const std::complex<double>* src, double s,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += s * src[i];
}

}  // namespace becload::kernels

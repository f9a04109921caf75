#include <atomic>
#include <cstdlib>

#include "becload/kernels.hpp"

namespace becload::kernels {

namespace {

Backend detect_from_cpu() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::avx2;
#endif
  return Backend::scalar;
}

Backend initial_backend() {
  if (const char* env = std::getenv("BECLOAD_KERNEL")) {
    std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2") return Backend::avx2;
  }
  return detect_from_cpu();
}

std::atomic<Backend> g_backend{initial_backend()};

}  // namespace

Backend detect_best() { return detect_from_cpu(); }

Backend active() { return g_backend.load(std::memory_order_relaxed); }

void set_active(Backend b) { g_backend.store(b, std::memory_order_relaxed); }

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void weighted_gram(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& w,
                   std::complex<double>* C, std::size_t ldc) {
  weighted_gram_range(A, B, w, C, ldc, 0, A.cols, false);
}

void weighted_gram_upper(const NodeMatrix& A, const PaddedWeights& w, std::complex<double>* C,
                         std::size_t ldc) {
  weighted_gram_range(A, A, w, C, ldc, 0, A.cols, true);
}

void weighted_gram_range(const NodeMatrix& A, const NodeMatrix& B, const PaddedWeights& w,
                         std::complex<double>* C, std::size_t ldc, std::size_t a_begin,
                         std::size_t a_end, bool upper_only) {
  if (active() == Backend::avx2)
    weighted_gram_avx2(A, B, w, C, ldc, a_begin, a_end, upper_only);
  else
    weighted_gram_scalar(A, B, w, C, ldc, a_begin, a_end, upper_only);
}

void axpy_real(std::complex<double>* dst, const std::complex<double>* src, double s,
               std::size_t n) {
  if (active() == Backend::avx2)
    axpy_real_avx2(dst, src, s, n);
  else
    axpy_real_scalar(dst, src, s, n);
}

}  // namespace becload::kernels

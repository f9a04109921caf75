#include <doctest.h>

#include <complex>
#include <vector>

#include "becload/kernels.hpp"
#include "becload/rng.hpp"

using namespace becload;
using kernels::NodeMatrix;
using kernels::PaddedWeights;

namespace {

NodeMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  NodeMatrix m;
  m.resize(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r)
      m.set(r, c, {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0});
  return m;
}

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = rng.uniform();
  return w;
}

}  // namespace

TEST_CASE("scalar gram matches a direct triple loop") {
  Rng rng(7);
  const std::size_t rows = 37, na = 5, nb = 6;
  const NodeMatrix a = random_matrix(rng, rows, na);
  const NodeMatrix b = random_matrix(rng, rows, nb);
  PaddedWeights w;
  w.assign(random_weights(rng, rows));

  std::vector<std::complex<double>> c(na * nb, {0, 0});
  kernels::weighted_gram_scalar(a, b, w, c.data(), nb, 0, na, false);

  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      std::complex<double> ref(0, 0);
      for (std::size_t k = 0; k < rows; ++k)
        ref += w.w[k] * std::conj(a.get(k, i)) * b.get(k, j);
      CHECK(std::abs(c[i * nb + j] - ref) < 1e-14);
    }
}

TEST_CASE("avx2 gram is equivalent to the scalar reference") {
  if (kernels::detect_best() != kernels::Backend::avx2) {
    MESSAGE("avx2 unavailable on this host, dispatch equivalence reduced to scalar==scalar");
  }
  Rng rng(99);
  for (const auto [rows, na, nb] :
       {std::tuple<std::size_t, std::size_t, std::size_t>{1, 1, 1},
        {5, 3, 4},
        {64, 7, 7},
        {257, 12, 9}}) {
    const NodeMatrix a = random_matrix(rng, rows, na);
    const NodeMatrix b = random_matrix(rng, rows, nb);
    PaddedWeights w;
    w.assign(random_weights(rng, rows));
    std::vector<std::complex<double>> cs(na * nb, {0, 0}), cv(na * nb, {0, 0});
    kernels::weighted_gram_scalar(a, b, w, cs.data(), nb, 0, na, false);
    kernels::weighted_gram_avx2(a, b, w, cv.data(), nb, 0, na, false);
    for (std::size_t i = 0; i < cs.size(); ++i) CHECK(std::abs(cs[i] - cv[i]) < 1e-12);
  }
}

TEST_CASE("upper-only and row-range variants agree with the full gram") {
  Rng rng(3);
  const std::size_t rows = 41, n = 8;
  const NodeMatrix a = random_matrix(rng, rows, n);
  PaddedWeights w;
  w.assign(random_weights(rng, rows));

  std::vector<std::complex<double>> full(n * n, {0, 0}), upper(n * n, {0, 0}),
      ranged(n * n, {0, 0});
  kernels::weighted_gram_scalar(a, a, w, full.data(), n, 0, n, false);
  kernels::weighted_gram_upper(a, w, upper.data(), n);
  kernels::weighted_gram_range(a, a, w, ranged.data(), n, 2, 6, false);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j >= i) CHECK(std::abs(upper[i * n + j] - full[i * n + j]) < 1e-13);
      if (i >= 2 && i < 6) CHECK(std::abs(ranged[i * n + j] - full[i * n + j]) < 1e-13);
    }
}

TEST_CASE("axpy variants agree") {
  Rng rng(11);
  std::vector<std::complex<double>> base(131);
  std::vector<std::complex<double>> src(131);
  for (auto& z : base) z = {rng.uniform(), rng.uniform()};
  for (auto& z : src) z = {rng.uniform(), rng.uniform()};
  auto a = base, b = base;
  kernels::axpy_real_scalar(a.data(), src.data(), 0.37, a.size());
  kernels::axpy_real_avx2(b.data(), src.data(), 0.37, b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-15);
}

TEST_CASE("backend can be forced for reproducibility studies") {
  const auto saved = kernels::active();
  kernels::set_active(kernels::Backend::scalar);
  CHECK(kernels::active() == kernels::Backend::scalar);
  CHECK(kernels::backend_name(kernels::active()) == "scalar");
  kernels::set_active(saved);
}

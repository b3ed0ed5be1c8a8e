#include <cmath>

#include "hfjump/kernels.hpp"

namespace hfjump::kernels {
namespace {

void weighted_window_scalar(const double* x, std::size_t n_out, const double* w, std::size_t wlen,
                            double* out) {
  for (std::size_t i = 0; i < n_out; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < wlen; ++j) acc += w[j] * x[i + j];
    out[i] = acc;
  }
}

double truncated_sum_squares_scalar(const double* x, std::size_t n, double threshold) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(x[i]) <= threshold) acc += x[i] * x[i];
  }
  return acc;
}

double truncated_lagged_abs_product_scalar(const double* x, std::size_t n_pairs, std::size_t lag,
                                           double threshold) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const double a = std::fabs(x[i]);
    const double b = std::fabs(x[i + lag]);
    if (a <= threshold && b <= threshold) acc += a * b;
  }
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{weighted_window_scalar, truncated_sum_squares_scalar,
                               truncated_lagged_abs_product_scalar, dot_scalar};
}

}  // namespace hfjump::kernels

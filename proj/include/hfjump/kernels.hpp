#pragma once

// Data-parallel inner loops of the estimators. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant. The variant is
// chosen once per process from the CPU's capabilities; setting the environment
// variable HFJUMP_ISA=scalar forces the reference path.

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace hfjump::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

struct KernelTable {
  // out[i] = sum_{j < wlen} w[j] * x[i + j] for i < n_out.
  void (*weighted_window)(const double* x, std::size_t n_out, const double* w, std::size_t wlen,
                          double* out);
  // sum_i x[i]^2 * 1(|x[i]| <= threshold)
  double (*truncated_sum_squares)(const double* x, std::size_t n, double threshold);
  // sum_{i < n_pairs} |t(x[i])| * |t(x[i + lag])|, t(v) = v * 1(|v| <= threshold)
  double (*truncated_lagged_abs_product)(const double* x, std::size_t n_pairs, std::size_t lag,
                                         double threshold);
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
};

/// Table for a specific instruction set. Requesting kAvx2 on a machine or
/// build without it returns the scalar table.
const KernelTable& table(Isa isa);

/// Instruction sets usable on this machine (always includes kScalar).
std::vector<Isa> available_isas();

/// The instruction set selected for this process.
Isa active_isa();

const KernelTable& active();

// Convenience wrappers over the active table.

inline void weighted_window(std::span<const double> x, std::span<const double> w,
                            std::span<double> out) {
  active().weighted_window(x.data(), out.size(), w.data(), w.size(), out.data());
}

inline double truncated_sum_squares(std::span<const double> x, double threshold = kNoTruncation) {
  return active().truncated_sum_squares(x.data(), x.size(), threshold);
}

/// Pairs (x[i], x[i+lag]) for i < x.size() - lag.
inline double truncated_lagged_abs_product(std::span<const double> x, std::size_t lag,
                                           double threshold = kNoTruncation) {
  if (x.size() <= lag) return 0.0;
  return active().truncated_lagged_abs_product(x.data(), x.size() - lag, lag, threshold);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

namespace detail {
extern const KernelTable kScalarTable;
#if defined(HFJUMP_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace hfjump::kernels

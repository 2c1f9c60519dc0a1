#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Elementwise kernels over flat phase-space vectors. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. Variants perform the same IEEE operations in the same order (no
// fused multiply-add), so their results are bit-identical.

namespace tidal::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  std::string_view name;
  /// out[i] = y[i] + a * k[i]. out may alias y.
  void (*axpy)(double* out, const double* y, double a, const double* k,
               std::size_t n);
  /// out[i] = y[i] + (h/6) * (k1[i] + 2 k2[i] + 2 k3[i] + k4[i]),
  /// summed left to right. out may alias y.
  void (*rk4_combine)(double* out, const double* y, double h,
                      const double* k1, const double* k2, const double* k3,
                      const double* k4, std::size_t n);
  /// max_i |a[i] - b[i]|; NaN if any difference is NaN; 0 for n = 0.
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

bool supported(Isa isa);

/// Table for a specific instruction set. Throws std::runtime_error when the
/// running CPU (or the build) lacks it.
const KernelTable& table(Isa isa);

/// Best supported table, chosen once on first use.
const KernelTable& active();

namespace scalar {
extern const KernelTable kTable;
}
#if defined(TIDAL_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

inline void axpy(std::span<double> out, std::span<const double> y, double a,
                 std::span<const double> k) {
  active().axpy(out.data(), y.data(), a, k.data(), out.size());
}

inline void rk4_combine(std::span<double> out, std::span<const double> y,
                        double h, std::span<const double> k1,
                        std::span<const double> k2, std::span<const double> k3,
                        std::span<const double> k4) {
  active().rk4_combine(out.data(), y.data(), h, k1.data(), k2.data(),
                       k3.data(), k4.data(), out.size());
}

inline double max_abs_diff(std::span<const double> a,
                           std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace tidal::kernels

#include <cmath>
#include <limits>

#include "tidal/kernels.hpp"

namespace tidal::kernels::scalar {
namespace {

void axpy(double* out, const double* y, double a, const double* k,
          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * k[i];
}

void rk4_combine(double* out, const double* y, double h, const double* k1,
                 const double* k2, const double* k3, const double* k4,
                 std::size_t n) {
  const double sixth = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = k1[i] + 2.0 * k2[i];
    s = s + 2.0 * k3[i];
    s = s + k4[i];
    out[i] = y[i] + sixth * s;
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  bool nan = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (std::isnan(d)) nan = true;
    else if (d > m) m = d;
  }
  return nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

}  // namespace

const KernelTable kTable{"scalar", &axpy, &rk4_combine, &max_abs_diff};

}  // namespace tidal::kernels::scalar

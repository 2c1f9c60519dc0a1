// Compiled with -mavx2 (and without -mfma); only reached through the runtime
// dispatcher after a CPUID check.
#include <immintrin.h>

#include <cmath>
#include <limits>

#include "tidal/kernels.hpp"

namespace tidal::kernels::avx2 {
namespace {

void axpy(double* out, const double* y, double a, const double* k,
          std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(k + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) out[i] = y[i] + a * k[i];
}

void rk4_combine(double* out, const double* y, double h, const double* k1,
                 const double* k2, const double* k3, const double* k4,
                 std::size_t n) {
  const double sixth = h / 6.0;
  const __m256d vsixth = _mm256_set1_pd(sixth);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i),
                              _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
    s = _mm256_add_pd(s, _mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)));
    s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                            _mm256_mul_pd(vsixth, s)));
  }
  for (; i < n; ++i) {
    double s = k1[i] + 2.0 * k2[i];
    s = s + 2.0 * k3[i];
    s = s + k4[i];
    out[i] = y[i] + sixth * s;
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  __m256d vnan = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_andnot_pd(
        sign, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    vnan = _mm256_or_pd(vnan, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    vmax = _mm256_max_pd(vmax, d);
  }
  bool nan = _mm256_movemask_pd(vnan) != 0;
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = 0.0;
  if (!nan) {
    for (double lane : lanes) {
      if (lane > m) m = lane;
    }
  }
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (std::isnan(d)) nan = true;
    else if (d > m) m = d;
  }
  return nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

}  // namespace

const KernelTable kTable{"avx2", &axpy, &rk4_combine, &max_abs_diff};

}  // namespace tidal::kernels::avx2

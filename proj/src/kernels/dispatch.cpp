#include <stdexcept>

#include "tidal/kernels.hpp"

namespace tidal::kernels {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(TIDAL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw std::runtime_error("instruction set not available on this CPU");
  }
#if defined(TIDAL_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::kTable;
#endif
  return scalar::kTable;
}

const KernelTable& active() {
  static const KernelTable& selected =
      supported(Isa::avx2) ? table(Isa::avx2) : table(Isa::scalar);
  return selected;
}

}  // namespace tidal::kernels

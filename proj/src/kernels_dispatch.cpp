#include <stdexcept>
#include <string>

#include "grassvol/kernels.hpp"

namespace grassvol::kernels {

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool supported(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(GRASSVOL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(GRASSVOL_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Table& table(Backend b) {
  if (!supported(b)) {
    throw std::invalid_argument("kernel backend '" + std::string(backend_name(b)) +
                                "' is not available on this machine");
  }
  switch (b) {
#if defined(GRASSVOL_HAVE_AVX2)
    case Backend::avx2:
      return detail::avx2_table;
#endif
#if defined(GRASSVOL_HAVE_NEON)
    case Backend::neon:
      return detail::neon_table;
#endif
    default:
      return detail::scalar_table;
  }
}

Backend active_backend() noexcept {
  static const Backend chosen = [] {
    if (supported(Backend::avx2)) return Backend::avx2;
    if (supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
  }();
  return chosen;
}

const Table& active() noexcept {
  static const Table& t = table(active_backend());
  return t;
}

}  // namespace grassvol::kernels

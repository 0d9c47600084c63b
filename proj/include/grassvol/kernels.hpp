#pragma once

// Data-parallel inner loops used by sampling, quantisation and Monte Carlo.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled in separate translation units and
// chosen once at first use from the running CPU's feature set. Variants agree
// with the scalar path to rounding; they are not bit-identical (FMA and
// reassociated sums), so results are reproducible per machine, not across
// backends.
//
// Complex vectors are passed as interleaved (re, im) doubles, which is the
// storage of std::complex<double> arrays and Eigen::MatrixXcd columns.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace grassvol::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b) noexcept;

struct Table {
  /// sum_i conj(a_i) * b_i over n complex entries.
  std::complex<double> (*cdot)(const double* a, const double* b, std::size_t n);
  /// y_i -= c * x_i over n complex entries.
  void (*caxpy_sub)(std::complex<double> c, const double* x, double* y, std::size_t n);
  /// sum of squares of len doubles.
  double (*sum_sq)(const double* x, std::size_t len);
  /// real dot product of len doubles.
  double (*dot)(const double* a, const double* b, std::size_t len);
  /// out[r] = rows[r*len .. r*len+len) . x for r < nrows.
  void (*dot_rows)(const double* rows, std::size_t nrows, std::size_t len, const double* x,
                   double* out);
};

/// True when the backend was compiled in and the CPU supports it.
bool supported(Backend b) noexcept;

/// Kernel table for a specific backend. Throws std::invalid_argument when the
/// backend is not supported here.
const Table& table(Backend b);

/// Backend picked for this process (best supported).
Backend active_backend() noexcept;

/// Kernel table of the active backend.
const Table& active() noexcept;

// Convenience wrappers on the active table.
inline std::complex<double> cdot(std::span<const std::complex<double>> a,
                                 std::span<const std::complex<double>> b) {
  return active().cdot(reinterpret_cast<const double*>(a.data()),
                       reinterpret_cast<const double*>(b.data()), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

namespace detail {
extern const Table scalar_table;
#if defined(GRASSVOL_HAVE_AVX2)
extern const Table avx2_table;
#endif
#if defined(GRASSVOL_HAVE_NEON)
extern const Table neon_table;
#endif
}  // namespace detail

}  // namespace grassvol::kernels

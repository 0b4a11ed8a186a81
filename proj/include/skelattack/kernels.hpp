#pragma once

// Dense double-precision kernels behind the classifiers and extractors.
// Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once per process: the best ISA the
// CPU supports, unless SKELATTACK_KERNEL=scalar|avx2 overrides it.

#include <cstddef>
#include <span>
#include <string_view>

namespace skelattack::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y = W x + bias, W row-major rows x cols; bias may be null.
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias, double* y);
  /// y += W^T g, W row-major rows x cols.
  void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols, const double* g, double* y);
  /// W += alpha * g x^T (rank-1 update), W row-major rows x cols.
  void (*ger)(double alpha, const double* g, std::size_t rows, const double* x, std::size_t cols, double* w);
  /// sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
};

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);
/// Throws ValidationError for unknown names.
Isa parse_isa(std::string_view name);

/// Table for a specific ISA; throws ValidationError if unsupported.
const KernelTable& table(Isa isa);
/// Process-wide selection (resolved on first use).
Isa active_isa();
const KernelTable& active();

namespace scalar {
extern const KernelTable kTable;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

}  // namespace skelattack::kernels

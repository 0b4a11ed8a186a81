#include "skelattack/kernels.hpp"

namespace skelattack::kernels::scalar {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(w + r * cols, x, cols) + (bias ? bias[r] : 0.0);
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* g, double* y) {
  for (std::size_t r = 0; r < rows; ++r)
    if (g[r] != 0.0) axpy(g[r], w + r * cols, y, cols);
}

void ger(double alpha, const double* g, std::size_t rows, const double* x, std::size_t cols, double* w) {
  for (std::size_t r = 0; r < rows; ++r)
    if (g[r] != 0.0) axpy(alpha * g[r], x, w + r * cols, cols);
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

const KernelTable kTable{dot, axpy, gemv, gemv_t_acc, ger, squared_distance};

}  // namespace skelattack::kernels::scalar

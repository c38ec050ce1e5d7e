#include <algorithm>
#include <cmath>

#include "sfk/simd/kernels.hpp"

namespace sfk::simd::scalar {

namespace {

void poisson_sums(const double* e1, const double* e2, const double* e3, const double* q, std::size_t n,
                  double* out) {
  double s[kRawSumCount] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = e1[i], b = e2[i], c = e3[i];
    const double inv = 1.0 / (a * a + b * b + c * c);
    const double q2 = q[i] * inv * inv;
    const double q3 = q2 * inv;
    s[kSumInvE2] += q2;
    s[kSumE1InvE2] += q2 * a;
    s[kSumE2InvE2] += q2 * b;
    s[kSumE3InvE2] += q2 * c;
    const double qa = q3 * a, qb = q3 * b, qc = q3 * c;
    s[kSumE1InvE3] += qa;
    s[kSumE2InvE3] += qb;
    s[kSumE3InvE3] += qc;
    s[kSumE11InvE3] += qa * a;
    s[kSumE12InvE3] += qa * b;
    s[kSumE13InvE3] += qa * c;
    s[kSumE22InvE3] += qb * b;
    s[kSumE23InvE3] += qb * c;
    s[kSumE33InvE3] += qc * c;
  }
  std::copy(s, s + kRawSumCount, out);
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}
void neg(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}
void sqrt(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(a[i]);
}
void abs(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i]);
}
// NaN handling follows the AVX2 min/max semantics: the second operand wins.
void min(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] < b[i] ? a[i] : b[i];
}
void max(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] > b[i] ? a[i] : b[i];
}
void fill(double value, double* out, std::size_t n) { std::fill(out, out + n, value); }

}  // namespace

const KernelTable table = {poisson_sums, dot, add, sub, mul, div, neg, sqrt, abs, min, max, fill};

}  // namespace sfk::simd::scalar

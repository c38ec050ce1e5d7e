// AVX2/FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may be called unless the dispatcher has
// confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "sfk/simd/kernels.hpp"

namespace sfk::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void poisson_sums(const double* e1, const double* e2, const double* e3, const double* q, std::size_t n,
                  double* out) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc[kRawSumCount];
  for (auto& v : acc) v = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(e1 + i);
    const __m256d b = _mm256_loadu_pd(e2 + i);
    const __m256d c = _mm256_loadu_pd(e3 + i);
    const __m256d qi = _mm256_loadu_pd(q + i);
    const __m256d E = _mm256_fmadd_pd(a, a, _mm256_fmadd_pd(b, b, _mm256_mul_pd(c, c)));
    const __m256d inv = _mm256_div_pd(one, E);
    const __m256d q2 = _mm256_mul_pd(qi, _mm256_mul_pd(inv, inv));
    const __m256d q3 = _mm256_mul_pd(q2, inv);
    acc[kSumInvE2] = _mm256_add_pd(acc[kSumInvE2], q2);
    acc[kSumE1InvE2] = _mm256_fmadd_pd(q2, a, acc[kSumE1InvE2]);
    acc[kSumE2InvE2] = _mm256_fmadd_pd(q2, b, acc[kSumE2InvE2]);
    acc[kSumE3InvE2] = _mm256_fmadd_pd(q2, c, acc[kSumE3InvE2]);
    const __m256d qa = _mm256_mul_pd(q3, a), qb = _mm256_mul_pd(q3, b), qc = _mm256_mul_pd(q3, c);
    acc[kSumE1InvE3] = _mm256_add_pd(acc[kSumE1InvE3], qa);
    acc[kSumE2InvE3] = _mm256_add_pd(acc[kSumE2InvE3], qb);
    acc[kSumE3InvE3] = _mm256_add_pd(acc[kSumE3InvE3], qc);
    acc[kSumE11InvE3] = _mm256_fmadd_pd(qa, a, acc[kSumE11InvE3]);
    acc[kSumE12InvE3] = _mm256_fmadd_pd(qa, b, acc[kSumE12InvE3]);
    acc[kSumE13InvE3] = _mm256_fmadd_pd(qa, c, acc[kSumE13InvE3]);
    acc[kSumE22InvE3] = _mm256_fmadd_pd(qb, b, acc[kSumE22InvE3]);
    acc[kSumE23InvE3] = _mm256_fmadd_pd(qb, c, acc[kSumE23InvE3]);
    acc[kSumE33InvE3] = _mm256_fmadd_pd(qc, c, acc[kSumE33InvE3]);
  }
  double s[kRawSumCount];
  for (std::size_t k = 0; k < kRawSumCount; ++k) s[k] = hsum(acc[k]);
  for (; i < n; ++i) {
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
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <class Op, class Tail>
inline void binary(const double* a, const double* b, double* out, std::size_t n, Op op, Tail tail) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = tail(a[i], b[i]);
}

template <class Op, class Tail>
inline void unary(const double* a, double* out, std::size_t n, Op op, Tail tail) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i)));
  for (; i < n; ++i) out[i] = tail(a[i]);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
         [](double x, double y) { return x + y; });
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
         [](double x, double y) { return x - y; });
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
         [](double x, double y) { return x * y; });
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); },
         [](double x, double y) { return x / y; });
}
void neg(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  unary(a, out, n, [&](__m256d x) { return _mm256_xor_pd(x, sign); },
        [](double x) { return -x; });
}
void sqrt(const double* a, double* out, std::size_t n) {
  unary(a, out, n, [](__m256d x) { return _mm256_sqrt_pd(x); },
        [](double x) { return std::sqrt(x); });
}
void abs(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  unary(a, out, n, [&](__m256d x) { return _mm256_andnot_pd(sign, x); },
        [](double x) { return std::fabs(x); });
}
// _mm256_min_pd(x, y) returns y when either operand is NaN, as does the
// scalar reference.
void min(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_min_pd(x, y); },
         [](double x, double y) { return x < y ? x : y; });
}
void max(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_max_pd(x, y); },
         [](double x, double y) { return x > y ? x : y; });
}
void fill(double value, double* out, std::size_t n) { std::fill(out, out + n, value); }

}  // namespace

const KernelTable table = {poisson_sums, dot, add, sub, mul, div, neg, sqrt, abs, min, max, fill};

}  // namespace sfk::simd::avx2

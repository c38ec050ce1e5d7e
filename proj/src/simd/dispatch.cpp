#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sfk/simd/kernels.hpp"

namespace sfk::simd {

namespace {

bool cpu_has_avx2() {
#if defined(SFK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  // SFK_ISA=scalar forces the reference path (useful when comparing runs).
  if (const char* env = std::getenv("SFK_ISA"); env && std::string(env) == "scalar")
    return Isa::scalar;
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument(std::string("ISA not available: ") + isa_name(isa));
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
#if defined(SFK_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::table;
#endif
  (void)isa;
  return scalar::table;
}

RawSums poisson_sums(std::span<const double> e1, std::span<const double> e2,
                     std::span<const double> e3, std::span<const double> q) {
  if (e1.size() != e2.size() || e1.size() != e3.size() || e1.size() != q.size())
    throw std::invalid_argument("poisson_sums: mismatched spans");
  RawSums out{};
  kernels().poisson_sums(e1.data(), e2.data(), e3.data(), q.data(), e1.size(), out.data());
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: mismatched spans");
  return kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace sfk::simd

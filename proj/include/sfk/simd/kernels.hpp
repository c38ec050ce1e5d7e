#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and, on x86-64 builds, an AVX2/FMA variant; the variant is
// chosen once at startup from the CPU's capabilities and can be overridden
// (tests pin each ISA in turn and compare).

#include <array>
#include <cstddef>
#include <span>

namespace sfk::simd {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
// Throws std::invalid_argument if the ISA is not available on this CPU/build.
void set_isa(Isa isa);

// Raw sums accumulated by poisson_sums over ball-model nodes with offsets
// e = y - xi and weights q:   E = |e|^2
enum RawSum : std::size_t {
  kSumInvE2 = 0,  // q / E^2
  kSumE1InvE2,    // q e_k / E^2, k = 1..3
  kSumE2InvE2,
  kSumE3InvE2,
  kSumE1InvE3,    // q e_k / E^3
  kSumE2InvE3,
  kSumE3InvE3,
  kSumE11InvE3,   // q e_j e_l / E^3, j <= l
  kSumE12InvE3,
  kSumE13InvE3,
  kSumE22InvE3,
  kSumE23InvE3,
  kSumE33InvE3,
  kRawSumCount
};
using RawSums = std::array<double, kRawSumCount>;

struct KernelTable {
  void (*poisson_sums)(const double* e1, const double* e2, const double* e3, const double* q,
                       std::size_t n, double* out);
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*div)(const double* a, const double* b, double* out, std::size_t n);
  void (*neg)(const double* a, double* out, std::size_t n);
  void (*sqrt)(const double* a, double* out, std::size_t n);
  void (*abs)(const double* a, double* out, std::size_t n);
  void (*min)(const double* a, const double* b, double* out, std::size_t n);
  void (*max)(const double* a, const double* b, double* out, std::size_t n);
  void (*fill)(double value, double* out, std::size_t n);
};

const KernelTable& kernels(Isa isa);
inline const KernelTable& kernels() { return kernels(active_isa()); }

namespace scalar {
extern const KernelTable table;
}
#if defined(SFK_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

// Convenience wrappers over the active table.
RawSums poisson_sums(std::span<const double> e1, std::span<const double> e2,
                     std::span<const double> e3, std::span<const double> q);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace sfk::simd

#pragma once

// Data-parallel inner loops of factor arithmetic.
//
// Every kernel exists as a portable scalar reference and, on x86-64, as an
// AVX2 variant chosen at runtime from CPUID. The variants are bit-identical:
// products are lane-wise and each accumulation keeps the scalar order per
// output element, so inference results never depend on the host CPU.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace bnsens::kernels {

using Index = std::uint32_t;

struct KernelTable {
  std::string_view name;
  /// out[i] = in[idx[i]]
  void (*gather)(double* out, const double* in, const Index* idx, std::size_t n);
  /// out[i] = a[ia[i]] * b[ib[i]]
  void (*multiply_gather)(double* out, const double* a, const Index* ia, const double* b,
                          const Index* ib, std::size_t n);
  /// out[i] = in[i] + in[width + i] + ... + in[(blocks-1)*width + i], summed left to right.
  void (*accumulate_blocks)(double* out, const double* in, std::size_t width, std::size_t blocks);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels() noexcept;

/// The table used by the library. Picks the widest supported variant unless
/// the BNSENS_KERNELS environment variable names another ("scalar", "avx2").
const KernelTable& active_kernels() noexcept;

/// Every variant usable on this host, scalar first.
std::vector<const KernelTable*> available_kernels();

// Span front-ends over the active table. Sizes are checked by assertion only.
void gather(std::span<double> out, std::span<const double> in, std::span<const Index> idx);
void multiply_gather(std::span<double> out, std::span<const double> a, std::span<const Index> ia,
                     std::span<const double> b, std::span<const Index> ib);
void accumulate_blocks(std::span<double> out, std::span<const double> in, std::size_t blocks);

}  // namespace bnsens::kernels

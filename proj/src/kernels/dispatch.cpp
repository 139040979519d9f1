#include <cassert>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace bnsens::kernels {

namespace {

constexpr KernelTable kScalar{"scalar", &scalar::gather, &scalar::multiply_gather,
                              &scalar::accumulate_blocks};

#if defined(BNSENS_HAVE_AVX2)
constexpr KernelTable kAvx2{"avx2", &avx2::gather, &avx2::multiply_gather,
                            &avx2::accumulate_blocks};

bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}
#endif

const KernelTable& select_kernels() noexcept {
  const KernelTable* best = &kScalar;
  if (const KernelTable* wide = avx2_kernels()) best = wide;
  if (const char* forced = std::getenv("BNSENS_KERNELS")) {
    const std::string_view want(forced);
    if (want == "scalar") return kScalar;
    if (want == "avx2" && avx2_kernels()) return *avx2_kernels();
  }
  return *best;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

const KernelTable* avx2_kernels() noexcept {
#if defined(BNSENS_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& chosen = select_kernels();
  return chosen;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&kScalar};
  if (const auto* wide = avx2_kernels()) out.push_back(wide);
  return out;
}

void gather(std::span<double> out, std::span<const double> in, std::span<const Index> idx) {
  assert(out.size() == idx.size());
  active_kernels().gather(out.data(), in.data(), idx.data(), out.size());
}

void multiply_gather(std::span<double> out, std::span<const double> a, std::span<const Index> ia,
                     std::span<const double> b, std::span<const Index> ib) {
  assert(out.size() == ia.size() && out.size() == ib.size());
  active_kernels().multiply_gather(out.data(), a.data(), ia.data(), b.data(), ib.data(), out.size());
}

void accumulate_blocks(std::span<double> out, std::span<const double> in, std::size_t blocks) {
  assert(in.size() == out.size() * blocks);
  if (blocks == 0) {
    for (auto& v : out) v = 0.0;
    return;
  }
  active_kernels().accumulate_blocks(out.data(), in.data(), out.size(), blocks);
}

}  // namespace bnsens::kernels

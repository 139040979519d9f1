// Compiled with -mavx2 only (no -mfma), so no fused multiply-adds appear.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace bnsens::kernels::avx2 {

namespace {

inline __m128i load_indices(const Index* idx) {
  return _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx));
}

}  // namespace

void gather(double* out, const double* in, const Index* idx, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_i32gather_pd(in, load_indices(idx + i), 8);
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] = in[idx[i]];
}

void multiply_gather(double* out, const double* a, const Index* ia, const double* b,
                     const Index* ib, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_i32gather_pd(a, load_indices(ia + i), 8);
    const __m256d vb = _mm256_i32gather_pd(b, load_indices(ib + i), 8);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, vb));
  }
  for (; i < n; ++i) out[i] = a[ia[i]] * b[ib[i]];
}

void accumulate_blocks(double* out, const double* in, std::size_t width, std::size_t blocks) {
  std::size_t i = 0;
  for (; i + 4 <= width; i += 4) {
    __m256d acc = _mm256_loadu_pd(in + i);
    for (std::size_t k = 1; k < blocks; ++k) acc = _mm256_add_pd(acc, _mm256_loadu_pd(in + k * width + i));
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < width; ++i) {
    double acc = in[i];
    for (std::size_t k = 1; k < blocks; ++k) acc += in[k * width + i];
    out[i] = acc;
  }
}

}  // namespace bnsens::kernels::avx2

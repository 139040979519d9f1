#include "kernels_impl.hpp"

namespace bnsens::kernels::scalar {

void gather(double* out, const double* in, const Index* idx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[idx[i]];
}

void multiply_gather(double* out, const double* a, const Index* ia, const double* b,
                     const Index* ib, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[ia[i]] * b[ib[i]];
}

void accumulate_blocks(double* out, const double* in, std::size_t width, std::size_t blocks) {
  for (std::size_t i = 0; i < width; ++i) out[i] = in[i];
  for (std::size_t k = 1; k < blocks; ++k) {
    const double* block = in + k * width;
    for (std::size_t i = 0; i < width; ++i) out[i] += block[i];
  }
}

}  // namespace bnsens::kernels::scalar

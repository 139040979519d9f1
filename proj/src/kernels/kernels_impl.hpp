#pragma once

#include "bnsens/kernels.hpp"

namespace bnsens::kernels {

namespace scalar {
void gather(double* out, const double* in, const Index* idx, std::size_t n);
void multiply_gather(double* out, const double* a, const Index* ia, const double* b,
                     const Index* ib, std::size_t n);
void accumulate_blocks(double* out, const double* in, std::size_t width, std::size_t blocks);
}  // namespace scalar

#if defined(BNSENS_HAVE_AVX2)
namespace avx2 {
void gather(double* out, const double* in, const Index* idx, std::size_t n);
void multiply_gather(double* out, const double* a, const Index* ia, const double* b,
                     const Index* ib, std::size_t n);
void accumulate_blocks(double* out, const double* in, std::size_t width, std::size_t blocks);
}  // namespace avx2
#endif

}  // namespace bnsens::kernels

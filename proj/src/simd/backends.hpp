#pragma once

#include "cwsk/simd.hpp"

namespace cwsk::simd::detail {

const Kernels& scalar_kernels();
// nullptr when the backend is not compiled for this target.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

}  // namespace cwsk::simd::detail

#pragma once

// Internal: backend hooks shared between the dispatcher and the per-ISA TUs.

#include "fiberfold/kernels.hpp"

namespace fiberfold::kernels {

#if defined(FIBERFOLD_HAVE_AVX2)
bool avx2_supported();
const Ops& avx2_ops();
#endif

#if defined(FIBERFOLD_HAVE_NEON)
const Ops& neon_ops();
#endif

}  // namespace fiberfold::kernels

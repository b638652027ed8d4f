#pragma once

namespace rcan {

// Scalar type for tensors and network parameters. Gradient checks require the
// 64-bit build (the default); configure with -DRCAN_PRECISION=float for a
// 32-bit training build. One code path either way.
#ifdef RCAN_REAL_FLOAT
using real = float;
#else
using real = double;
#endif

}  // namespace rcan

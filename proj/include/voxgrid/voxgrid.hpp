#pragma once

// Umbrella header: piecewise-linear geometry in, Morton-indexed voxel
// clouds, voxel graphs/hypergraphs and sparse differential/integral
// operators out.

#include "morton.hpp"     // IWYU pragma: export
#include "geometry.hpp"   // IWYU pragma: export
#include "sampling.hpp"   // IWYU pragma: export
#include "voxelize.hpp"   // IWYU pragma: export
#include "stencil.hpp"    // IWYU pragma: export
#include "sparse.hpp"     // IWYU pragma: export
#include "complex.hpp"    // IWYU pragma: export
#include "operators.hpp"  // IWYU pragma: export
#include "io.hpp"         // IWYU pragma: export

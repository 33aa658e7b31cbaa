#pragma once

#include "distvar/field.hpp"

namespace distvar {

/// True when s is a supported sampling factor (1 means identity).
bool valid_scale(int s);

/// s x s block average; dimensions must be divisible by s.
ScalarField downsample(const ScalarField& u, int s);

/// Exact adjoint of downsample: replicates each value into its s x s block
/// scaled by 1/s^2, so <downsample(u), v> == <u, upsample_adjoint(v, s)>.
ScalarField upsample_adjoint(const ScalarField& v, int s);

/// Bilinear interpolation to an s-times larger grid (half-pixel aligned,
/// clamped at the edges). Used for solver initialization, not as an adjoint.
ScalarField upsample_bilinear(const ScalarField& v, int s);

}  // namespace distvar

#pragma once

#include <vector>

namespace distvar {

/// Triangular (hat) interpolation weight over an ordered set of centers.
/// Depth d maps to segment [centers[lo], centers[lo+1]] with weight w_lo on
/// the lower center and 1-w_lo on the upper; values outside the range clamp
/// to the nearest center with full weight.
struct HatWeight {
    int lo = 0;
    double w_lo = 1.0;
};

HatWeight hat_weight(const std::vector<double>& centers, double d);

}  // namespace distvar

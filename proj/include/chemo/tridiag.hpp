#pragma once

#include <vector>

namespace chemo {

/// Thomas algorithm. lower[0] and upper[n-1] are ignored. Inputs are taken by
/// value and reused as scratch.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

}  // namespace chemo

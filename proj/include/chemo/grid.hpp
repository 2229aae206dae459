#pragma once

#include <cstddef>
#include <vector>

#include "chemo/model.hpp"

namespace chemo {

/// Node-centred finite-volume discretization of the ball B_R under radial
/// symmetry. Node i owns the shell between faces i and i+1, where face 0 is
/// the origin, face M+1 is R, and interior faces sit at node midpoints.
struct RadialGrid {
  int n = 3;
  double R = 1.0;
  double sphere = 0.0;              ///< |S^{n-1}|
  std::vector<double> r;            ///< M+1 nodes, r[0] = 0, r[M] = R
  std::vector<double> face;         ///< M+2 face radii
  std::vector<double> area;         ///< sphere * face^{n-1}
  std::vector<double> volume;       ///< M+1 shell volumes (quadrature weights)
  std::vector<double> inv_volume;

  std::size_t size() const { return r.size(); }
  std::size_t intervals() const { return r.size() - 1; }
  double total_volume() const;
  double min_spacing() const;
  double max_spacing() const;
};

inline constexpr std::size_t kMinIntervals = 16;

/// b^n - a^n without cancellation for close arguments.
double power_difference(double b, double a, int n);

/// M intervals of equal width.
RadialGrid build_grid(const ModelParams& p, std::size_t M);

/// M intervals whose widths grow geometrically from h0 at the origin.
RadialGrid build_graded_grid(const ModelParams& p, std::size_t M, double h0);

/// Grid from explicit nodes (strictly increasing, r[0] = 0, r.back() = R).
RadialGrid grid_from_nodes(int n, std::vector<double> r);

/// Exact integral of a nodal field against the cell weights.
double integrate(const RadialGrid& g, const std::vector<double>& f);

}  // namespace chemo

#include "chemo/grid.hpp"

#include <cmath>
#include <string>

#include "chemo/error.hpp"
#include "chemo/simd/kernels.hpp"

namespace chemo {

double power_difference(double b, double a, int n) {
  double sum = 0.0;
  double bp = 1.0;
  for (int k = 0; k < n; ++k) {
    sum += bp * std::pow(a, n - 1 - k);
    bp *= b;
  }
  return (b - a) * sum;
}

double RadialGrid::total_volume() const {
  double acc = 0.0;
  for (double v : volume) acc += v;
  return acc;
}

double RadialGrid::min_spacing() const {
  double h = r.back();
  for (std::size_t i = 1; i < r.size(); ++i) h = std::min(h, r[i] - r[i - 1]);
  return h;
}

double RadialGrid::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) h = std::max(h, r[i] - r[i - 1]);
  return h;
}

RadialGrid grid_from_nodes(int n, std::vector<double> r) {
  if (r.size() < kMinIntervals + 1) {
    throw Error(Errc::TooFewNodes, "need at least " + std::to_string(kMinIntervals) + " intervals");
  }
  if (r.front() != 0.0) throw Error(Errc::ConfigError, "grid nodes must start at r = 0");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw Error(Errc::ConfigError, "grid nodes must be strictly increasing");
  }
  if (!std::isfinite(r.back())) throw Error(Errc::NonpositiveParameter, "grid radius must be finite");
  RadialGrid g;
  g.n = n;
  g.R = r.back();
  g.sphere = unit_sphere_area(n);
  g.r = std::move(r);

  const std::size_t N = g.r.size();
  g.face.resize(N + 1);
  g.face[0] = 0.0;
  for (std::size_t i = 1; i < N; ++i) g.face[i] = 0.5 * (g.r[i - 1] + g.r[i]);
  g.face[N] = g.R;

  g.area.resize(N + 1);
  for (std::size_t j = 0; j <= N; ++j) g.area[j] = g.sphere * std::pow(g.face[j], n - 1);

  g.volume.resize(N);
  g.inv_volume.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    g.volume[i] = g.sphere / n * power_difference(g.face[i + 1], g.face[i], n);
    g.inv_volume[i] = 1.0 / g.volume[i];
  }
  return g;
}

RadialGrid build_grid(const ModelParams& p, std::size_t M) {
  if (M < kMinIntervals) {
    throw Error(Errc::TooFewNodes, "M = " + std::to_string(M) + " < " + std::to_string(kMinIntervals));
  }
  std::vector<double> r(M + 1);
  for (std::size_t i = 0; i <= M; ++i) r[i] = p.R * static_cast<double>(i) / static_cast<double>(M);
  r[M] = p.R;
  return grid_from_nodes(p.n, std::move(r));
}

RadialGrid build_graded_grid(const ModelParams& p, std::size_t M, double h0) {
  if (M < kMinIntervals) {
    throw Error(Errc::TooFewNodes, "M = " + std::to_string(M) + " < " + std::to_string(kMinIntervals));
  }
  const double uniform = p.R / static_cast<double>(M);
  if (!(h0 > 0.0)) throw Error(Errc::NonpositiveParameter, "grid_h0 must be positive");
  if (h0 >= uniform) return build_grid(p, M);

  // Total length of M geometric widths with ratio q, relative to h0.
  const double Md = static_cast<double>(M);
  auto span = [&](double q) { return std::expm1(Md * std::log(q)) / (q - 1.0); };
  const double target = p.R / h0;
  double lo = 1.0 + 1e-15;
  double hi = 2.0;
  while (span(hi) < target) hi = 1.0 + 2.0 * (hi - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (span(mid) < target ? lo : hi) = mid;
  }
  const double q = 0.5 * (lo + hi);

  std::vector<double> r(M + 1);
  r[0] = 0.0;
  double h = h0;
  for (std::size_t i = 1; i <= M; ++i) {
    r[i] = r[i - 1] + h;
    h *= q;
  }
  // Rescale away the bisection residue so the outer node is exactly R.
  const double scale = p.R / r[M];
  for (auto& x : r) x *= scale;
  r[M] = p.R;
  return grid_from_nodes(p.n, std::move(r));
}

double integrate(const RadialGrid& g, const std::vector<double>& f) {
  return simd::active_kernels().weighted_sum(g.volume.data(), f.data(), g.size());
}

}  // namespace chemo

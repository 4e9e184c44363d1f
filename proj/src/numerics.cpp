#include "raman/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace raman::numerics {

SimplexResult nelder_mead_2d(const std::function<double(const std::array<double, 2>&)>& f,
                             std::array<double, 2> start, double step, double f_tol,
                             double x_tol, int max_iter) {
  using Point = std::array<double, 2>;
  std::array<Point, 3> p = {start, Point{start[0] + step, start[1]},
                            Point{start[0], start[1] + step}};
  std::array<double, 3> v = {f(p[0]), f(p[1]), f(p[2])};

  auto lerp = [](const Point& a, const Point& b, double s) {
    return Point{a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    const Point best = p[idx[0]], mid = p[idx[1]], worst = p[idx[2]];
    const double fb = v[idx[0]], fm = v[idx[1]], fw = v[idx[2]];
    p = {best, mid, worst};
    v = {fb, fm, fw};

    const double spread = std::max(std::abs(p[1][0] - p[0][0]), std::abs(p[2][0] - p[0][0])) +
                          std::max(std::abs(p[1][1] - p[0][1]), std::abs(p[2][1] - p[0][1]));
    if (std::abs(fw - fb) <= f_tol && spread <= x_tol) break;

    const Point centroid{0.5 * (best[0] + mid[0]), 0.5 * (best[1] + mid[1])};
    const Point refl = lerp(centroid, worst, -1.0);
    const double fr = f(refl);
    if (fr < fb) {
      const Point expd = lerp(centroid, worst, -2.0);
      const double fe = f(expd);
      if (fe < fr) {
        p[2] = expd;
        v[2] = fe;
      } else {
        p[2] = refl;
        v[2] = fr;
      }
      continue;
    }
    if (fr < fm) {
      p[2] = refl;
      v[2] = fr;
      continue;
    }
    // contraction, outside or inside
    const bool outside = fr < fw;
    const Point con = lerp(centroid, outside ? refl : worst, 0.5);
    const double fc = f(con);
    if (fc < (outside ? fr : fw)) {
      p[2] = con;
      v[2] = fc;
      continue;
    }
    for (int k = 1; k < 3; ++k) {
      p[k] = lerp(best, p[k], 0.5);
      v[k] = f(p[k]);
    }
  }
  const auto k = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  return {p[k], v[k], it};
}

}  // namespace raman::numerics

#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace maxlab {

// Barycentric quadrature rules. Weights sum to 1 and multiply the measure of
// the simplex, so sum_q w_q f(x_q) * |T| integrates f over T.

struct TetQuadPoint {
  std::array<double, 4> bary;
  double weight;
};

// Keast 15-point rule, exact for polynomials up to degree 5.
inline const std::vector<TetQuadPoint>& tet_quadrature() {
  static const std::vector<TetQuadPoint> rule = [] {
    std::vector<TetQuadPoint> pts;
    auto push_orbit4 = [&](double a, double b, double w) {
      // barycentric (b, a, a, a) and permutations of the lone coordinate
      for (int lone = 0; lone < 4; ++lone) {
        TetQuadPoint p{};
        p.bary = {a, a, a, a};
        p.bary[static_cast<size_t>(lone)] = b;
        p.weight = w;
        pts.push_back(p);
      }
    };
    auto push_orbit6 = [&](double a, double b, double w) {
      // barycentric (a, a, b, b) and distinct permutations
      constexpr int pos[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
      for (const auto& pr : pos) {
        TetQuadPoint p{};
        p.bary = {b, b, b, b};
        p.bary[static_cast<size_t>(pr[0])] = a;
        p.bary[static_cast<size_t>(pr[1])] = a;
        p.weight = w;
        pts.push_back(p);
      }
    };
    TetQuadPoint center{};
    center.bary = {0.25, 0.25, 0.25, 0.25};
    center.weight = 0.030283678097089 * 6.0;
    pts.push_back(center);
    push_orbit4(1.0 / 3.0, 0.0, 0.006026785714286 * 6.0);
    push_orbit4(1.0 / 11.0, 8.0 / 11.0, 0.011645249086029 * 6.0);
    push_orbit6(0.066550153573664, 0.433449846426336, 0.010949141561386 * 6.0);
    return pts;
  }();
  return rule;
}

struct TriQuadPoint {
  std::array<double, 3> bary;
  double weight;
};

// Radon 7-point rule, exact for polynomials up to degree 5.
inline const std::vector<TriQuadPoint>& tri_quadrature() {
  static const std::vector<TriQuadPoint> rule = [] {
    std::vector<TriQuadPoint> pts;
    const double s15 = std::sqrt(15.0);
    pts.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0});
    const double a = (6.0 - s15) / 21.0, wa = (155.0 - s15) / 1200.0;
    const double b = (6.0 + s15) / 21.0, wb = (155.0 + s15) / 1200.0;
    for (int lone = 0; lone < 3; ++lone) {
      TriQuadPoint p{};
      p.bary = {a, a, a};
      p.bary[static_cast<size_t>(lone)] = 1.0 - 2.0 * a;
      p.weight = wa;
      pts.push_back(p);
      TriQuadPoint q{};
      q.bary = {b, b, b};
      q.bary[static_cast<size_t>(lone)] = 1.0 - 2.0 * b;
      q.weight = wb;
      pts.push_back(q);
    }
    return pts;
  }();
  return rule;
}

}  // namespace maxlab

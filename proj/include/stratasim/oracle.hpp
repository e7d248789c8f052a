#pragma once

// Independent numeric best-response oracle: box grid search refined by
// bisection onto the boundary plus a tangential compass descent. Shares only
// the cost and classifier definitions with the closed-form solvers; none of
// their movement formulas. Intended for tests at small dimension (n <= 3;
// piecewise allocations are enumerated exhaustively in integer hours).

#include <functional>

#include "stratasim/costs.hpp"
#include "stratasim/model.hpp"
#include "stratasim/response.hpp"  // ResponseOutcome only

namespace stratasim {

namespace oracle_detail {

inline double reach_radius(const CostModel& m, double B) {
  switch (m.kind) {
    case CostKind::Norm2:
      return norm2_band(m, B);
    case CostKind::QuadraticDiagonal: {
      double cmin = kInf;
      for (double c : m.coeffs) cmin = std::min(cmin, c);
      return std::sqrt(B / cmin);
    }
    case CostKind::WeightedManhattan: {
      double cmin = kInf;
      for (double c : m.coeffs) cmin = std::min(cmin, c);
      return B / cmin;
    }
    default:
      throw std::invalid_argument("oracle: analytic families only");
  }
}

/// Orthonormal basis of the hyperplane through the origin with normal theta.
inline std::vector<Vec> tangent_basis(const Vec& theta) {
  const std::size_t n = theta.size();
  double nrm = std::sqrt(norm2sq(theta));
  Vec unit(n);
  for (std::size_t i = 0; i < n; ++i) unit[i] = theta[i] / nrm;
  std::vector<Vec> basis;
  for (std::size_t axis = 0; axis < n && basis.size() + 1 < n; ++axis) {
    Vec v(n, 0.0);
    v[axis] = 1.0;
    double along = dot(v, unit);
    for (std::size_t i = 0; i < n; ++i) v[i] -= along * unit[i];
    for (const Vec& b : basis) {
      double proj = dot(v, b);
      for (std::size_t i = 0; i < n; ++i) v[i] -= proj * b[i];
    }
    double len = std::sqrt(norm2sq(v));
    if (len < 1e-10) continue;
    for (double& c : v) c /= len;
    basis.push_back(std::move(v));
  }
  return basis;
}

inline void enumerate_compositions(int total, std::size_t slots, std::vector<int>& cur,
                                   const std::function<void(const std::vector<int>&)>& fn) {
  if (cur.size() + 1 == slots) {
    cur.push_back(total);
    fn(cur);
    cur.pop_back();
    return;
  }
  for (int h = total; h >= 0; --h) {
    cur.push_back(h);
    enumerate_compositions(total - h, slots, cur, fn);
    cur.pop_back();
  }
}

}  // namespace oracle_detail

/// Visits every point of the oracle's search box with the given resolution.
template <typename Fn>
void oracle_scan(const Vec& x0, const CostModel& m, double B, int resolution, Fn&& fn) {
  if (resolution < 3) throw std::invalid_argument("oracle: resolution too coarse to bracket the boundary");
  const std::size_t n = x0.size();
  double R = oracle_detail::reach_radius(m, B) * 1.05 + 1e-12;
  std::vector<int> idx(n, 0);
  Vec pt(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      double t = static_cast<double>(idx[i]) / (resolution - 1);
      pt[i] = x0[i] - 0.5 * R + 1.5 * R * t;
    }
    fn(pt);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < resolution) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
}

/// Minimum-cost crossing found by grid + bisection + tangential compass
/// search, or no action when the boundary is unaffordable.
inline ResponseOutcome oracle_best_response(const Vec& x0, const Classifier& c, const CostModel& m,
                                            double B, int resolution = 21) {
  ResponseOutcome out;
  out.x_post = x0;
  out.delta.assign(x0.size(), 0.0);
  if (classify(x0, c)) {
    out.accepted_true = out.accepted_perceived = true;
    return out;
  }
  if (m.kind == CostKind::PiecewiseLinear) {
    // Exhaustive integer-hour allocations, maximizing the weighted score gain
    // with the full budget (study semantics).
    int total = static_cast<int>(std::floor(B + 1e-9));
    double best = -kInf;
    std::vector<int> best_alloc;
    std::vector<int> cur;
    oracle_detail::enumerate_compositions(
        total, x0.size(), cur, [&](const std::vector<int>& hours) {
          double gain = 0.0;
          for (std::size_t i = 0; i < hours.size(); ++i)
            gain += c.theta[i] * points_from_hours(m.schedules[i], hours[i]);
          if (gain > best + 1e-12) {
            best = gain;
            best_alloc.assign(hours.begin(), hours.end());
          }
        });
    if (total > 0) {
      out.acted = true;
      out.cost_incurred = total;
      for (std::size_t i = 0; i < x0.size(); ++i) {
        out.delta[i] = points_from_hours(m.schedules[i], best_alloc[i]);
        out.x_post[i] = x0[i] + out.delta[i];
      }
      out.accepted_true = out.accepted_perceived = dot(out.x_post, c.theta) >= c.theta0;
    }
    return out;
  }

  double best_cost = kInf;
  Vec best_pt;
  oracle_scan(x0, m, B, resolution, [&](const Vec& pt) {
    if (!classify(pt, c)) return;
    double cc = budget_cost(pt, x0, m);
    if (cc < best_cost) {
      best_cost = cc;
      best_pt = pt;
    }
  });
  if (best_pt.empty()) return out;  // nothing affordable in reach

  // Pull the candidate onto the boundary along the segment from x0.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    Vec pt(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) pt[i] = x0[i] + mid * (best_pt[i] - x0[i]);
    if (classify(pt, c))
      hi = mid;
    else
      lo = mid;
  }
  Vec p(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) p[i] = x0[i] + hi * (best_pt[i] - x0[i]);

  // Compass descent within the boundary hyperplane. Axis steps alone can
  // stall on the kinks of the Manhattan cost, so in a 2-D tangent plane the
  // direction set sweeps a full fan of angles.
  auto basis = oracle_detail::tangent_basis(c.theta);
  std::vector<Vec> dirs;
  if (basis.size() == 2) {
    const int fan = 64;
    for (int a = 0; a < fan; ++a) {
      double ang = 2.0 * 3.14159265358979323846 * a / fan;
      Vec v(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        v[i] = std::cos(ang) * basis[0][i] + std::sin(ang) * basis[1][i];
      dirs.push_back(std::move(v));
    }
  } else {
    dirs = basis;
    for (std::size_t i = 0; i + 1 < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        for (double sj : {1.0, -1.0}) {
          Vec v(p.size());
          for (std::size_t k = 0; k < p.size(); ++k)
            v[k] = (basis[i][k] + sj * basis[j][k]) * 0.7071067811865476;
          dirs.push_back(std::move(v));
        }
  }
  double R = oracle_detail::reach_radius(m, B);
  double step = R / resolution;
  double cur_cost = budget_cost(p, x0, m);
  for (int sweeps = 0; step > 1e-10 && sweeps < 5000; ++sweeps) {
    bool improved = false;
    for (const Vec& v : dirs) {
      for (double sgn : {1.0, -1.0}) {
        Vec q(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i] + sgn * step * v[i];
        double qc = budget_cost(q, x0, m);
        if (qc < cur_cost - 1e-12 * (1.0 + cur_cost)) {
          p = q;
          cur_cost = qc;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  // Single-axis boundary intersections x0 + t e_i with theta.(x0 + t e_i)
  // = theta0. Weighted-L1 projections attain their minimum at such points,
  // where the compass can stall on acute kink cones.
  double gap0 = c.theta0 - dot(x0, c.theta);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (c.theta[i] <= 0.0) continue;
    Vec q = x0;
    q[i] += gap0 / c.theta[i];
    double qc = budget_cost(q, x0, m);
    if (qc < cur_cost) {
      p = q;
      cur_cost = qc;
    }
  }

  if (cur_cost <= B + 1e-9) {
    out.acted = true;
    out.cost_incurred = cur_cost;
    out.x_post = p;
    for (std::size_t i = 0; i < p.size(); ++i) out.delta[i] = p[i] - x0[i];
    out.accepted_true = out.accepted_perceived = true;
  }
  return out;
}

}  // namespace stratasim

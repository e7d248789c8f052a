#pragma once

// Cost models c(x, x0) and budget-feasibility predicates for the four
// families: norm-2, diagonal quadratic, weighted Manhattan, and the tiered
// piecewise-linear cost used in the user study.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stratasim/model.hpp"

namespace stratasim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One tier of the piecewise-linear improvement schedule: spending `hours`
/// at `points_per_hour`. The last tier may have infinite hours.
struct Tier {
  double hours;
  double points_per_hour;
};

using TierSchedule = std::vector<Tier>;

inline void check_schedule(const TierSchedule& tiers) {
  if (tiers.empty()) throw std::invalid_argument("piecewise cost: empty tier schedule");
  double prev_rate = kInf;
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    if (!(tiers[i].hours > 0.0)) throw std::invalid_argument("piecewise cost: tier hours must be positive");
    if (std::isinf(tiers[i].hours) && i + 1 != tiers.size())
      throw std::invalid_argument("piecewise cost: only the last tier may be unbounded");
    if (!(tiers[i].points_per_hour > 0.0))
      throw std::invalid_argument("piecewise cost: rates must be positive");
    if (!(tiers[i].points_per_hour < prev_rate))
      throw std::invalid_argument("piecewise cost: rates must be strictly decreasing");
    prev_rate = tiers[i].points_per_hour;
  }
}

/// The study schedule: 5 points/hour for four hours, then 2.5 for four hours,
/// then 1 point/hour without bound.
inline TierSchedule study_schedule() { return {{4.0, 5.0}, {4.0, 2.5}, {kInf, 1.0}}; }

inline double points_from_hours(const TierSchedule& tiers, double hours) {
  if (hours < 0.0) throw std::invalid_argument("points_from_hours: negative hours");
  double pts = 0.0;
  for (const Tier& t : tiers) {
    double h = std::min(hours, t.hours);
    pts += h * t.points_per_hour;
    hours -= h;
    if (hours <= 0.0) break;
  }
  return pts;
}

inline double max_points(const TierSchedule& tiers) {
  double pts = 0.0;
  for (const Tier& t : tiers) {
    if (std::isinf(t.hours)) return kInf;
    pts += t.hours * t.points_per_hour;
  }
  return pts;
}

/// Inverts the hours -> points map; throws when the improvement exceeds the
/// total attainable points of the schedule.
inline double hours_from_points(const TierSchedule& tiers, double points) {
  if (points < -1e-9) throw std::invalid_argument("hours_from_points: negative improvement");
  points = std::max(points, 0.0);
  double hours = 0.0;
  for (const Tier& t : tiers) {
    double cap = std::isinf(t.hours) ? kInf : t.hours * t.points_per_hour;
    if (points <= cap) return hours + points / t.points_per_hour;
    hours += t.hours;
    points -= cap;
  }
  if (points > 1e-9) throw std::invalid_argument("hours_from_points: improvement exceeds attainable points");
  return hours;
}

enum class CostKind { Norm2, QuadraticDiagonal, WeightedManhattan, PiecewiseLinear };

/// Budget semantics for the norm-2 family. The family's cost is the squared
/// norm, but the affordability band of the closed-form response is stated in
/// Euclidean distance; `Distance` (default) compares d <= B, `Squared`
/// compares d^2 <= B.
enum class Norm2Budget { Distance, Squared };

struct CostModel {
  CostKind kind = CostKind::Norm2;
  Vec coeffs;                          // quadratic / Manhattan
  std::vector<TierSchedule> schedules; // piecewise, one per feature
  Norm2Budget norm2_budget = Norm2Budget::Distance;

  static CostModel norm2(Norm2Budget b = Norm2Budget::Distance) {
    CostModel m;
    m.kind = CostKind::Norm2;
    m.norm2_budget = b;
    return m;
  }
  static CostModel quadratic(Vec c) {
    for (double v : c)
      if (!(v > 0.0)) throw std::invalid_argument("quadratic cost: coefficients must be positive");
    CostModel m;
    m.kind = CostKind::QuadraticDiagonal;
    m.coeffs = std::move(c);
    return m;
  }
  static CostModel manhattan(Vec c) {
    for (double v : c)
      if (!(v > 0.0)) throw std::invalid_argument("manhattan cost: coefficients must be positive");
    CostModel m;
    m.kind = CostKind::WeightedManhattan;
    m.coeffs = std::move(c);
    return m;
  }
  static CostModel piecewise(std::vector<TierSchedule> per_feature) {
    for (const auto& s : per_feature) check_schedule(s);
    if (per_feature.empty()) throw std::invalid_argument("piecewise cost: no features");
    CostModel m;
    m.kind = CostKind::PiecewiseLinear;
    m.schedules = std::move(per_feature);
    return m;
  }
  static CostModel piecewise_shared(const TierSchedule& tiers, std::size_t n_features) {
    return piecewise(std::vector<TierSchedule>(n_features, tiers));
  }

  bool analytic() const { return kind != CostKind::PiecewiseLinear; }

  void check_dim(std::size_t n) const {
    if (kind == CostKind::QuadraticDiagonal || kind == CostKind::WeightedManhattan) {
      if (coeffs.size() != n) throw std::invalid_argument("cost model: coefficient dimension mismatch");
    } else if (kind == CostKind::PiecewiseLinear) {
      if (schedules.size() != n) throw std::invalid_argument("cost model: schedule dimension mismatch");
    }
  }
};

/// c(x, x0). Norm-2 returns the squared norm (the objective form); for the
/// piecewise family the delta is read in improvement points and the cost is
/// hours, with negative changes rejected.
inline double cost(const Vec& x, const Vec& x0, const CostModel& m) {
  if (x.size() != x0.size()) throw std::invalid_argument("cost: dimension mismatch");
  m.check_dim(x.size());
  switch (m.kind) {
    case CostKind::Norm2: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - x0[i]) * (x[i] - x0[i]);
      return s;
    }
    case CostKind::QuadraticDiagonal: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += m.coeffs[i] * (x[i] - x0[i]) * (x[i] - x0[i]);
      return s;
    }
    case CostKind::WeightedManhattan: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += m.coeffs[i] * std::abs(x[i] - x0[i]);
      return s;
    }
    case CostKind::PiecewiseLinear: {
      double hours = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - x0[i];
        if (d < -1e-9) throw std::invalid_argument("piecewise cost: negative improvement not modeled");
        hours += hours_from_points(m.schedules[i], d);
      }
      return hours;
    }
  }
  throw std::logic_error("unreachable");
}

/// The budget-commensurate cost: what the agent's budget B is compared
/// against. It differs from cost() only for Norm2 under Distance semantics.
inline double budget_cost(const Vec& x, const Vec& x0, const CostModel& m) {
  if (m.kind == CostKind::Norm2 && m.norm2_budget == Norm2Budget::Distance)
    return std::sqrt(cost(x, x0, m));
  return cost(x, x0, m);
}

/// Width of the norm-2 affordability band in Euclidean distance.
inline double norm2_band(const CostModel& m, double B) {
  return m.norm2_budget == Norm2Budget::Distance ? B : std::sqrt(B);
}

/// Index with the best bang-for-the-buck min_i c_i / theta_i, ties broken by
/// lowest index. Components with theta_i = 0 are never selected unless all are.
inline std::size_t manhattan_best_feature(const Vec& coeffs, const Vec& theta) {
  std::size_t k = 0;
  double best = kInf;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i] <= 0.0) continue;
    double r = coeffs[i] / theta[i];
    if (r < best) {
      best = r;
      k = i;
    }
  }
  if (std::isinf(best)) throw std::domain_error("manhattan: all weights are zero");
  return k;
}

struct PiecewiseAllocation {
  Vec hours;
  Vec points;
  double spent = 0.0;
};

/// Greedy hour allocation: repeatedly assigns the current tier of the feature
/// with the highest marginal weighted gain weights_i * rate_i, re-evaluating
/// as tiers exhaust. Ties break by lowest index. Spends the whole budget
/// unless every schedule is exhausted.
inline PiecewiseAllocation piecewise_greedy_allocation(const Vec& weights,
                                                       const std::vector<TierSchedule>& schedules,
                                                       double budget_hours) {
  if (weights.size() != schedules.size())
    throw std::invalid_argument("piecewise greedy: dimension mismatch");
  const std::size_t n = weights.size();
  PiecewiseAllocation out;
  out.hours.assign(n, 0.0);
  out.points.assign(n, 0.0);
  std::vector<std::size_t> tier(n, 0);
  std::vector<double> into(n, 0.0);
  double remaining = budget_hours;
  while (remaining > 1e-12) {
    std::size_t pick = n;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (tier[i] >= schedules[i].size()) continue;
      double gain = weights[i] * schedules[i][tier[i]].points_per_hour;
      if (gain > best + 1e-15) {
        best = gain;
        pick = i;
      }
    }
    if (pick == n) break;  // every schedule exhausted
    const Tier& t = schedules[pick][tier[pick]];
    double cap = std::isinf(t.hours) ? remaining : t.hours - into[pick];
    double h = std::min(remaining, cap);
    out.hours[pick] += h;
    out.points[pick] += h * t.points_per_hour;
    into[pick] += h;
    remaining -= h;
    if (!std::isinf(t.hours) && into[pick] >= t.hours - 1e-12) {
      ++tier[pick];
      into[pick] = 0.0;
    }
  }
  out.spent = budget_hours - remaining;
  return out;
}

/// True iff the agent at x0 can reach the acceptance region of `c` within
/// budget B under cost model m, using the per-family closed-form condition.
inline bool affordable(const Vec& x0, const Classifier& c, const CostModel& m, double B) {
  if (B < 0.0) throw std::invalid_argument("affordable: negative budget");
  m.check_dim(x0.size());
  double gap = c.theta0 - dot(x0, c.theta);
  if (gap <= 0.0) return true;  // already accepted, zero cost
  switch (m.kind) {
    case CostKind::Norm2:
      return gap / c.norm() <= norm2_band(m, B);
    case CostKind::QuadraticDiagonal: {
      double S = 0.0;
      for (std::size_t i = 0; i < x0.size(); ++i) S += c.theta[i] * c.theta[i] / m.coeffs[i];
      if (S == 0.0) return false;
      return gap * gap / S <= B;
    }
    case CostKind::WeightedManhattan: {
      std::size_t k = manhattan_best_feature(m.coeffs, c.theta);
      return dot(x0, c.theta) + c.theta[k] / m.coeffs[k] * B >= c.theta0;
    }
    case CostKind::PiecewiseLinear: {
      auto alloc = piecewise_greedy_allocation(c.theta, m.schedules, B);
      return dot(x0, c.theta) + dot(alloc.points, c.theta) >= c.theta0;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace stratasim

#pragma once

// Agent best-response solvers: closed forms for the three analytic cost
// families, the tiered greedy for the piecewise cost, and population-level
// application against perceived classifiers.

#include <cstdlib>
#include <optional>
#include <thread>

#include "stratasim/bias.hpp"
#include "stratasim/costs.hpp"
#include "stratasim/model.hpp"

namespace stratasim {

struct AgentParams {
  double reward = kInf;  // +inf: any affordable crossing is worthwhile
  double budget = 0.0;
  CostModel cost_model;

  AgentParams() = default;
  AgentParams(double B, CostModel m, double r = kInf)
      : reward(r), budget(B), cost_model(std::move(m)) {
    if (!(reward > 0.0)) throw std::invalid_argument("AgentParams: reward must be positive");
    if (budget < 0.0) throw std::invalid_argument("AgentParams: budget must be nonnegative");
  }
};

struct ResponseOutcome {
  Vec x_post;
  Vec delta;
  double cost_incurred = 0.0;
  bool acted = false;
  bool accepted_true = false;
  bool accepted_perceived = false;
};

/// Per-(classifier, cost, budget) response machinery shared by the full
/// solvers and the firm's loss evaluation, so both paths make bit-identical
/// accept/act decisions. `target` is the classifier the agent responds to
/// (the perceived one for biased agents); `truth` scores the outcome.
struct ResponseKernel {
  CostKind kind = CostKind::Norm2;
  double budget = 0.0;
  Vec dir;                  // movement per unit target gap (analytic families)
  double kappa = 1.0;       // true-score gain per unit target gap
  double w_norm = 1.0;      // norm2
  double band = 0.0;        // norm2 distance band
  bool squared_budget = false;
  double S_w = 0.0;         // quadratic: sum w_i^2 / c_i
  std::size_t k = 0;        // manhattan pick
  double gap_limit = 0.0;   // manhattan: (w_k/c_k) B
  double cost_rate = 0.0;   // manhattan: c_k / w_k
  PiecewiseAllocation alloc;  // piecewise: fixed full-budget allocation
  double gain_true = 0.0, gain_perc = 0.0;

  static ResponseKernel make(const Vec& truth, const Vec& target, const CostModel& m, double B) {
    if (truth.size() != target.size()) throw std::invalid_argument("ResponseKernel: dimension mismatch");
    m.check_dim(target.size());
    if (B < 0.0) throw std::invalid_argument("ResponseKernel: negative budget");
    ResponseKernel kr;
    kr.kind = m.kind;
    kr.budget = B;
    const std::size_t n = target.size();
    switch (m.kind) {
      case CostKind::Norm2: {
        double nw2 = norm2sq(target);
        if (nw2 == 0.0) throw std::domain_error("ResponseKernel: zero-norm target weights");
        kr.w_norm = std::sqrt(nw2);
        kr.band = norm2_band(m, B);
        kr.squared_budget = m.norm2_budget == Norm2Budget::Squared;
        kr.kappa = dot(truth, target) / nw2;
        kr.dir.resize(n);
        for (std::size_t i = 0; i < n; ++i) kr.dir[i] = target[i] / nw2;
        break;
      }
      case CostKind::QuadraticDiagonal: {
        double S = 0.0, num = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          S += target[i] * target[i] / m.coeffs[i];
          num += truth[i] * target[i] / m.coeffs[i];
        }
        if (S == 0.0) throw std::domain_error("ResponseKernel: zero-norm target weights");
        kr.S_w = S;
        kr.kappa = num / S;
        kr.dir.resize(n);
        for (std::size_t i = 0; i < n; ++i) kr.dir[i] = target[i] / m.coeffs[i] / S;
        break;
      }
      case CostKind::WeightedManhattan: {
        kr.k = manhattan_best_feature(m.coeffs, target);
        kr.gap_limit = target[kr.k] / m.coeffs[kr.k] * B;
        kr.cost_rate = m.coeffs[kr.k] / target[kr.k];
        kr.kappa = truth[kr.k] / target[kr.k];
        kr.dir.assign(n, 0.0);
        kr.dir[kr.k] = 1.0 / target[kr.k];
        break;
      }
      case CostKind::PiecewiseLinear: {
        kr.alloc = piecewise_greedy_allocation(target, m.schedules, B);
        kr.gain_true = dot(truth, kr.alloc.points);
        kr.gain_perc = dot(target, kr.alloc.points);
        break;
      }
    }
    return kr;
  }

  /// Whether an agent with target-score gap `gap_w` acts. On-boundary agents
  /// (gap = 0) do not act; the piecewise study semantics spend the whole
  /// budget regardless of position.
  bool acts(double gap_w) const {
    switch (kind) {
      case CostKind::Norm2:
        return gap_w > 0.0 && gap_w / w_norm <= band;
      case CostKind::QuadraticDiagonal:
        return gap_w > 0.0 && gap_w * gap_w / S_w <= budget;
      case CostKind::WeightedManhattan:
        return gap_w > 0.0 && gap_w <= gap_limit;
      case CostKind::PiecewiseLinear:
        return alloc.spent > 0.0;
    }
    return false;
  }

  /// Budget-commensurate incurred cost of the move closing `gap_w`.
  double move_cost(double gap_w) const {
    switch (kind) {
      case CostKind::Norm2: {
        double d = gap_w / w_norm;
        return squared_budget ? d * d : d;
      }
      case CostKind::QuadraticDiagonal:
        return gap_w * gap_w / S_w;
      case CostKind::WeightedManhattan:
        return cost_rate * gap_w;
      case CostKind::PiecewiseLinear:
        return alloc.spent;
    }
    return 0.0;
  }

  /// True-classifier acceptance after the response, evaluated in gap space so
  /// boundary landings never flip on rounding. `gap_t` and `gap_w` are the
  /// true and target score gaps at x0.
  bool accepted_after(double gap_t, double gap_w) const {
    if (kind == CostKind::PiecewiseLinear) return gain_true >= gap_t;
    if (gap_t <= 0.0) return true;  // movement never lowers the score
    if (!acts(gap_w)) return false;
    return kappa * gap_w >= gap_t;
  }
};

namespace detail {

inline ResponseOutcome solve_against(const Vec& x0, const Classifier& target, const CostModel& m,
                                     double B) {
  ResponseOutcome out;
  out.x_post = x0;
  out.delta.assign(x0.size(), 0.0);
  ResponseKernel kr = ResponseKernel::make(target.theta, target.theta, m, B);
  double gap = target.theta0 - dot(x0, target.theta);
  if (m.kind == CostKind::PiecewiseLinear) {
    if (kr.acts(gap)) {
      out.acted = true;
      out.delta = kr.alloc.points;
      for (std::size_t i = 0; i < x0.size(); ++i) out.x_post[i] = x0[i] + out.delta[i];
      out.cost_incurred = kr.alloc.spent;
      out.accepted_perceived = gap <= 0.0 || kr.gain_perc >= gap;
    } else {
      out.accepted_perceived = classify(x0, target) == 1;
    }
    out.accepted_true = out.accepted_perceived;
    return out;
  }
  if (kr.acts(gap)) {
    out.acted = true;
    for (std::size_t i = 0; i < x0.size(); ++i) {
      out.delta[i] = gap * kr.dir[i];
      out.x_post[i] = x0[i] + out.delta[i];
    }
    out.cost_incurred = kr.move_cost(gap);
    out.accepted_perceived = true;  // lands on the target boundary
  } else {
    out.accepted_perceived = classify(x0, target) == 1;
  }
  out.accepted_true = out.accepted_perceived;
  return out;
}

}  // namespace detail

/// Euclidean projection onto the boundary when 0 < d <= B, else no action.
inline ResponseOutcome best_response_norm2(const Vec& x0, const Classifier& c, const AgentParams& p) {
  if (p.cost_model.kind != CostKind::Norm2)
    throw std::invalid_argument("best_response_norm2: cost model is not Norm2");
  return detail::solve_against(x0, c, p.cost_model, p.budget);
}

inline ResponseOutcome best_response_quadratic(const Vec& x0, const Classifier& c,
                                               const CostModel& m, double B) {
  if (m.kind != CostKind::QuadraticDiagonal)
    throw std::invalid_argument("best_response_quadratic: cost model is not QuadraticDiagonal");
  return detail::solve_against(x0, c, m, B);
}

inline ResponseOutcome best_response_manhattan(const Vec& x0, const Classifier& c,
                                               const CostModel& m, double B) {
  if (m.kind != CostKind::WeightedManhattan)
    throw std::invalid_argument("best_response_manhattan: cost model is not WeightedManhattan");
  return detail::solve_against(x0, c, m, B);
}

/// Greedy full-budget allocation by marginal weighted gain (study semantics:
/// no early stop at the boundary). Hours land in cost_incurred, points in delta.
inline ResponseOutcome best_response_piecewise(const Vec& x0, const Classifier& c,
                                               const CostModel& m, double B_hours) {
  if (m.kind != CostKind::PiecewiseLinear)
    throw std::invalid_argument("best_response_piecewise: cost model is not PiecewiseLinear");
  return detail::solve_against(x0, c, m, B_hours);
}

/// The classifier a biased agent responds to. In one dimension the weighting
/// acts on the threshold itself; otherwise on the cumulative feature weights.
inline Classifier perceived_classifier(const Classifier& truth, const WeightingFunction& wf,
                                       bool sort_descending = false) {
  if (wf.is_identity()) return truth;
  if (truth.dim() == 1) return Classifier(Vec{1.0}, perceived_threshold(truth.theta0, wf));
  return Classifier(perceived_weights(truth.theta, wf, sort_descending).w, truth.theta0);
}

/// Best response against the perceived classifier, scored against the true
/// one. With finite reward the agent additionally requires r >= cost.
inline ResponseOutcome respond(const Vec& x0, const Classifier& truth, const Classifier& perceived,
                               const AgentParams& p) {
  ResponseOutcome out = detail::solve_against(x0, perceived, p.cost_model, p.budget);
  if (out.acted && std::isfinite(p.reward) && out.cost_incurred > p.reward) {
    out = ResponseOutcome{};
    out.x_post = x0;
    out.delta.assign(x0.size(), 0.0);
    out.accepted_perceived = classify(x0, perceived) == 1;
  }
  if (out.acted) {
    ResponseKernel kr = ResponseKernel::make(truth.theta, perceived.theta, p.cost_model, p.budget);
    double gap_t = truth.theta0 - dot(x0, truth.theta);
    double gap_w = perceived.theta0 - dot(x0, perceived.theta);
    out.accepted_true = kr.accepted_after(gap_t, gap_w);
  } else {
    out.accepted_true = classify(x0, truth) == 1;
  }
  return out;
}

inline ResponseOutcome respond(const Vec& x0, const Classifier& truth, const WeightingFunction& wf,
                               const AgentParams& p) {
  return respond(x0, truth, perceived_classifier(truth, wf), p);
}

inline unsigned worker_count() {
  if (const char* env = std::getenv("STRATASIM_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Elementwise respond; outputs are order-stable with the input regardless of
/// the worker count.
template <typename AgentRange>
std::vector<ResponseOutcome> respond_population(const AgentRange& agents, const Classifier& truth,
                                                const WeightingFunction& wf, const AgentParams& p) {
  const Classifier perceived = perceived_classifier(truth, wf);
  std::vector<ResponseOutcome> out(agents.size());
  const unsigned workers = std::min<unsigned>(worker_count(), agents.size() ? agents.size() : 1);
  if (workers <= 1 || agents.size() < 2048) {
    for (std::size_t i = 0; i < agents.size(); ++i)
      out[i] = respond(agents[i].x0, truth, perceived, p);
    return out;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (agents.size() + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    std::size_t lo = t * chunk, hi = std::min(agents.size(), lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = respond(agents[i].x0, truth, perceived, p);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace stratasim

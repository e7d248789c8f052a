#pragma once

// Firm-side loss evaluation, threshold optimization under three awareness
// modes, the loss-comparison condition checks, welfare accounting, and the
// social-burden measure.

#include <atomic>

#include "stratasim/analysis.hpp"
#include "stratasim/population.hpp"
#include "stratasim/response.hpp"

namespace stratasim {

struct LossSpec {
  double u_plus = 1.0;
  double u_minus = 1.0;

  LossSpec() = default;
  LossSpec(double up, double um) : u_plus(up), u_minus(um) {
    if (!(u_plus > 0.0) || !(u_minus > 0.0))
      throw std::invalid_argument("LossSpec: weights must be positive");
  }
};

struct LossResult {
  double sum = 0.0;
  double mean = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t n = 0;
};

inline LossResult loss_from_counts(std::size_t tp, std::size_t fp, std::size_t n, const LossSpec& ls) {
  LossResult r;
  r.true_positives = tp;
  r.false_positives = fp;
  r.n = n;
  r.sum = -ls.u_plus * static_cast<double>(tp) + ls.u_minus * static_cast<double>(fp);
  r.mean = n ? r.sum / static_cast<double>(n) : 0.0;
  return r;
}

/// Loss of a post-strategic population: -u+ per accepted qualified agent,
/// +u- per accepted unqualified one.
inline LossResult empirical_loss(const Population& pop_post, const Classifier& c, const LossSpec& ls) {
  std::size_t tp = 0, fp = 0;
  for (const auto& a : pop_post) {
    if (classify(a.x0, c)) (a.y == 1 ? tp : fp)++;
  }
  return loss_from_counts(tp, fp, pop_post.size(), ls);
}

enum class DeploymentMode { Oblivious, AwareRational, AwareBiased };

inline const char* to_string(DeploymentMode m) {
  switch (m) {
    case DeploymentMode::Oblivious: return "oblivious";
    case DeploymentMode::AwareRational: return "aware_rational";
    case DeploymentMode::AwareBiased: return "aware_biased";
  }
  return "?";
}

namespace detail {

/// Post-response acceptance for one agent in gap space, including the
/// finite-reward opt-out. Mirrors respond() decision for decision.
inline bool accepted_after_response(const ResponseKernel& kr, double gap_t, double gap_w,
                                    double reward) {
  bool acts = kr.acts(gap_w);
  if (acts && std::isfinite(reward) && kr.move_cost(gap_w) > reward) acts = false;
  if (!acts) return gap_t <= 0.0;
  return kr.accepted_after(gap_t, gap_w);
}

}  // namespace detail

/// Expected loss when the firm deploys `deployed` and agents best-respond to
/// its perceived counterpart. Identity weighting yields the rational loss.
inline LossResult loss_under_response(const Population& pop, const Classifier& deployed,
                                      const WeightingFunction& wf, const AgentParams& params,
                                      const LossSpec& ls) {
  const Classifier perceived = perceived_classifier(deployed, wf);
  const bool same = wf.is_identity();
  ResponseKernel kr =
      ResponseKernel::make(deployed.theta, perceived.theta, params.cost_model, params.budget);
  std::size_t tp = 0, fp = 0;
  for (const auto& agent : pop) {
    double a = dot(agent.x0, deployed.theta);
    double b = same ? a : dot(agent.x0, perceived.theta);
    if (detail::accepted_after_response(kr, deployed.theta0 - a, perceived.theta0 - b, params.reward))
      (agent.y == 1 ? tp : fp)++;
  }
  return loss_from_counts(tp, fp, pop.size(), ls);
}

struct SearchSpec {
  std::size_t theta_steps = 181;
  std::size_t theta0_steps = 201;
  double theta0_min = std::numeric_limits<double>::quiet_NaN();
  double theta0_max = std::numeric_limits<double>::quiet_NaN();
  std::size_t max_passes = 8;  // coordinate descent, n >= 3
};

struct GridEval {
  Vec theta;
  double theta0 = 0.0;
  double loss = 0.0;
};

struct OptimizeResult {
  Classifier classifier;
  LossResult loss;
  std::vector<GridEval> grid;
};

namespace detail {

struct GridBest {
  double loss = kInf;
  double theta0 = kInf;
  Vec theta;
  bool valid = false;
};

inline bool better(double loss, double theta0, const Vec& theta, const GridBest& cur) {
  if (!cur.valid) return true;
  if (loss != cur.loss) return loss < cur.loss;
  if (theta0 != cur.theta0) return theta0 < cur.theta0;
  return theta < cur.theta;  // lexicographic
}

/// Per-agent scores against a fixed theta; sweeping theta0 is then O(n) per
/// value with no further dot products.
struct ThetaScores {
  Vec a;  // deployed scores
  Vec b;  // perceived scores (== a for identity / oblivious)
  std::vector<int> y;
};

inline ThetaScores make_scores(const Population& pop, const Vec& theta, const Vec& w, bool same) {
  ThetaScores s;
  s.a.resize(pop.size());
  s.b.resize(pop.size());
  s.y.resize(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    double a = dot(pop[i].x0, theta);
    s.a[i] = a;
    s.b[i] = same ? a : dot(pop[i].x0, w);
    s.y[i] = pop[i].y;
  }
  return s;
}

}  // namespace detail

/// Evaluates the mode's loss at one (theta, theta0) grid point.
inline double grid_loss(const Population& pop, const Vec& theta, double theta0, DeploymentMode mode,
                        const WeightingFunction& wf, const AgentParams& params, const LossSpec& ls) {
  Classifier c(theta, theta0);
  if (mode == DeploymentMode::Oblivious) return empirical_loss(pop, c, ls).sum;
  const WeightingFunction& eff = mode == DeploymentMode::AwareRational
                                     ? WeightingFunction::identity()
                                     : wf;
  return loss_under_response(pop, c, eff, params, ls).sum;
}

/// Grid minimizer of the mode's loss with one half-step refinement pass.
/// Ties break by smallest theta0, then lexicographically smallest theta.
inline OptimizeResult optimize_threshold(const Population& pop, DeploymentMode mode,
                                         const WeightingFunction& wf, const AgentParams& params,
                                         const LossSpec& ls, const SearchSpec& search) {
  if (pop.empty()) throw std::invalid_argument("optimize_threshold: empty population");
  if (search.theta_steps < 2 && pop[0].x0.size() > 1)
    throw std::invalid_argument("optimize_threshold: empty theta grid");
  if (search.theta0_steps < 1) throw std::invalid_argument("optimize_threshold: empty theta0 grid");
  const std::size_t dim = pop[0].x0.size();

  double lo = search.theta0_min, hi = search.theta0_max;
  if (std::isnan(lo) || std::isnan(hi)) {
    double fmin = kInf, fmax = -kInf;
    for (const auto& a : pop)
      for (double v : a.x0) {
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
      }
    if (std::isnan(lo)) lo = fmin;
    if (std::isnan(hi)) hi = fmax;
  }
  const std::size_t t0n = search.theta0_steps;
  auto theta0_at = [&](std::size_t j) {
    return t0n == 1 ? lo : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(t0n - 1);
  };

  const bool oblivious = mode == DeploymentMode::Oblivious;
  const WeightingFunction eff = mode == DeploymentMode::AwareBiased ? wf : WeightingFunction::identity();

  std::vector<GridEval> grid;
  detail::GridBest best;

  // theta0-sweep for one theta; returns losses for every theta0 grid value.
  auto sweep = [&](const Vec& theta, std::vector<double>& out) {
    bool same = oblivious || eff.is_identity() || dim == 1;
    Vec w = (same || dim == 1) ? theta : perceived_weights(theta, eff).w;
    detail::ThetaScores sc = detail::make_scores(pop, theta, w, same);
    ResponseKernel kr = ResponseKernel::make(theta, w, params.cost_model, params.budget);
    out.resize(t0n);
    const bool biased_1d = dim == 1 && !oblivious && !eff.is_identity();
    for (std::size_t j = 0; j < t0n; ++j) {
      double theta0 = theta0_at(j);
      double theta0_perc = biased_1d ? perceived_threshold(theta0, eff) : theta0;
      std::size_t tp = 0, fp = 0;
      for (std::size_t i = 0; i < sc.a.size(); ++i) {
        bool acc = oblivious
                       ? sc.a[i] >= theta0
                       : detail::accepted_after_response(kr, theta0 - sc.a[i],
                                                         theta0_perc - sc.b[i], params.reward);
        if (acc) (sc.y[i] == 1 ? tp : fp)++;
      }
      out[j] = -ls.u_plus * static_cast<double>(tp) + ls.u_minus * static_cast<double>(fp);
    }
  };

  auto consider = [&](const Vec& theta, std::vector<double>& losses) {
    for (std::size_t j = 0; j < t0n; ++j) {
      grid.push_back({theta, theta0_at(j), losses[j]});
      if (detail::better(losses[j], theta0_at(j), theta, best)) {
        best = {losses[j], theta0_at(j), theta, true};
      }
    }
  };

  auto theta_candidates_2d = [&](std::size_t steps) {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < steps; ++i) {
      double t1 = static_cast<double>(i) / static_cast<double>(steps - 1);
      out.push_back(Vec{t1, 1.0 - t1});
    }
    return out;
  };

  if (dim == 1) {
    std::vector<double> losses;
    Vec theta{1.0};
    sweep(theta, losses);
    consider(theta, losses);
  } else if (dim == 2) {
    auto cands = theta_candidates_2d(search.theta_steps);
    std::vector<std::vector<double>> all(cands.size());
    const unsigned workers = std::min<unsigned>(worker_count(), cands.size());
    if (workers <= 1) {
      for (std::size_t i = 0; i < cands.size(); ++i) sweep(cands[i], all[i]);
    } else {
      std::vector<std::thread> pool;
      std::atomic<std::size_t> next{0};
      for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < cands.size(); i = next++) sweep(cands[i], all[i]);
        });
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < cands.size(); ++i) consider(cands[i], all[i]);
  } else {
    // Coordinate descent on the simplex over the same grids.
    Vec theta(dim, 1.0 / static_cast<double>(dim));
    std::vector<double> losses;
    sweep(theta, losses);
    consider(theta, losses);
    for (std::size_t pass = 0; pass < search.max_passes; ++pass) {
      detail::GridBest before = best;
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t gidx = 0; gidx < search.theta_steps; ++gidx) {
          double g = static_cast<double>(gidx) / static_cast<double>(search.theta_steps - 1);
          Vec cand = best.theta.empty() ? theta : best.theta;
          double rest = 0.0;
          for (std::size_t j = 0; j < dim; ++j)
            if (j != i) rest += cand[j];
          Vec next(dim);
          for (std::size_t j = 0; j < dim; ++j) {
            if (j == i)
              next[j] = g;
            else
              next[j] = rest > 0.0 ? (1.0 - g) * cand[j] / rest
                                   : (1.0 - g) / static_cast<double>(dim - 1);
          }
          sweep(next, losses);
          consider(next, losses);
        }
      }
      if (best.loss == before.loss && best.theta == before.theta && best.theta0 == before.theta0)
        break;
    }
  }

  // One refinement round at half grid steps around the incumbent.
  double h0 = t0n > 1 ? (hi - lo) / static_cast<double>(t0n - 1) : 0.0;
  std::vector<Vec> ref_thetas;
  if (dim == 1) {
    ref_thetas.push_back(best.theta);
  } else if (dim == 2) {
    double ht = 1.0 / static_cast<double>(search.theta_steps - 1);
    double t1 = best.theta[0];
    for (double cand : {t1 - 0.5 * ht, t1, t1 + 0.5 * ht}) {
      double c1 = std::clamp(cand, 0.0, 1.0);
      ref_thetas.push_back(Vec{c1, 1.0 - c1});
    }
  } else {
    ref_thetas.push_back(best.theta);
    double ht = 1.0 / static_cast<double>(search.theta_steps - 1);
    for (std::size_t i = 0; i < dim; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        Vec cand = best.theta;
        cand[i] = std::clamp(cand[i] + sgn * 0.5 * ht, 0.0, 1.0);
        double sum = 0.0;
        for (double v : cand) sum += v;
        if (sum <= 0.0) continue;
        for (double& v : cand) v /= sum;
        ref_thetas.push_back(cand);
      }
    }
  }
  detail::GridBest refined = best;
  for (const Vec& th : ref_thetas) {
    for (double t0 : {best.theta0 - 0.5 * h0, best.theta0, best.theta0 + 0.5 * h0}) {
      double L = grid_loss(pop, th, t0, mode, wf, params, ls);
      grid.push_back({th, t0, L});
      if (detail::better(L, t0, th, refined)) refined = {L, t0, th, true};
    }
  }

  OptimizeResult res;
  res.classifier = Classifier(refined.theta, refined.theta0);
  const WeightingFunction& final_wf =
      mode == DeploymentMode::AwareBiased ? wf : WeightingFunction::identity();
  res.loss = mode == DeploymentMode::Oblivious
                 ? empirical_loss(pop, res.classifier, ls)
                 : loss_under_response(pop, res.classifier, final_wf, params, ls);
  res.grid = std::move(grid);
  return res;
}

struct Prop2Side {
  double lhs = 0.0, rhs = 0.0;
  double lhs_se = 0.0, rhs_se = 0.0;
  bool condition_holds = false;
  bool ordering_observed = false;
};

struct Prop2Report {
  Prop2Side a, b, c;
  double loss_rational = 0.0;    // L(theta_NB, (theta_NB, .))
  double loss_b_unaware = 0.0;   // L(w(theta_NB), (theta_NB, .))
  double loss_b_aware = 0.0;     // L(w(theta_B), (theta_B, .))
};

namespace detail {

inline double se_of_sum(const Vec& contributions) {
  const std::size_t n = contributions.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : contributions) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : contributions) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * static_cast<double>(n) / static_cast<double>(n - 1));
}

}  // namespace detail

/// Empirical estimates of the loss-comparison conditions over the S and
/// T1/T2 sets, alongside whether each implied loss ordering holds for the
/// same population. Integral sides carry standard errors of the count sums.
inline Prop2Report prop2_condition_check(const Population& pop, const Classifier& nb_c,
                                         const Classifier& b_c, const WeightingFunction& wf,
                                         const AgentParams& params, const LossSpec& ls) {
  Prop2Report rep;
  Vec s_q, s_u, t1_v, t2_v;
  s_q.reserve(pop.size());
  s_u.reserve(pop.size());
  for (const auto& agent : pop) {
    SetMembership m = set_memberships(agent.x0, nb_c, b_c, wf, params.budget);
    s_q.push_back(m.in_S && agent.y == 1 ? ls.u_plus : 0.0);
    s_u.push_back(m.in_S && agent.y == 0 ? ls.u_minus : 0.0);
    double contrib = agent.y == 1 ? -ls.u_plus : ls.u_minus;
    t1_v.push_back(m.in_T1 ? contrib : 0.0);
    t2_v.push_back(m.in_T2 ? contrib : 0.0);
  }
  double sum_q = 0.0, sum_u = 0.0, sum_t1 = 0.0, sum_t2 = 0.0;
  for (double v : s_q) sum_q += v;
  for (double v : s_u) sum_u += v;
  for (double v : t1_v) sum_t1 += v;
  for (double v : t2_v) sum_t2 += v;

  rep.loss_rational = loss_under_response(pop, nb_c, WeightingFunction::identity(), params, ls).sum;
  rep.loss_b_unaware = loss_under_response(pop, nb_c, wf, params, ls).sum;
  rep.loss_b_aware = loss_under_response(pop, b_c, wf, params, ls).sum;

  rep.a.lhs = sum_u;
  rep.a.rhs = sum_q;
  rep.a.lhs_se = detail::se_of_sum(s_u);
  rep.a.rhs_se = detail::se_of_sum(s_q);
  rep.a.condition_holds = rep.a.lhs <= rep.a.rhs;
  rep.a.ordering_observed =
      rep.loss_b_aware <= rep.loss_b_unaware && rep.loss_b_unaware <= rep.loss_rational;

  rep.b.lhs = sum_q;
  rep.b.rhs = sum_u;
  rep.b.lhs_se = rep.a.rhs_se;
  rep.b.rhs_se = rep.a.lhs_se;
  rep.b.condition_holds = rep.b.lhs <= rep.b.rhs;
  rep.b.ordering_observed =
      std::max(rep.loss_rational, rep.loss_b_aware) <= rep.loss_b_unaware;

  rep.c.lhs = sum_t1;
  rep.c.rhs = sum_t2;
  rep.c.lhs_se = detail::se_of_sum(t1_v);
  rep.c.rhs_se = detail::se_of_sum(t2_v);
  rep.c.condition_holds = rep.c.lhs <= rep.c.rhs;
  rep.c.ordering_observed =
      rep.loss_rational <= rep.loss_b_aware && rep.loss_b_aware <= rep.loss_b_unaware;
  return rep;
}

struct WelfareReport {
  double total_biased_by_label[2] = {0.0, 0.0};
  double total_rational_by_label[2] = {0.0, 0.0};
  Vec delta;  // biased minus rational, per agent
  std::size_t green = 0, red = 0, neutral = 0;
};

/// Per-agent utility r * accepted_true - cost under the rational deployment
/// (identity response to c_rational) versus the biased one (weighted response
/// to c_biased). Pass the same classifier twice for oblivious comparisons.
inline WelfareReport welfare(const Population& pop, const Classifier& c_rational,
                             const Classifier& c_biased, const WeightingFunction& wf,
                             const AgentParams& params) {
  if (!std::isfinite(params.reward))
    throw std::invalid_argument("welfare: requires a finite reward");
  const Classifier perc_b = perceived_classifier(c_biased, wf);
  WelfareReport rep;
  rep.delta.reserve(pop.size());
  for (const auto& agent : pop) {
    ResponseOutcome r = respond(agent.x0, c_rational, c_rational, params);
    ResponseOutcome b = respond(agent.x0, c_biased, perc_b, params);
    double ur = params.reward * (r.accepted_true ? 1.0 : 0.0) - r.cost_incurred;
    double ub = params.reward * (b.accepted_true ? 1.0 : 0.0) - b.cost_incurred;
    rep.total_rational_by_label[agent.y] += ur;
    rep.total_biased_by_label[agent.y] += ub;
    double d = ub - ur;
    rep.delta.push_back(d);
    if (d > 1e-12)
      ++rep.green;
    else if (d < -1e-12)
      ++rep.red;
    else
      ++rep.neutral;
  }
  return rep;
}

/// Minimum budget-commensurate cost for one agent to reach acceptance.
inline double min_cost_to_acceptance(const Vec& x0, const Classifier& c, const CostModel& m) {
  double gap = c.theta0 - dot(x0, c.theta);
  if (gap <= 0.0) return 0.0;
  switch (m.kind) {
    case CostKind::Norm2: {
      double d = gap / c.norm();
      return m.norm2_budget == Norm2Budget::Distance ? d : d * d;
    }
    case CostKind::QuadraticDiagonal: {
      double S = 0.0;
      for (std::size_t i = 0; i < x0.size(); ++i) S += c.theta[i] * c.theta[i] / m.coeffs[i];
      return gap * gap / S;
    }
    case CostKind::WeightedManhattan: {
      std::size_t k = manhattan_best_feature(m.coeffs, c.theta);
      return m.coeffs[k] / c.theta[k] * gap;
    }
    case CostKind::PiecewiseLinear: {
      // Early-stopping greedy: hours until the weighted gain closes the gap.
      const std::size_t n = x0.size();
      std::vector<std::size_t> tier(n, 0);
      Vec into(n, 0.0);
      double hours = 0.0, left = gap;
      while (left > 0.0) {
        std::size_t pick = n;
        double bestg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (tier[i] >= m.schedules[i].size() || c.theta[i] <= 0.0) continue;
          double g = c.theta[i] * m.schedules[i][tier[i]].points_per_hour;
          if (g > bestg + 1e-15) {
            bestg = g;
            pick = i;
          }
        }
        if (pick == n) return kInf;  // schedules exhausted before the boundary
        const Tier& t = m.schedules[pick][tier[pick]];
        double cap_hours = std::isinf(t.hours) ? kInf : t.hours - into[pick];
        double need_hours = left / bestg;
        double h = std::min(need_hours, cap_hours);
        hours += h;
        left -= h * bestg;
        into[pick] += h;
        if (!std::isinf(t.hours) && into[pick] >= t.hours - 1e-12) {
          ++tier[pick];
          into[pick] = 0.0;
        }
        if (h == need_hours) break;
      }
      return hours;
    }
  }
  throw std::logic_error("unreachable");
}

/// Mean minimum cost to acceptance over the given (qualified) agents.
inline double social_burden(const Population& pop_qualified, const Classifier& c, const CostModel& m) {
  if (pop_qualified.empty()) return 0.0;
  double total = 0.0;
  for (const auto& a : pop_qualified) total += min_cost_to_acceptance(a.x0, c, m);
  return total / static_cast<double>(pop_qualified.size());
}

}  // namespace stratasim

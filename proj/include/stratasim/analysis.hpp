#pragma once

// Region taxonomy of biased-vs-rational responses, investment comparisons,
// and the set memberships behind the firm loss comparisons.

#include "stratasim/response.hpp"

namespace stratasim {

/// Mutually exclusive tags over the feature space for a fixed classifier,
/// bias, cost family and budget. R1-R6 are the six discrepancy regions; the
/// remaining tags cover agents whose biased and rational outcomes agree.
/// Agents who act in neither model map to AcceptedBoth when truly accepted
/// and UnreachableBoth otherwise (covers the corner cases truly-accepted /
/// perceived-unreachable and truly-unreachable / perceived-accepted).
enum class RegionTag {
  AcceptedBoth,
  UnreachableBoth,
  R1_BelieveAccepted,
  R2_FutileEffort,
  R3_Undershoot,
  R4_Overshoot,
  R5_NeedlessEffort,
  R6_BelieveUnreachable,
  AgreeAct,
};

inline const char* to_string(RegionTag t) {
  switch (t) {
    case RegionTag::AcceptedBoth: return "accepted_both";
    case RegionTag::UnreachableBoth: return "unreachable_both";
    case RegionTag::R1_BelieveAccepted: return "r1_believe_accepted";
    case RegionTag::R2_FutileEffort: return "r2_futile_effort";
    case RegionTag::R3_Undershoot: return "r3_undershoot";
    case RegionTag::R4_Overshoot: return "r4_overshoot";
    case RegionTag::R5_NeedlessEffort: return "r5_needless_effort";
    case RegionTag::R6_BelieveUnreachable: return "r6_believe_unreachable";
    case RegionTag::AgreeAct: return "agree_act";
  }
  return "?";
}

namespace detail {

enum class BandState { Accepted, InBand, Unreachable };

inline BandState band_state(const Vec& x0, const Classifier& c, const CostModel& m, double B) {
  double gap = c.theta0 - dot(x0, c.theta);
  if (gap <= 0.0) return BandState::Accepted;
  return affordable(x0, c, m, B) ? BandState::InBand : BandState::Unreachable;
}

}  // namespace detail

/// Maps an agent to its discrepancy region under an analytic cost family.
inline RegionTag classify_region(const Vec& x0, const Classifier& truth, const WeightingFunction& wf,
                                 const CostModel& m, double B) {
  if (!m.analytic()) throw std::invalid_argument("classify_region: unsupported cost family");
  const Classifier perceived = perceived_classifier(truth, wf);
  using detail::BandState;
  BandState ts = detail::band_state(x0, truth, m, B);
  BandState ps = detail::band_state(x0, perceived, m, B);
  if (ts == BandState::InBand && ps == BandState::Accepted) return RegionTag::R1_BelieveAccepted;
  if (ts == BandState::InBand && ps == BandState::Unreachable) return RegionTag::R6_BelieveUnreachable;
  if (ts == BandState::Unreachable && ps == BandState::InBand) return RegionTag::R2_FutileEffort;
  if (ts == BandState::Accepted && ps == BandState::InBand) return RegionTag::R5_NeedlessEffort;
  if (ts == BandState::InBand && ps == BandState::InBand) {
    AgentParams p(B, m);
    ResponseOutcome biased = respond(x0, truth, perceived, p);
    if (!biased.accepted_true) return RegionTag::R3_Undershoot;
    ResponseOutcome rational = respond(x0, truth, truth, p);
    if (biased.cost_incurred > rational.cost_incurred + 1e-9) return RegionTag::R4_Overshoot;
    return RegionTag::AgreeAct;
  }
  // No action in either model; outcome agrees with the rational one.
  return ts == BandState::Accepted ? RegionTag::AcceptedBoth : RegionTag::UnreachableBoth;
}

/// H-set membership: (1 - sigma) theta0 <= (theta - sigma w)^T x. Agents in H
/// cross the true boundary under the biased move, given enough budget.
inline bool in_H(const Vec& x0, const Vec& theta, double theta0, const Vec& w) {
  double s = sigma(theta, w);
  double lhs = (1.0 - s) * theta0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) rhs += (theta[i] - s * w[i]) * x0[i];
  return lhs <= rhs;
}

struct SetMembership {
  bool in_A = false;
  bool in_H = false;
  bool in_S = false;
  bool in_T1 = false;
  bool in_T2 = false;
};

/// Memberships in the loss-comparison sets, with A(theta, theta0) the score
/// band {theta0 - B <= theta^T x0 < theta0} and the displayed set algebra
/// S = A \ (A ∩ H), T1 = (Y ∪ A) ∩ N, T2 = (H ∩ A(w)) ∪ ((Y ∩ N) \ A).
inline SetMembership set_memberships(const Vec& x0, const Classifier& nb_c, const Classifier& b_c,
                                     const WeightingFunction& wf, double B) {
  const Vec w_nb = perceived_classifier(nb_c, wf).theta;
  const Vec w_b = perceived_classifier(b_c, wf).theta;
  SetMembership out;
  double s_nb = dot(x0, nb_c.theta);
  double s_b = dot(x0, b_c.theta);
  out.in_A = nb_c.theta0 - B <= s_nb && s_nb < nb_c.theta0;
  out.in_H = in_H(x0, nb_c.theta, nb_c.theta0, w_nb);
  out.in_S = out.in_A && !out.in_H;
  bool Y_nb = s_nb >= nb_c.theta0;
  bool Y_b = s_b >= b_c.theta0;
  out.in_T1 = (Y_nb || out.in_A) && !Y_b;
  double s_wb = dot(x0, w_b);
  bool A_wb = b_c.theta0 - B <= s_wb && s_wb < b_c.theta0;
  bool H_b = in_H(x0, b_c.theta, b_c.theta0, w_b);
  out.in_T2 = (H_b && A_wb) || ((Y_b && !Y_nb) && !out.in_A);
  return out;
}

/// Two-dimensional boundary-difference score: zero when the true and
/// perceived boundaries coincide, and zero on their intersection. `theta`
/// and `w_theta` are the first-feature weights (the second being their
/// complements).
inline double xi(const Vec& x, double theta, double w_theta, double theta0) {
  if (x.size() != 2) throw std::invalid_argument("xi: two features required");
  double nt2 = theta * theta + (1.0 - theta) * (1.0 - theta);
  double nw2 = w_theta * w_theta + (1.0 - w_theta) * (1.0 - w_theta);
  return (theta / nt2 - w_theta / nw2) * x[0] +
         ((1.0 - theta) / nt2 - (1.0 - w_theta) / nw2) * x[1] -
         (1.0 / nt2 - 1.0 / nw2) * theta0;
}

enum class InvestVerdict { Under, Over, Equal };

inline const char* to_string(InvestVerdict v) {
  switch (v) {
    case InvestVerdict::Under: return "under";
    case InvestVerdict::Over: return "over";
    case InvestVerdict::Equal: return "equal";
  }
  return "?";
}

/// Per-feature investment comparison between the rational and biased
/// responses, with the over/under-investment premises. Distances are
/// Euclidean; the weight comparisons are taken on the unit-normalized
/// directions, the form under which boundary-projection responses satisfy
/// the premises' conclusions exactly.
struct InvestmentReport {
  Vec delta_nb;
  Vec delta_b;
  std::vector<InvestVerdict> verdicts;
  std::vector<bool> premise1;  // d_w <= d and hat_w_i < hat_theta_i
  std::vector<bool> premise2;  // d <= d_w and hat_theta_i < hat_w_i
  bool premise3 = false;       // Prelec: d <= K d_w and hat_w at theta_max below hat_theta
  double prelec_factor = 0.0;  // K = exp(gamma^{1/(1-gamma)} - gamma^{gamma/(1-gamma)})
  bool both_acted = false;
};

inline double prelec_overinvest_factor(double gamma) {
  if (!(gamma > 0.0) || gamma == 1.0)
    throw std::domain_error("prelec factor: gamma must be positive and != 1");
  return std::exp(std::pow(gamma, 1.0 / (1.0 - gamma)) - std::pow(gamma, gamma / (1.0 - gamma)));
}

inline InvestmentReport investment_report(const Vec& x0, const Classifier& truth,
                                          const WeightingFunction& wf, const CostModel& m, double B) {
  if (!m.analytic()) throw std::invalid_argument("investment_report: analytic cost families only");
  const Classifier perceived = perceived_classifier(truth, wf);
  AgentParams p(B, m);
  ResponseOutcome rational = respond(x0, truth, truth, p);
  ResponseOutcome biased = respond(x0, truth, perceived, p);
  const std::size_t n = x0.size();
  InvestmentReport rep;
  rep.delta_nb = rational.delta;
  rep.delta_b = biased.delta;
  rep.both_acted = rational.acted && biased.acted;
  rep.verdicts.resize(n);
  rep.premise1.assign(n, false);
  rep.premise2.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double diff = biased.delta[i] - rational.delta[i];
    rep.verdicts[i] = diff < -1e-9 ? InvestVerdict::Under
                     : diff > 1e-9 ? InvestVerdict::Over
                                   : InvestVerdict::Equal;
  }
  double d_t = signed_distance(x0, truth);
  double d_w = signed_distance(x0, perceived);
  double nt = truth.norm();
  double nw = std::sqrt(norm2sq(perceived.theta));
  for (std::size_t i = 0; i < n; ++i) {
    double th_hat = truth.theta[i] / nt;
    double w_hat = perceived.theta[i] / nw;
    rep.premise1[i] = d_w <= d_t && w_hat < th_hat;
    rep.premise2[i] = d_t <= d_w && th_hat < w_hat;
  }
  if (wf.kind == WeightingKind::Prelec && wf.gamma != 1.0) {
    rep.prelec_factor = prelec_overinvest_factor(wf.gamma);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (truth.theta[i] > truth.theta[imax]) imax = i;
    rep.premise3 = d_t <= rep.prelec_factor * d_w &&
                   perceived.theta[imax] / nw < truth.theta[imax] / nt;
  }
  return rep;
}

}  // namespace stratasim

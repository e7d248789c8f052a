#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "stratasim/analysis.hpp"

using namespace stratasim;

namespace {

const Classifier kC({0.6, 0.4}, 1.0);
const WeightingFunction kGamma05 = WeightingFunction::prelec(0.5);

}  // namespace

TEST_CASE("region examples from the six-region taxonomy") {
  CostModel m = CostModel::norm2();
  CHECK(classify_region({-0.5, 2.6}, kC, kGamma05, m, 1.0) == RegionTag::R1_BelieveAccepted);
  CHECK(classify_region({2.2, -0.2}, kC, kGamma05, m, 1.0) == RegionTag::R5_NeedlessEffort);
  CHECK(classify_region({5.0, 5.0}, kC, kGamma05, m, 1.0) == RegionTag::AcceptedBoth);
  CHECK(classify_region({-9.0, -9.0}, kC, kGamma05, m, 1.0) == RegionTag::UnreachableBoth);
}

TEST_CASE("identity bias never produces discrepancy regions") {
  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> ux(-3.0, 4.0);
  CostModel m = CostModel::norm2();
  for (int i = 0; i < 20000; ++i) {
    RegionTag tag = classify_region({ux(gen), ux(gen)}, kC, WeightingFunction::identity(), m, 1.0);
    bool agree = tag == RegionTag::AcceptedBoth || tag == RegionTag::UnreachableBoth ||
                 tag == RegionTag::AgreeAct;
    CHECK(agree);
  }
}

TEST_CASE("region tags are consistent with the actual responses") {
  std::mt19937_64 gen(52);
  std::uniform_real_distribution<double> ux(-3.0, 4.0);
  std::uniform_real_distribution<double> ug(0.2, 0.95);
  AgentParams p(1.0, CostModel::norm2());
  std::map<RegionTag, int> counts;
  for (int i = 0; i < 20000; ++i) {
    Vec x0{ux(gen), ux(gen)};
    auto wf = WeightingFunction::prelec(ug(gen));
    RegionTag tag = classify_region(x0, kC, wf, p.cost_model, p.budget);
    ++counts[tag];
    auto biased = respond(x0, kC, wf, p);
    auto rational = respond(x0, kC, WeightingFunction::identity(), p);
    switch (tag) {
      case RegionTag::R1_BelieveAccepted:
      case RegionTag::R6_BelieveUnreachable:
        CHECK(rational.acted);
        CHECK_FALSE(biased.acted);
        break;
      case RegionTag::R2_FutileEffort:
        CHECK_FALSE(rational.acted);
        CHECK(biased.acted);
        CHECK_FALSE(biased.accepted_true);
        break;
      case RegionTag::R5_NeedlessEffort:
        CHECK_FALSE(rational.acted);
        CHECK(biased.acted);
        CHECK(biased.accepted_true);
        break;
      case RegionTag::R3_Undershoot:
        CHECK(biased.acted);
        CHECK_FALSE(biased.accepted_true);
        CHECK(rational.accepted_true);
        break;
      case RegionTag::R4_Overshoot:
        CHECK(biased.accepted_true);
        CHECK(biased.cost_incurred > rational.cost_incurred + 1e-9);
        break;
      case RegionTag::AgreeAct:
        CHECK(biased.acted);
        CHECK(rational.acted);
        break;
      case RegionTag::AcceptedBoth:
        CHECK(rational.accepted_true);
        CHECK_FALSE(biased.acted);
        break;
      case RegionTag::UnreachableBoth:
        CHECK_FALSE(rational.accepted_true);
        CHECK_FALSE(biased.acted);
        break;
    }
  }
  // the sampling box covers every discrepancy region
  CHECK(counts[RegionTag::R1_BelieveAccepted] > 0);
  CHECK(counts[RegionTag::R5_NeedlessEffort] > 0);
  CHECK(counts[RegionTag::R3_Undershoot] + counts[RegionTag::R4_Overshoot] +
            counts[RegionTag::AgreeAct] >
        0);
}

TEST_CASE("region taxonomy is defined per cost family") {
  CHECK_THROWS_AS(
      classify_region({0.0, 0.0}, kC, kGamma05, CostModel::piecewise_shared(study_schedule(), 2), 1.0),
      std::invalid_argument);
  CHECK_NOTHROW(classify_region({0.0, 0.0}, kC, kGamma05, CostModel::quadratic({1.0, 2.0}), 1.0));
  CHECK_NOTHROW(classify_region({0.0, 0.0}, kC, kGamma05, CostModel::manhattan({1.0, 2.0}), 1.0));
}

TEST_CASE("band geometry follows the cost family") {
  // Under the quadratic ellipsoid band, (0,0) is in the band at B = 3.2 and
  // outside it at B = 3.1; under identity bias both states agree.
  Classifier c({0.5, 0.5}, 1.0);
  CostModel quad = CostModel::quadratic({1.0, 4.0});
  CHECK(classify_region({0.0, 0.0}, c, WeightingFunction::identity(), quad, 3.2) ==
        RegionTag::AgreeAct);
  CHECK(classify_region({0.0, 0.0}, c, WeightingFunction::identity(), quad, 3.1) ==
        RegionTag::UnreachableBoth);
  // Manhattan: the band is the Lemma-3 linear condition.
  Classifier cm({0.6, 0.4}, 1.0);
  CostModel man = CostModel::manhattan({2.0, 1.0});
  CHECK(classify_region({0.5, 0.5}, cm, WeightingFunction::identity(), man, 1.25) ==
        RegionTag::AgreeAct);
  CHECK(classify_region({0.5, 0.5}, cm, WeightingFunction::identity(), man, 1.2) ==
        RegionTag::UnreachableBoth);
}

TEST_CASE("H-set: w = theta accepts every point") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  for (int i = 0; i < 5000; ++i) {
    Vec x{ux(gen), ux(gen)};
    CHECK(in_H(x, kC.theta, kC.theta0, kC.theta));
  }
}

TEST_CASE("H-set on the true boundary reduces to the perceived acceptance side") {
  // Substituting theta^T x = theta0 into the inequality gives w^T x <= theta0:
  // boundary agents who perceive themselves below move up and cross, those who
  // perceive themselves above are outside H.
  std::mt19937_64 gen(54);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  std::uniform_real_distribution<double> ug(0.2, 0.95);
  for (int i = 0; i < 5000; ++i) {
    double x1 = ux(gen);
    Vec x{x1, (kC.theta0 - kC.theta[0] * x1) / kC.theta[1]};
    Vec w = perceived_weights(kC.theta, WeightingFunction::prelec(ug(gen))).w;
    CHECK(in_H(x, kC.theta, kC.theta0, w) == (dot(x, w) <= kC.theta0 + 1e-12));
  }
}

// The H derivation moves every agent onto its perceived boundary; the
// membership test must use that unconditional projection, not the voluntary
// response (which leaves perceived-accepted agents in place).
TEST_CASE("H-set matches the unconditional perceived-boundary projection") {
  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> ux(-4.0, 5.0);
  std::uniform_real_distribution<double> ug(0.2, 0.95);
  int disagreements = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec x0{ux(gen), ux(gen)};
    auto wf = WeightingFunction::prelec(ug(gen));
    Classifier perc = perceived_classifier(kC, wf);
    bool h = in_H(x0, kC.theta, kC.theta0, perc.theta);
    double gap_w = perc.theta0 - dot(x0, perc.theta);
    double nw2 = norm2sq(perc.theta);
    Vec post{x0[0] + gap_w * perc.theta[0] / nw2, x0[1] + gap_w * perc.theta[1] / nw2};
    bool sim = dot(post, kC.theta) >= kC.theta0;
    if (h != sim) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("H-set matches voluntary unbounded responses below the perceived boundary") {
  std::mt19937_64 gen(64);
  std::uniform_real_distribution<double> ux(-4.0, 5.0);
  std::uniform_real_distribution<double> ug(0.2, 0.95);
  AgentParams unbounded(1e9, CostModel::norm2());
  int disagreements = 0, tested = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec x0{ux(gen), ux(gen)};
    auto wf = WeightingFunction::prelec(ug(gen));
    Classifier perc = perceived_classifier(kC, wf);
    if (dot(x0, perc.theta) >= perc.theta0) continue;  // would not act
    ++tested;
    bool h = in_H(x0, kC.theta, kC.theta0, perc.theta);
    bool sim = respond(x0, kC, perc, unbounded).accepted_true;
    if (h != sim) ++disagreements;
  }
  CHECK(disagreements == 0);
  CHECK(tested > 10000);
}

TEST_CASE("set memberships") {
  Classifier nb({0.6, 0.4}, 1.0), b({0.5, 0.5}, 0.9);
  SECTION("S is a subset of A") {
    std::mt19937_64 gen(56);
    std::uniform_real_distribution<double> ux(-4.0, 5.0);
    for (int i = 0; i < 20000; ++i) {
      auto m = set_memberships({ux(gen), ux(gen)}, nb, b, kGamma05, 1.0);
      if (m.in_S) CHECK(m.in_A);
    }
  }
  SECTION("identity bias leaves S empty") {
    std::mt19937_64 gen(57);
    std::uniform_real_distribution<double> ux(-4.0, 5.0);
    for (int i = 0; i < 20000; ++i) {
      auto m = set_memberships({ux(gen), ux(gen)}, nb, b, WeightingFunction::identity(), 1.0);
      CHECK_FALSE(m.in_S);
    }
  }
  SECTION("deep above both boundaries") {
    auto m = set_memberships({9.0, 9.0}, nb, b, kGamma05, 1.0);
    CHECK_FALSE(m.in_A);
    CHECK_FALSE(m.in_T1);
    CHECK_FALSE(m.in_T2);
    CHECK(m.in_H);
  }
}

TEST_CASE("S-set matches the unbounded crossing discrepancy on A") {
  std::mt19937_64 gen(58);
  std::uniform_real_distribution<double> ux(-4.0, 5.0);
  std::uniform_real_distribution<double> ug(0.2, 0.95);
  AgentParams unbounded(1e9, CostModel::norm2());
  int disagreements = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec x0{ux(gen), ux(gen)};
    auto wf = WeightingFunction::prelec(ug(gen));
    auto m = set_memberships(x0, kC, kC, wf, 1.0);
    if (!m.in_A) continue;
    Classifier perc = perceived_classifier(kC, wf);
    bool rational_crosses = respond(x0, kC, kC, unbounded).accepted_true;
    bool biased_crosses = respond(x0, kC, perc, unbounded).accepted_true;
    bool sim = rational_crosses && !biased_crosses;
    if (m.in_S != sim) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("xi vanishes when boundaries coincide or intersect") {
  std::mt19937_64 gen(59);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    Vec x{ux(gen), ux(gen)};
    CHECK(xi(x, 0.6, 0.6, 1.0) == Catch::Approx(0.0).margin(1e-12));
  }
  // intersection of the two boundary lines solves both equations
  double theta = 0.6880, w = 0.5425, theta0 = 0.5;
  double a11 = theta, a12 = 1 - theta, a21 = w, a22 = 1 - w;
  double det = a11 * a22 - a12 * a21;
  Vec x{(theta0 * a22 - a12 * theta0) / det, (a11 * theta0 - theta0 * a21) / det};
  CHECK(xi(x, theta, w, theta0) == Catch::Approx(0.0).margin(1e-9));
  CHECK_THROWS_AS(xi({1.0, 2.0, 3.0}, 0.5, 0.4, 1.0), std::invalid_argument);
}

TEST_CASE("xi sign rules hold exactly in the norm-equal special case") {
  // theta = 0.6880, w = 0.5425 have equal norms; realize w(theta) with a
  // tabulated weighting that maps 0.6880 -> 0.5425.
  double theta1 = 0.6880, w1 = 0.5425, theta0 = 0.5;
  auto wf = WeightingFunction::tabulated({{0.0, 0.0}, {theta1, w1}, {1.0, 1.0}});
  Classifier c({theta1, 1.0 - theta1}, theta0);
  Classifier perc = perceived_classifier(c, wf);
  REQUIRE(perc.theta[0] == Catch::Approx(w1).margin(1e-12));
  AgentParams p(0.6, CostModel::norm2());
  std::mt19937_64 gen(60);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  int both_acted = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec x0{ux(gen), ux(gen)};
    auto rational = respond(x0, c, c, p);
    auto biased = respond(x0, c, perc, p);
    if (!rational.acted || !biased.acted) continue;
    ++both_acted;
    double v = xi(x0, theta1, w1, theta0);
    bool over1 = biased.delta[0] > rational.delta[0] + 1e-12;
    bool over2 = biased.delta[1] > rational.delta[1] + 1e-12;
    bool under1 = biased.delta[0] < rational.delta[0] - 1e-12;
    bool under2 = biased.delta[1] < rational.delta[1] - 1e-12;
    if (over1 && over2) CHECK(v > -1e-12);
    if (under1 && under2) CHECK(v < 1e-12);
  }
  CHECK(both_acted > 1000);
}

TEST_CASE("xi sign rules at general gamma are reported, not asserted") {
  // Outside the norm-equal case the supplementary sign rules may fail; count
  // violations and surface them as information.
  Classifier c({0.6880, 0.3120}, 0.5);
  Classifier perc = perceived_classifier(c, kGamma05);
  AgentParams p(0.6, CostModel::norm2());
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  int violations = 0, considered = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec x0{ux(gen), ux(gen)};
    auto rational = respond(x0, c, c, p);
    auto biased = respond(x0, c, perc, p);
    if (!rational.acted || !biased.acted) continue;
    ++considered;
    double v = xi(x0, c.theta[0], perc.theta[0], c.theta0);
    bool over_both = biased.delta[0] > rational.delta[0] + 1e-12 &&
                     biased.delta[1] > rational.delta[1] + 1e-12;
    bool under_both = biased.delta[0] < rational.delta[0] - 1e-12 &&
                      biased.delta[1] < rational.delta[1] - 1e-12;
    if ((over_both && v <= 0.0) || (under_both && v >= 0.0)) ++violations;
  }
  INFO("xi rule violations outside the norm-equal case: " << violations << " / " << considered);
  CHECK(considered > 1000);
}

TEST_CASE("investment report") {
  CostModel m = CostModel::norm2();
  SECTION("identity bias: everything equal") {
    auto rep = investment_report({0.5, 0.5}, kC, WeightingFunction::identity(), m, 1.0);
    for (auto v : rep.verdicts) CHECK(v == InvestVerdict::Equal);
  }
  SECTION("premise 1 forces under-investment") {
    std::mt19937_64 gen(62);
    std::uniform_real_distribution<double> ux(-2.0, 3.0);
    std::uniform_real_distribution<double> ug(0.2, 0.9);
    std::uniform_real_distribution<double> ut(0.05, 0.95);
    int tested = 0;
    for (int i = 0; i < 10000; ++i) {
      double t1 = ut(gen);
      Classifier c({t1, 1.0 - t1}, ux(gen));
      auto rep = investment_report({ux(gen), ux(gen)}, c, WeightingFunction::prelec(ug(gen)), m, 5.0);
      if (!rep.both_acted) continue;
      for (std::size_t j = 0; j < rep.verdicts.size(); ++j) {
        if (rep.premise1[j]) {
          ++tested;
          CHECK(rep.verdicts[j] == InvestVerdict::Under);
        }
        if (rep.premise2[j]) {
          CHECK(rep.verdicts[j] == InvestVerdict::Over);
        }
      }
    }
    CHECK(tested > 500);
  }
  SECTION("prelec factor at gamma = 0.5") {
    CHECK(prelec_overinvest_factor(0.5) == Catch::Approx(std::exp(-0.25)).margin(1e-12));
    CHECK(prelec_overinvest_factor(0.5) == Catch::Approx(0.7788).margin(1e-4));
  }
  SECTION("premise 3 forces over-investment in the top feature") {
    std::mt19937_64 gen(63);
    std::uniform_real_distribution<double> ux(-2.0, 3.0);
    std::uniform_real_distribution<double> ut(0.05, 0.95);
    AgentParams p(10.0, m);
    int tested = 0;
    for (int i = 0; i < 20000; ++i) {
      double t1 = ut(gen);
      Vec theta{std::max(t1, 1.0 - t1), std::min(t1, 1.0 - t1)};  // descending
      Classifier c(theta, ux(gen));
      Vec x0{ux(gen), ux(gen)};
      auto rep = investment_report(x0, c, kGamma05, m, 10.0);
      if (!rep.both_acted || !rep.premise3) continue;
      ++tested;
      CHECK(rep.delta_nb[0] < rep.delta_b[0]);
    }
    CHECK(tested > 200);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stratasim/bias.hpp"

using namespace stratasim;

TEST_CASE("prelec endpoints and fixed point") {
  CHECK(prelec(1.0, 0.5) == 1.0);
  CHECK(prelec(0.0, 0.5) == 0.0);
  const double inv_e = std::exp(-1.0);
  for (double g : {0.25, 0.5, 0.9, 1.0, 1.7}) {
    CHECK(std::abs(prelec(inv_e, g) - inv_e) < 1e-12);
  }
}

TEST_CASE("prelec reference values") {
  CHECK(prelec(0.6880, 0.5) == Catch::Approx(0.5425).margin(5e-4));
  CHECK(prelec(0.65, 0.5) == Catch::Approx(0.51873).margin(1e-4));
}

TEST_CASE("prelec domain errors") {
  CHECK_THROWS_AS(prelec(-0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(prelec(1.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(prelec(0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(prelec(0.5, -1.0), std::domain_error);
}

TEST_CASE("prelec is strictly increasing") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> uz(1e-9, 1.0 - 1e-9);
  std::uniform_real_distribution<double> ug(0.05, 3.0);
  for (int i = 0; i < 20000; ++i) {
    double g = ug(gen);
    double a = uz(gen), b = uz(gen);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(prelec(a, g) < prelec(b, g));
  }
}

TEST_CASE("prelec over/under-weights around 1/e for gamma < 1") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> uz(1e-6, 1.0 - 1e-6);
  std::uniform_real_distribution<double> ug(0.1, 0.95);
  const double inv_e = std::exp(-1.0);
  for (int i = 0; i < 20000; ++i) {
    double g = ug(gen);
    double z = uz(gen);
    if (std::abs(z - inv_e) < 1e-9) continue;
    if (z < inv_e)
      CHECK(prelec(z, g) > z);
    else
      CHECK(prelec(z, g) < z);
  }
}

TEST_CASE("perceived weights: identity is the identity map") {
  Vec theta{0.6, 0.4};
  auto pw = perceived_weights(theta, WeightingFunction::identity());
  CHECK(pw.w == theta);
}

TEST_CASE("perceived weights: prelec 0.5 on (0.65, 0.35)") {
  auto pw = perceived_weights({0.65, 0.35}, WeightingFunction::prelec(0.5));
  CHECK(pw.w[0] == Catch::Approx(0.51873).margin(1e-4));
  CHECK(pw.w[1] == Catch::Approx(0.48127).margin(1e-4));
}

TEST_CASE("perceived weights: single feature") {
  auto pw = perceived_weights({1.0}, WeightingFunction::prelec(0.3));
  REQUIRE(pw.w.size() == 1);
  CHECK(pw.w[0] == 1.0);
}

TEST_CASE("perceived weights sum to one and stay nonnegative") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> ug(0.1, 2.5);
  std::uniform_int_distribution<int> un(1, 6);
  std::gamma_distribution<double> comp(1.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    int n = un(gen);
    Vec theta(n);
    double sum = 0.0;
    for (auto& t : theta) {
      t = comp(gen) + 1e-12;
      sum += t;
    }
    for (auto& t : theta) t /= sum;
    auto pw = perceived_weights(theta, WeightingFunction::prelec(ug(gen)));
    double wsum = 0.0;
    for (double w : pw.w) {
      CHECK(w >= 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - 1.0) < 1e-9);
  }
}

TEST_CASE("perceived weights reject bad input") {
  CHECK_THROWS_AS(perceived_weights({0.5, -0.1, 0.6}, WeightingFunction::prelec(0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(perceived_weights({0.5, 0.4}, WeightingFunction::prelec(0.5)),
                  std::invalid_argument);
}

TEST_CASE("perceived weights: descending sort scatters back to input order") {
  Vec theta{0.2, 0.7, 0.1};
  auto plain = perceived_weights({0.7, 0.2, 0.1}, WeightingFunction::prelec(0.5));
  auto sorted = perceived_weights(theta, WeightingFunction::prelec(0.5), true);
  CHECK(sorted.w[1] == Catch::Approx(plain.w[0]).margin(1e-15));
  CHECK(sorted.w[0] == Catch::Approx(plain.w[1]).margin(1e-15));
  CHECK(sorted.w[2] == Catch::Approx(plain.w[2]).margin(1e-15));
  double wsum = sorted.w[0] + sorted.w[1] + sorted.w[2];
  CHECK(std::abs(wsum - 1.0) < 1e-9);
}

TEST_CASE("the norm discrepancy of the 2-D special case is observable") {
  // The supplementary special case pairs theta = 0.6880 with w = 0.5425 and
  // equal norms; the cumulative construction gives a different second
  // component, so the norms differ. Both are exposed for reporting.
  auto pw = perceived_weights({0.6880, 0.3120}, WeightingFunction::prelec(0.5));
  CHECK(pw.theta_norm() == Catch::Approx(0.755).margin(1e-3));
  CHECK(pw.w_norm() == Catch::Approx(0.710).margin(1e-3));
  CHECK(std::abs(pw.theta_norm() - pw.w_norm()) > 1e-2);
}

TEST_CASE("sigma") {
  SECTION("w = theta gives exactly 1") {
    for (Vec theta : {Vec{0.65, 0.35}, Vec{0.2, 0.3, 0.5}, Vec{1.0}}) {
      CHECK(sigma(theta, theta) == 1.0);
    }
  }
  SECTION("reference value") {
    CHECK(sigma({0.65, 0.35}, {0.51873, 0.48127}) == Catch::Approx(1.00986).margin(1e-3));
  }
  SECTION("orthogonal weights") {
    CHECK(sigma({1.0, 0.0}, {0.0, 1.0}) == 0.0);
  }
  SECTION("zero-norm error") {
    CHECK_THROWS_AS(sigma({0.5, 0.5}, {0.0, 0.0}), std::domain_error);
  }
}

TEST_CASE("tabulated weighting interpolates and validates") {
  auto wf = WeightingFunction::tabulated({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
  CHECK(wf(0.25) == Catch::Approx(0.4));
  CHECK(wf(0.75) == Catch::Approx(0.9));
  CHECK(wf(0.0) == 0.0);
  CHECK(wf(1.0) == 1.0);
  CHECK_THROWS_AS(WeightingFunction::tabulated({{0.0, 0.0}, {0.5, 0.4}, {0.4, 0.6}, {1.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightingFunction::tabulated({{0.0, 0.1}, {1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(WeightingFunction::tabulated({{0.0, 0.0}, {0.3, 0.5}, {1.0, 0.9}}),
                  std::invalid_argument);
}

TEST_CASE("tabulated weighting loads from csv") {
  const char* path = "test_weighting.csv";
  {
    std::ofstream out(path);
    out << "z,p\n0,0\n0.5,0.7\n1,1\n";
  }
  auto wf = load_weighting_csv(path);
  CHECK(wf(0.5) == Catch::Approx(0.7));
  CHECK(wf(0.25) == Catch::Approx(0.35));
  std::remove(path);
  {
    std::ofstream out(path);
    out << "a,b\n0,0\n1,1\n";
  }
  CHECK_THROWS_AS(load_weighting_csv(path), std::runtime_error);
  std::remove(path);
}

TEST_CASE("1-D thresholds are weighted directly") {
  auto wf = WeightingFunction::prelec(0.5);
  CHECK(perceived_threshold(0.5, wf) == Catch::Approx(prelec(0.5, 0.5)));
  CHECK(perceived_threshold(-0.2, wf) == 0.0);
  CHECK(perceived_threshold(1.4, wf) == 1.0);
}

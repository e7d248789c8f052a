#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stratasim/model.hpp"

using namespace stratasim;

TEST_CASE("score") {
  Classifier c({0.6, 0.4}, 1.0);
  CHECK(score({0.0, 0.0}, c) == 0.0);
  CHECK(score({0.5, 0.5}, c) == Catch::Approx(0.5));
  Classifier appendix({0.78, 0.22}, 70.0);
  CHECK(score({100.0, 100.0}, appendix) == Catch::Approx(100.0));
  CHECK_THROWS_AS(score({1.0, 2.0, 3.0}, c), std::invalid_argument);
}

TEST_CASE("classify with boundary acceptance") {
  Classifier c({0.6, 0.4}, 1.0);
  CHECK(classify({1.0, 1.0}, c) == 1);  // score exactly theta0
  CHECK(classify({0.5, 0.5}, c) == 0);
  CHECK(classify({2.2, -0.2}, c) == 1);
}

TEST_CASE("signed distance") {
  Classifier c({0.6, 0.4}, 1.0);
  CHECK(signed_distance({1.0, 1.0}, c) == 0.0);
  CHECK(signed_distance({0.5, 0.5}, c) == Catch::Approx(0.69338).margin(1e-5));
  CHECK(signed_distance({2.2, -0.2}, c) == Catch::Approx(-0.33282).margin(1e-5));
  CHECK_THROWS_AS(signed_distance({0.5}, Vec{0.0}, 1.0), std::domain_error);
}

TEST_CASE("classify agrees with the sign of the distance") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  std::uniform_real_distribution<double> ut(0.01, 0.99);
  for (int i = 0; i < 20000; ++i) {
    double t1 = ut(gen);
    Classifier c({t1, 1.0 - t1}, ux(gen));
    Vec x{ux(gen), ux(gen)};
    CHECK((classify(x, c) == 1) == (signed_distance(x, c) <= 0.0));
  }
}

TEST_CASE("signed distance is affine in x0 and invariant to joint scaling") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  std::uniform_real_distribution<double> us(0.1, 10.0);
  Vec theta{0.6, 0.4};
  for (int i = 0; i < 5000; ++i) {
    Vec x{ux(gen), ux(gen)}, y{ux(gen), ux(gen)};
    double alpha = us(gen) / 10.0;
    Vec mix{alpha * x[0] + (1 - alpha) * y[0], alpha * x[1] + (1 - alpha) * y[1]};
    double expected = alpha * signed_distance(x, theta, 1.0) + (1 - alpha) * signed_distance(y, theta, 1.0);
    CHECK(signed_distance(mix, theta, 1.0) == Catch::Approx(expected).margin(1e-9));
    double s = us(gen);
    Vec scaled{s * theta[0], s * theta[1]};
    CHECK(signed_distance(x, scaled, s * 1.0) ==
          Catch::Approx(signed_distance(x, theta, 1.0)).margin(1e-9));
  }
}

TEST_CASE("joint scaling leaves the decision unchanged") {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  std::uniform_real_distribution<double> ut(0.01, 0.99);
  std::uniform_real_distribution<double> us(0.1, 10.0);
  for (int i = 0; i < 5000; ++i) {
    double t1 = ut(gen);
    double t0 = ux(gen);
    double s = us(gen);
    Classifier c = Classifier::from_weights({t1, 1.0 - t1}, t0);
    Classifier scaled = Classifier::from_weights({s * t1, s * (1.0 - t1)}, s * t0);
    Vec x{ux(gen), ux(gen)};
    CHECK(classify(x, c) == classify(x, scaled));
    CHECK(signed_distance(x, scaled) == Catch::Approx(signed_distance(x, c)).margin(1e-9));
  }
}

TEST_CASE("construction normalizes raw weights and rescales the threshold") {
  Classifier c = Classifier::from_weights({2.0, 1.0}, 3.0);
  CHECK(c.theta[0] == Catch::Approx(2.0 / 3.0));
  CHECK(c.theta[1] == Catch::Approx(1.0 / 3.0));
  CHECK(c.theta0 == Catch::Approx(1.0));
  CHECK_THROWS_AS(Classifier::from_weights({0.0, 0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Classifier::from_weights({-1.0, 2.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Classifier({0.7, 0.7}, 1.0), std::invalid_argument);
}

TEST_CASE("classifier string round trip") {
  Classifier c({0.65, 0.35}, 800.0);
  Classifier back = parse_classifier(to_string(c));
  CHECK(back.theta == c.theta);
  CHECK(back.theta0 == c.theta0);
  CHECK_THROWS_AS(parse_classifier("theta=0.5,0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_classifier("w=1;theta0=2"), std::invalid_argument);
}

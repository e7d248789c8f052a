#pragma once

// Linear threshold classifiers: scores, signed distances, acceptance.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "stratasim/bias.hpp"

namespace stratasim {

/// A threshold classifier h(x) = 1(theta . x >= theta0) with theta on the
/// simplex. Boundary scores are accepted.
struct Classifier {
  Vec theta;
  double theta0 = 0.0;

  Classifier() = default;
  Classifier(Vec t, double t0) : theta(std::move(t)), theta0(t0) { check_simplex(theta); }

  /// Builds a classifier from unnormalized nonnegative weights, rescaling the
  /// threshold so the decision rule is unchanged.
  static Classifier from_weights(Vec raw, double t0) {
    if (raw.empty()) throw std::invalid_argument("Classifier: empty weights");
    double sum = 0.0;
    for (double v : raw) {
      if (!(v >= 0.0)) throw std::invalid_argument("Classifier: weights must be nonnegative");
      sum += v;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("Classifier: weights must not all be zero");
    for (double& v : raw) v /= sum;
    return Classifier(std::move(raw), t0 / sum);
  }

  std::size_t dim() const { return theta.size(); }

  double norm() const {
    double s = 0.0;
    for (double t : theta) s += t * t;
    return std::sqrt(s);
  }
};

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2sq(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double score(const Vec& x, const Classifier& c) { return dot(x, c.theta); }

inline int classify(const Vec& x, const Classifier& c) { return score(x, c) >= c.theta0 ? 1 : 0; }

/// Signed Euclidean distance to the hyperplane theta . x = theta0:
/// positive below the boundary, zero on it, negative above.
inline double signed_distance(const Vec& x0, const Vec& theta, double theta0) {
  double n2 = norm2sq(theta);
  if (n2 == 0.0) throw std::domain_error("signed_distance: zero-norm weights");
  return (theta0 - dot(x0, theta)) / std::sqrt(n2);
}

inline double signed_distance(const Vec& x0, const Classifier& c) {
  return signed_distance(x0, c.theta, c.theta0);
}

/// Serializes to `theta=<comma list>;theta0=<real>`.
inline std::string to_string(const Classifier& c) {
  std::ostringstream os;
  os.precision(17);
  os << "theta=";
  for (std::size_t i = 0; i < c.theta.size(); ++i) {
    if (i) os << ',';
    os << c.theta[i];
  }
  os << ";theta0=" << c.theta0;
  return os.str();
}

inline Vec parse_vector(const std::string& s) {
  Vec out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("empty component in vector: " + s);
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size()) throw std::invalid_argument("bad number in vector: " + tok);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty vector: " + s);
  return out;
}

inline Classifier parse_classifier(const std::string& s) {
  auto semi = s.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("classifier spec needs 'theta=...;theta0=...'");
  auto lhs = s.substr(0, semi);
  auto rhs = s.substr(semi + 1);
  if (lhs.rfind("theta=", 0) != 0 || rhs.rfind("theta0=", 0) != 0)
    throw std::invalid_argument("classifier spec needs 'theta=...;theta0=...'");
  Vec th = parse_vector(lhs.substr(6));
  double t0 = std::stod(rhs.substr(7));
  return Classifier::from_weights(std::move(th), t0);
}

}  // namespace stratasim

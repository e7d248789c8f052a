#pragma once

// Synthetic population generation (Gaussian mixtures and the score-sigmoid
// labeling scheme) plus CSV ingestion and persistence.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>

#include "stratasim/model.hpp"

namespace stratasim {

struct LabeledAgent {
  Vec x0;
  int y = 0;
};

using Population = std::vector<LabeledAgent>;

/// Deterministic draws on top of mt19937_64 so populations are reproducible
/// independent of the standard library's distribution implementations.
/// Normals use Box-Muller (two uniforms per draw), gammas Marsaglia-Tsang.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    // 53-bit mantissa uniform in [0, 1)
    return (gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma: bad parameters");
    if (shape < 1.0) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

 private:
  std::mt19937_64 gen_;
};

/// Row-major square matrix.
struct Matrix {
  std::size_t n = 0;
  Vec a;

  Matrix() = default;
  Matrix(std::size_t dim, Vec vals) : n(dim), a(std::move(vals)) {
    if (a.size() != n * n) throw std::invalid_argument("Matrix: size mismatch");
  }
  static Matrix diag(const Vec& d) {
    Matrix m;
    m.n = d.size();
    m.a.assign(m.n * m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) m.a[i * m.n + i] = d[i];
    return m;
  }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Cholesky factor of a symmetric PSD matrix (tolerant of zero rows, so a
/// zero covariance degenerates cleanly to point masses).
inline Matrix cholesky_psd(const Matrix& S) {
  const std::size_t n = S.n;
  Matrix L;
  L.n = n;
  L.a.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = S(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d < -1e-9 * (1.0 + std::abs(S(j, j))))
      throw std::invalid_argument("covariance is not positive semi-definite");
    d = std::max(d, 0.0);
    double ljj = std::sqrt(d);
    L.a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = S(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L.a[i * n + j] = ljj > 0.0 ? v / ljj : 0.0;
    }
  }
  return L;
}

struct GaussianScenario {
  Vec mu1, mu0;
  Matrix sigma1, sigma0;
  std::size_t n1 = 0, n0 = 0;
  double scale = 1.0;
  std::uint64_t seed = 0;
};

// Label streams are split from the scenario seed with the golden-ratio
// constant: label 1 draws from `seed`, label 0 from `seed ^ 0x9e3779b97f4a7c15`.
inline constexpr std::uint64_t kLabel0SeedSalt = 0x9e3779b97f4a7c15ull;

/// Draws the two label clusters, label-1 agents first, each x = scale*(mu + Lz).
inline Population sample_gaussian(const GaussianScenario& s) {
  const std::size_t n = s.mu1.size();
  if (s.mu0.size() != n || s.sigma1.n != n || s.sigma0.n != n)
    throw std::invalid_argument("sample_gaussian: dimension mismatch");
  Matrix L1 = cholesky_psd(s.sigma1);
  Matrix L0 = cholesky_psd(s.sigma0);
  Population pop;
  pop.reserve(s.n1 + s.n0);
  auto draw = [&](Rng& rng, const Vec& mu, const Matrix& L, int label, std::size_t count) {
    Vec z(n);
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
      LabeledAgent agent;
      agent.y = label;
      agent.x0.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        double v = mu[i];
        for (std::size_t j = 0; j <= i; ++j) v += L(i, j) * z[j];
        agent.x0[i] = s.scale * v;
      }
      pop.push_back(std::move(agent));
    }
  };
  Rng rng1(s.seed);
  draw(rng1, s.mu1, L1, 1, s.n1);
  Rng rng0(s.seed ^ kLabel0SeedSalt);
  draw(rng0, s.mu0, L0, 0, s.n0);
  return pop;
}

/// The two-feature generative scheme behind the 150-agent response figures:
/// feature 1 a normal minus a discrete spike, feature 2 an offset gamma, with
/// acceptance probability sigmoid(slope * (score/divisor - midpoint)).
struct SigmoidSpec {
  std::size_t n = 150;
  Vec weights{0.65, 0.35};
  double normal_mean = 700.0, normal_std = 200.0;
  Vec spike_values{0.0, 20.0, 50.0, 100.0};
  Vec spike_probs{0.6, 0.2, 0.1, 0.1};
  double gamma_shape = 4.0, gamma_scale = 100.0;
  double gamma_offset = 1500.0;
  double sigmoid_slope = 0.8, sigmoid_midpoint = 80.0, score_divisor = 10.0;

  double label_probability(double score) const {
    return 1.0 / (1.0 + std::exp(-sigmoid_slope * (score / score_divisor - sigmoid_midpoint)));
  }
};

inline double discrete_inverse_cdf(const Vec& values, const Vec& probs, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cum += probs[i];
    if (u < cum) return values[i];
  }
  return values.back();
}

inline Population sample_sigmoid_labeled(const SigmoidSpec& spec, std::uint64_t seed) {
  if (spec.spike_values.size() != spec.spike_probs.size())
    throw std::invalid_argument("sample_sigmoid_labeled: spike spec mismatch");
  Rng rng(seed);
  Population pop;
  pop.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    double f1 = spec.normal_mean + spec.normal_std * rng.normal() -
                discrete_inverse_cdf(spec.spike_values, spec.spike_probs, rng.uniform());
    double f2 = spec.gamma_offset - rng.gamma(spec.gamma_shape, spec.gamma_scale);
    LabeledAgent agent;
    agent.x0 = {f1, f2};
    double score = spec.weights[0] * f1 + spec.weights[1] * f2;
    agent.y = rng.uniform() < spec.label_probability(score) ? 1 : 0;
    pop.push_back(std::move(agent));
  }
  return pop;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV with header x1,...,xn,y. Doubles print with 17 significant digits so a
/// save/load round trip is exact.
inline void save_csv(const Population& pop, const std::string& path) {
  std::size_t n = pop.empty() ? 2 : pop[0].x0.size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  for (std::size_t i = 0; i < n; ++i) out << 'x' << (i + 1) << ',';
  out << "y\n";
  for (const auto& a : pop) {
    for (double v : a.x0) out << format_double(v) << ',';
    out << a.y << '\n';
  }
}

inline Population load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
  }
  if (header.size() < 2 || header.back() != "y")
    throw std::runtime_error("csv header must be x1,...,xn,y: " + path);
  const std::size_t n = header.size() - 1;
  for (std::size_t i = 0; i < n; ++i)
    if (header[i] != "x" + std::to_string(i + 1))
      throw std::runtime_error("csv header must be x1,...,xn,y: " + path);
  Population pop;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    LabeledAgent agent;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(ss, tok, ','))
        throw std::runtime_error("csv row " + std::to_string(row) + ": expected " +
                                 std::to_string(n + 1) + " columns");
      try {
        std::size_t pos = 0;
        agent.x0.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("csv row " + std::to_string(row) + ": bad number '" + tok + "'");
      }
    }
    if (!std::getline(ss, tok, ','))
      throw std::runtime_error("csv row " + std::to_string(row) + ": missing label column");
    if (std::getline(ss, line, ','))
      throw std::runtime_error("csv row " + std::to_string(row) + ": too many columns");
    if (tok == "0")
      agent.y = 0;
    else if (tok == "1")
      agent.y = 1;
    else
      throw std::runtime_error("csv row " + std::to_string(row) + ": label must be 0 or 1, got '" +
                               tok + "'");
    pop.push_back(std::move(agent));
  }
  return pop;
}

}  // namespace stratasim

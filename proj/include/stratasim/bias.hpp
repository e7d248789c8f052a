#pragma once

// Probability weighting functions and the rank-dependent construction of
// perceived feature weights w(theta).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stratasim {

using Vec = std::vector<double>;

inline constexpr double kSimplexTol = 1e-9;

/// Prelec weighting p(z) = exp(-(-ln z)^gamma). Fixed point at 1/e;
/// gamma < 1 overweights small and underweights large probabilities.
/// p(0) = 0 by continuity, p(1) = 1 exactly.
inline double prelec(double z, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("prelec: gamma must be > 0");
  if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("prelec: z must lie in [0,1]");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;
  return std::exp(-std::pow(-std::log(z), gamma));
}

enum class WeightingKind { Identity, Prelec, Tabulated };

/// A probability-weighting specification. Tabulated variants interpolate
/// linearly between (z, p) breakpoints, which must be monotone nondecreasing
/// with p(0) = 0 and p(1) = 1.
struct WeightingFunction {
  WeightingKind kind = WeightingKind::Identity;
  double gamma = 1.0;
  std::vector<std::pair<double, double>> table;
  // run the cumulative construction over features sorted by descending weight
  bool sort_descending = false;

  static WeightingFunction identity() { return {}; }

  static WeightingFunction prelec(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("WeightingFunction: gamma must be > 0");
    WeightingFunction wf;
    wf.kind = WeightingKind::Prelec;
    wf.gamma = gamma;
    return wf;
  }

  static WeightingFunction tabulated(std::vector<std::pair<double, double>> pts) {
    if (pts.size() < 2) throw std::invalid_argument("tabulated weighting needs at least two breakpoints");
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (!(pts[i].first > pts[i - 1].first))
        throw std::invalid_argument("tabulated weighting breakpoints must be strictly increasing in z");
      if (pts[i].second < pts[i - 1].second)
        throw std::invalid_argument("tabulated weighting values must be nondecreasing");
    }
    if (std::abs(pts.front().first) > 1e-12 || std::abs(pts.front().second) > 1e-12 ||
        std::abs(pts.back().first - 1.0) > 1e-12 || std::abs(pts.back().second - 1.0) > 1e-12)
      throw std::invalid_argument("tabulated weighting must map 0 to 0 and 1 to 1");
    WeightingFunction wf;
    wf.kind = WeightingKind::Tabulated;
    wf.table = std::move(pts);
    return wf;
  }

  bool is_identity() const { return kind == WeightingKind::Identity || (kind == WeightingKind::Prelec && gamma == 1.0); }

  double operator()(double z) const {
    switch (kind) {
      case WeightingKind::Identity:
        if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("weighting: z must lie in [0,1]");
        return z;
      case WeightingKind::Prelec:
        return ::stratasim::prelec(z, gamma);
      case WeightingKind::Tabulated: {
        if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("weighting: z must lie in [0,1]");
        auto it = std::lower_bound(table.begin(), table.end(), z,
                                   [](const std::pair<double, double>& p, double v) { return p.first < v; });
        if (it == table.begin()) return it->second;
        if (it == table.end()) return table.back().second;
        auto lo = *(it - 1);
        auto hi = *it;
        double t = (z - lo.first) / (hi.first - lo.first);
        return lo.second + t * (hi.second - lo.second);
      }
    }
    throw std::logic_error("unreachable");
  }
};

/// Loads a two-column CSV with header `z,p` into a tabulated weighting.
inline WeightingFunction load_weighting_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weighting csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty weighting csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "z,p") throw std::runtime_error("weighting csv must have header 'z,p': " + path);
  std::vector<std::pair<double, double>> pts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw std::runtime_error("weighting csv: malformed row " + std::to_string(row));
    pts.emplace_back(std::stod(a), std::stod(b));
  }
  return WeightingFunction::tabulated(std::move(pts));
}

inline void check_simplex(const Vec& theta) {
  if (theta.empty()) throw std::invalid_argument("weights: empty vector");
  double sum = 0.0;
  for (double t : theta) {
    if (!(t >= 0.0)) throw std::invalid_argument("weights: components must be nonnegative");
    sum += t;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("weights: components must sum to 1");
}

/// Perceived feature weights w(theta) under the rank-dependent construction
/// w_j = p(sum_{i<=j} theta_i) - p(sum_{i<=j-1} theta_i).
///
/// The cumulative construction follows the index order of theta as given.
/// With sort_descending = true, the construction runs over features sorted by
/// descending weight (ties by index) and the results are scattered back.
struct PerceivedWeights {
  Vec w;
  Vec source_theta;
  WeightingFunction weighting;

  double theta_norm() const {
    return std::sqrt(std::inner_product(source_theta.begin(), source_theta.end(), source_theta.begin(), 0.0));
  }
  double w_norm() const { return std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0)); }
};

inline PerceivedWeights perceived_weights(const Vec& theta, const WeightingFunction& wf) {
  return perceived_weights(theta, wf, wf.sort_descending);
}

inline PerceivedWeights perceived_weights(const Vec& theta, const WeightingFunction& wf,
                                          bool sort_descending) {
  check_simplex(theta);
  PerceivedWeights pw;
  pw.source_theta = theta;
  pw.weighting = wf;
  if (wf.is_identity()) {
    pw.w = theta;  // exact identity map, no cumulative round-off
    return pw;
  }
  const std::size_t n = theta.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (sort_descending) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return theta[a] > theta[b]; });
  }
  pw.w.assign(n, 0.0);
  double cum = 0.0;
  double prev = 0.0;  // p(0)
  for (std::size_t j = 0; j < n; ++j) {
    cum += theta[order[j]];
    double cur = (j + 1 == n) ? wf(1.0) : wf(std::min(cum, 1.0));
    pw.w[order[j]] = cur - prev;
    prev = cur;
  }
  return pw;
}

/// sigma(theta) = theta . w / ||w||^2, the intensity of the misperception;
/// equals 1 when w = theta.
inline double sigma(const Vec& theta, const Vec& w) {
  if (theta.size() != w.size()) throw std::invalid_argument("sigma: dimension mismatch");
  double dot = 0.0, nw2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    dot += theta[i] * w[i];
    nw2 += w[i] * w[i];
  }
  if (nw2 == 0.0) throw std::domain_error("sigma: perceived weights have zero norm");
  return dot / nw2;
}

/// One-dimensional classifiers carry the bias on the threshold itself: an
/// agent facing x >= theta0 with theta0 in [0,1] perceives the cutoff at
/// p(theta0). Thresholds outside [0,1] are clamped before weighting.
inline double perceived_threshold(double theta0, const WeightingFunction& wf) {
  return wf(std::clamp(theta0, 0.0, 1.0));
}

}  // namespace stratasim

#pragma once

// Flat `[section] key=value` run configuration.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "stratasim/costs.hpp"
#include "stratasim/firm.hpp"
#include "stratasim/population.hpp"

namespace stratasim {

/// Configuration problems exit with code 2; anything else with 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static ConfigFile parse(const std::string& text) {
    ConfigFile cf;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
      std::string key = trim(t.substr(0, eq));
      std::string val = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      cf.values_[section + "." + key] = val;
    }
    return cf;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const {
    if (!has(key)) return dflt;
    try {
      return std::stoull(get_string(key));
    } catch (const std::exception&) {
      throw ConfigError("invalid config value for " + key);
    }
  }

  bool get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid config value for " + key);
  }

  Vec get_vector(const std::string& key) const {
    try {
      return parse_vector(get_string(key));
    } catch (const std::exception&) {
      throw ConfigError("invalid config value for " + key);
    }
  }
  Vec get_vector(const std::string& key, const Vec& dflt) const {
    return has(key) ? get_vector(key) : dflt;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  }
  double to_double(const std::string& key, const std::string& v) const {
    if (v == "inf") return kInf;
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("invalid config value for " + key);
    }
  }
  std::map<std::string, std::string> values_;
};

/// `norm2 | quad:c1,c2,... | manhattan:c1,c2,... | piecewise[:h@r,...]`.
/// Piecewise schedules apply the same tiers to every feature; bare
/// `piecewise` uses the study schedule.
inline CostModel parse_cost_spec(const std::string& spec, std::size_t n_features,
                                 Norm2Budget n2b = Norm2Budget::Distance) {
  auto colon = spec.find(':');
  std::string head = colon == std::string::npos ? spec : spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "norm2") {
    if (!rest.empty()) throw ConfigError("cost: norm2 takes no parameters");
    return CostModel::norm2(n2b);
  }
  if (head == "quad") return CostModel::quadratic(parse_vector(rest));
  if (head == "manhattan") return CostModel::manhattan(parse_vector(rest));
  if (head == "piecewise") {
    if (rest.empty()) return CostModel::piecewise_shared(study_schedule(), n_features);
    TierSchedule tiers;
    std::istringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      auto at = tok.find('@');
      if (at == std::string::npos) throw ConfigError("cost: piecewise tier needs hours@rate: " + tok);
      std::string h = tok.substr(0, at), r = tok.substr(at + 1);
      double hours = h == "inf" ? kInf : std::stod(h);
      tiers.push_back({hours, std::stod(r)});
    }
    return CostModel::piecewise_shared(tiers, n_features);
  }
  throw ConfigError("cost: unknown model '" + head + "'");
}

enum class PopulationSource { Gaussian, Sigmoid, Csv };

struct RunConfig {
  ConfigFile raw;

  PopulationSource source = PopulationSource::Gaussian;
  GaussianScenario gaussian;
  SigmoidSpec sigmoid;
  std::string csv_path;

  std::optional<Classifier> classifier;
  SearchSpec search;
  WeightingFunction bias;
  bool sort_descending = false;
  std::string cost_spec = "norm2";
  Norm2Budget norm2_budget = Norm2Budget::Distance;
  double budget = 0.0;
  double reward = kInf;
  LossSpec loss;
  DeploymentMode mode = DeploymentMode::Oblivious;
  std::uint64_t seed = 0;
  bool seed_explicit = false;
  std::uint64_t population_seed = 0;
  bool population_seed_explicit = false;
  std::string out_dir = "out";

  CostModel cost_model(std::size_t n_features) const {
    return parse_cost_spec(cost_spec, n_features, norm2_budget);
  }

  AgentParams agent_params(std::size_t n_features) const {
    return AgentParams(budget, cost_model(n_features), reward);
  }

  Population make_population() const {
    switch (source) {
      case PopulationSource::Gaussian:
        return sample_gaussian(gaussian);
      case PopulationSource::Sigmoid:
        return sample_sigmoid_labeled(sigmoid, population_seed);
      case PopulationSource::Csv:
        return load_csv(csv_path);
    }
    throw std::logic_error("unreachable");
  }
};

inline Matrix parse_matrix(const ConfigFile& cf, const std::string& key, std::size_t dim) {
  Vec flat = cf.get_vector(key);
  if (flat.size() == dim) return Matrix::diag(flat);  // diagonal shorthand
  if (flat.size() != dim * dim)
    throw ConfigError("config " + key + ": expected " + std::to_string(dim * dim) +
                      " (row-major) or " + std::to_string(dim) + " (diagonal) entries");
  return Matrix(dim, std::move(flat));
}

inline RunConfig load_run_config(const ConfigFile& cf) {
  RunConfig rc;
  rc.raw = cf;

  int sources = cf.has("population.mu1") + cf.has("population.n") + cf.has("population.path");
  std::string src = cf.get_string("population.source", "");
  if (src.empty()) {
    if (sources != 1)
      throw ConfigError("population: exactly one source required (gaussian mu1/sigmoid n/csv path)");
    src = cf.has("population.mu1") ? "gaussian" : cf.has("population.n") ? "sigmoid" : "csv";
  }
  if (src == "gaussian") {
    rc.source = PopulationSource::Gaussian;
    rc.gaussian.mu1 = cf.get_vector("population.mu1");
    rc.gaussian.mu0 = cf.get_vector("population.mu0");
    std::size_t dim = rc.gaussian.mu1.size();
    if (rc.gaussian.mu0.size() != dim) throw ConfigError("population: mu0/mu1 dimension mismatch");
    rc.gaussian.sigma1 = parse_matrix(cf, "population.sigma1", dim);
    rc.gaussian.sigma0 = parse_matrix(cf, "population.sigma0", dim);
    // `n` is the total count, split evenly unless n1/n0 override it.
    std::uint64_t total = cf.get_u64("population.n", 20000);
    rc.gaussian.n1 = static_cast<std::size_t>(cf.get_u64("population.n1", total / 2));
    rc.gaussian.n0 = static_cast<std::size_t>(cf.get_u64("population.n0", total - total / 2));
    rc.gaussian.scale = cf.get_double("population.scale", 1.0);
  } else if (src == "sigmoid") {
    rc.source = PopulationSource::Sigmoid;
    rc.sigmoid.n = static_cast<std::size_t>(cf.get_u64("population.n", 150));
    rc.sigmoid.weights = cf.get_vector("population.weights", rc.sigmoid.weights);
  } else if (src == "csv") {
    rc.source = PopulationSource::Csv;
    rc.csv_path = cf.get_string("population.path");
    if (!std::filesystem::exists(rc.csv_path))
      throw ConfigError("population.path does not exist: " + rc.csv_path);
  } else {
    throw ConfigError("population.source must be gaussian, sigmoid, or csv");
  }

  if (cf.has("classifier.spec")) {
    try {
      rc.classifier = parse_classifier(cf.get_string("classifier.spec"));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("classifier.spec: ") + e.what());
    }
  } else if (cf.has("classifier.theta")) {
    try {
      rc.classifier = Classifier::from_weights(cf.get_vector("classifier.theta"),
                                               cf.get_double("classifier.theta0"));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("classifier.theta: ") + e.what());
    }
  }

  std::string bias_kind = cf.get_string("bias.kind", "identity");
  if (bias_kind == "identity") {
    rc.bias = WeightingFunction::identity();
  } else if (bias_kind == "prelec") {
    double g = cf.get_double("bias.gamma", 0.5);
    if (!(g > 0.0)) throw ConfigError("bias.gamma must be > 0");
    rc.bias = WeightingFunction::prelec(g);
  } else if (bias_kind == "table") {
    std::string path = cf.get_string("bias.table");
    if (!std::filesystem::exists(path)) throw ConfigError("bias.table does not exist: " + path);
    rc.bias = load_weighting_csv(path);
  } else {
    throw ConfigError("bias.kind must be identity, prelec, or table");
  }
  rc.sort_descending = cf.get_bool("bias.sort_descending", false);

  rc.cost_spec = cf.get_string("cost.cost", cf.get_string("cost.model", "norm2"));
  std::string n2b = cf.get_string("cost.norm2_budget", "distance");
  if (n2b == "distance")
    rc.norm2_budget = Norm2Budget::Distance;
  else if (n2b == "squared")
    rc.norm2_budget = Norm2Budget::Squared;
  else
    throw ConfigError("cost.norm2_budget must be distance or squared");

  rc.budget = cf.get_double("agent.budget", 0.0);
  if (rc.budget < 0.0) throw ConfigError("agent.budget must be nonnegative");
  rc.reward = cf.get_double("agent.reward", kInf);
  if (!(rc.reward > 0.0)) throw ConfigError("agent.reward must be positive");

  double up = cf.get_double("loss.u_plus", 1.0), um = cf.get_double("loss.u_minus", 1.0);
  if (!(up > 0.0) || !(um > 0.0)) throw ConfigError("loss weights must be positive");
  rc.loss = LossSpec(up, um);

  rc.search.theta_steps = static_cast<std::size_t>(cf.get_u64("search.theta_steps", 181));
  rc.search.theta0_steps = static_cast<std::size_t>(cf.get_u64("search.theta0_steps", 201));
  rc.search.theta0_min = cf.get_double("search.theta0_min", rc.search.theta0_min);
  rc.search.theta0_max = cf.get_double("search.theta0_max", rc.search.theta0_max);

  std::string mode = cf.get_string("run.mode", "oblivious");
  if (mode == "oblivious")
    rc.mode = DeploymentMode::Oblivious;
  else if (mode == "aware_rational")
    rc.mode = DeploymentMode::AwareRational;
  else if (mode == "aware_biased")
    rc.mode = DeploymentMode::AwareBiased;
  else
    throw ConfigError("run.mode must be oblivious, aware_rational, or aware_biased");

  rc.seed = cf.get_u64("run.seed", 0);
  rc.seed_explicit = cf.has("run.seed");
  // [population] seed, when present, pins the sampling stream independently
  // of the run seed.
  rc.population_seed = cf.get_u64("population.seed", rc.seed);
  rc.population_seed_explicit = cf.has("population.seed");
  rc.gaussian.seed = rc.population_seed;
  rc.out_dir = cf.get_string("run.out", "out");
  return rc;
}

inline RunConfig load_run_config_file(const std::string& path) {
  return load_run_config(ConfigFile::parse_file(path));
}

}  // namespace stratasim

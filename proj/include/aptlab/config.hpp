#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "aptlab/chain_models.hpp"
#include "aptlab/errors.hpp"
#include "aptlab/limit_processes.hpp"
#include "aptlab/noise.hpp"
#include "aptlab/schedule.hpp"
#include "aptlab/test_function.hpp"

namespace aptlab::config {

using json = nlohmann::json;

// lookups that fail with a ValidationError naming the key
template <class T>
T get(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError("config: missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("config: key '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key);
}

inline PowerLog parse_powerlog(const json& j) {
  return {get_or(j, "A", 1.0), get_or(j, "a", 1.0), get_or(j, "b", 0.0)};
}

/// {"type": "powerlog", A, a, b} | {"type": "explicit", values, tail} | {"type": "weighted", a}
inline StepSchedule parse_schedule(const json& j) {
  const auto type = get_or<std::string>(j, "type", "powerlog");
  if (type == "powerlog") return StepSchedule(parse_powerlog(j));
  if (type == "explicit") {
    return StepSchedule(ExplicitSteps{get<std::vector<double>>(j, "values"),
                                      parse_powerlog(j.contains("tail") ? j.at("tail") : json::object())});
  }
  if (type == "weighted") return StepSchedule(WeightedSteps{get_or(j, "a", 0.0)});
  throw ValidationError("config: unknown schedule type '" + type + "'");
}

/// {"type": "pm1"} | {"type": "atoms", "atoms": [[value, prob], ...]} | {"type": "gaussian", variance, dim}
inline NoiseSpec parse_noise(const json& j) {
  const auto type = get_or<std::string>(j, "type", "pm1");
  if (type == "pm1") return NoiseSpec::plus_minus_one();
  if (type == "gaussian") {
    const double v = get_or(j, "variance", 1.0);
    const auto dim = get_or<std::size_t>(j, "dim", 1);
    return NoiseSpec(Gaussian{std::vector<double>(dim, 0.0), std::vector<double>(dim, v)});
  }
  if (type == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& a : get<json>(j, "atoms")) {
      if (!a.is_array() || a.size() != 2) throw ValidationError("config: atoms are [value, prob] pairs");
      atoms.push_back({{a[0].get<double>()}, a[1].get<double>()});
    }
    return NoiseSpec(FiniteSupport{std::move(atoms)});
  }
  throw ValidationError("config: unknown noise type '" + type + "'");
}

struct DriftEntry {
  ScalarFn drift;
  ScalarFn potential;  // V with drift = -V'
  std::string description;
};

inline const std::map<std::string, DriftEntry>& drift_registry() {
  static const std::map<std::string, DriftEntry> r{
      {"linear", {[](double y) { return -y; }, [](double y) { return 0.5 * y * y; }, "b(y) = -y"}},
      {"langevin-sin",
       {[](double y) { return -y + std::sin(y); }, [](double y) { return 0.5 * y * y + std::cos(y); },
        "b(y) = -y + sin(y)"}},
      {"double-well",
       {[](double y) { return y - y * y * y; }, [](double y) { return 0.25 * y * y * y * y - 0.5 * y * y; },
        "b(y) = y - y^3"}},
  };
  return r;
}

inline const DriftEntry& drift(const std::string& name) {
  const auto& r = drift_registry();
  auto it = r.find(name);
  if (it == r.end()) throw ValidationError("config: unknown drift '" + name + "'");
  return it->second;
}

inline PBAStrategy strategy(const std::string& name, double pA, double pB) {
  if (name == "identity") return {[](double x) { return x; }, [](double) { return 1.0; }, pA, pB};
  if (name == "quadratic") return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }, pA, pB};
  throw ValidationError("config: unknown bandit strategy '" + name + "'");
}

inline Eigen::MatrixXd parse_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("config: matrix must be a non-empty array of rows");
  const auto K = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd R(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != K) {
      throw ValidationError("config: matrix must be square");
    }
    for (Eigen::Index k = 0; k < K; ++k) R(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return R;
}

/// model object plus an optional schedule object (each model has a default schedule)
inline ChainModel parse_model(const json& m, const std::optional<json>& sched) {
  const auto type = get<std::string>(m, "type");
  auto schedule_or = [&](StepSchedule fallback) { return sched ? parse_schedule(*sched) : fallback; };
  if (type == "wrw") {
    const double a = get_or(m, "weight_exponent", 0.0);
    const NoiseSpec noise = parse_noise(m.contains("noise") ? m.at("noise") : json::object());
    if (sched) throw ValidationError("config: the WRW schedule is fixed by its weights; drop 'schedule'");
    return ChainModel::wrw(noise, a);
  }
  if (type == "pba") {
    PBA p;
    p.law = strategy(get_or<std::string>(m, "strategy", "identity"), get_or(m, "pA", 0.7), get_or(m, "pB", 0.4));
    if (m.contains("truncation")) {
      const auto& t = m.at("truncation");
      p.truncation = Truncation{get<std::uint64_t>(t, "l"), get<double>(t, "delta")};
    }
    return ChainModel(p, schedule_or(StepSchedule(PowerLog{1.0, 0.5, 0.0})));
  }
  if (type == "overpba") {
    return ChainModel(OverPBA{get_or(m, "pA", 0.7), get_or(m, "pB", 0.4), get_or(m, "sigma", 0.5)},
                      schedule_or(StepSchedule(PowerLog{1.0, 0.5, 0.0})));
  }
  if (type == "dses") {
    const auto& d = drift(get_or<std::string>(m, "drift", "linear"));
    const double sigma = get_or(m, "sigma", 1.0);
    require(sigma > 0.0, "config: dses sigma must be positive");
    const auto dim = get_or<std::size_t>(m, "dim", 1);
    return ChainModel(DSES{dim, d.drift, [sigma](double) { return sigma; }, NoiseSpec::standard_normal(dim)},
                      schedule_or(StepSchedule(PowerLog{1.0, 1.0, 0.0})));
  }
  if (type == "llrw") {
    return ChainModel::llrw(parse_matrix(get<json>(m, "R")),
                            schedule_or(StepSchedule(ExplicitSteps{{1.0}, PowerLog{2.0, 1.0, 0.0}})));
  }
  if (type == "jump-toy") {
    const NoiseSpec F = parse_noise(m.contains("F") ? m.at("F") : json::object());
    const NoiseSpec G = parse_noise(m.contains("G") ? m.at("G") : json::object());
    if (sched) return ChainModel(JumpDiffToy{F, G}, parse_schedule(*sched));
    return ChainModel::jump_toy(F, G);
  }
  throw ValidationError("config: unknown model type '" + type + "'");
}

inline ChainModel parse_model(const json& root) {
  std::optional<json> sched;
  if (root.contains("schedule")) sched = root.at("schedule");
  return parse_model(get<json>(root, "model"), sched);
}

/// {"type": "auto"} uses the model's own limit; explicit pdmp/ou specs override.
inline LimitProcess parse_limit(const json& root, const ChainModel& model) {
  if (!root.contains("limit")) return limit_of(model);
  const auto& l = root.at("limit");
  const auto type = get_or<std::string>(l, "type", "auto");
  if (type == "auto") return limit_of(model);
  if (type == "ou") return LimitProcess(OU{get<double>(l, "l"), get<double>(l, "sigma"), get_or<std::size_t>(l, "dim", 1)});
  if (type == "pdmp") {
    return LimitProcess(LinearJumpPDMP{get<double>(l, "a"), get<double>(l, "b"), get<double>(l, "c"), get<double>(l, "d")});
  }
  throw ValidationError("config: unknown limit type '" + type + "'");
}

inline LinearJumpPDMP parse_pdmp(const json& l) {
  LinearJumpPDMP p{get<double>(l, "a"), get<double>(l, "b"), get<double>(l, "c"), get<double>(l, "d")};
  LimitProcess check(p);  // runs the validation
  return p;
}

/// "id" from the standard dictionary, or {"poly": [c0, c1, ...]}.
inline TestFunction parse_function(const json& j) {
  if (j.is_object() && j.contains("poly")) return fn::polynomial(get<std::vector<double>>(j, "poly"));
  if (!j.is_string()) throw ValidationError("config: a test function is a dictionary id or {\"poly\": [...]}");
  const auto id = j.get<std::string>();
  if (id == "y") return fn::identity();
  if (id == "y^2") return fn::square();
  for (const auto& f : FunctionDictionary::standard().members()) {
    if (f.id() == id) return f;
  }
  throw ValidationError("config: unknown test function '" + id + "'");
}

/// {"lo", "hi", "points"} or an explicit array
inline std::vector<double> parse_grid(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  const double lo = get<double>(j, "lo"), hi = get<double>(j, "hi");
  const auto pts = get<std::size_t>(j, "points");
  require(pts >= 2 && hi > lo, "config: grid needs hi > lo and at least 2 points");
  std::vector<double> g(pts);
  for (std::size_t i = 0; i < pts; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pts - 1);
  return g;
}

/// Explicit list, or {"from", "to", "per_decade"} on a log scale.
inline std::vector<std::uint64_t> parse_index_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<std::uint64_t>>();
  const double from = get<double>(j, "from"), to = get<double>(j, "to");
  const int per = get_or(j, "per_decade", 1);
  require(from >= 1 && to >= from && per >= 1, "config: index list needs 1 <= from <= to");
  std::vector<std::uint64_t> out;
  for (double e = std::log10(from); e <= std::log10(to) + 1e-9; e += 1.0 / per) {
    const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, e)));
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"trajectory", "gap-scan", "pseudo-gap", "stationary", "rate-fit",
                                          "fdd",        "doeblin",  "lyapunov",   "martingale"};
  return k;
}

/// Checks the parts every experiment shares before anything runs.
inline void validate_common(const json& root) {
  if (!root.is_object()) throw ValidationError("config: top level must be an object");
  const auto kind = get<std::string>(root, "experiment");
  const auto& k = experiment_kinds();
  if (std::find(k.begin(), k.end(), kind) == k.end()) {
    throw ValidationError("config: unknown experiment kind '" + kind + "'");
  }
  if (root.contains("seed")) get<std::uint64_t>(root, "seed");
  if (root.contains("replicas")) require(get<std::uint64_t>(root, "replicas") >= 1, "config: replicas >= 1");
  if (root.contains("schedule")) parse_schedule(root.at("schedule"));
}

}  // namespace aptlab::config

#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"

#include "aptlab/errors.hpp"
#include "aptlab/generator_lab.hpp"
#include "aptlab/limit_processes.hpp"
#include "aptlab/measure_kit.hpp"
#include "aptlab/stationary.hpp"

namespace aptlab::io {

using json = nlohmann::json;

/// JSON has no inf/nan; those become strings.
inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline json to_json(const RateFit& r) {
  return {{"u", number(r.u)},           {"intercept", number(r.intercept)}, {"residual", number(r.residual)},
          {"t_min", number(r.t_min)}, {"t_max", number(r.t_max)},         {"points_used", r.used}};
}

inline json to_json(const MomentTable& t) {
  json j = {{"method", t.method}, {"m", numbers(t.m)}};
  if (!t.se.empty()) j["se"] = numbers(t.se);
  if (t.order() >= 2) {
    j["hankel_min_eigenvalue"] = number(t.hankel_min_eigenvalue());
    j["hankel_psd"] = t.hankel_psd();
  }
  return j;
}

inline json to_json(const MomentDiscrepancy& d) {
  json rows = json::array();
  for (const auto& r : d.rows) {
    json row = {{"n", r.n},
                {"dynkin", number(r.dynkin)},
                {"paper_recursion", number(r.paper)},
                {"difference", number(r.paper - r.dynkin)},
                {"flagged", r.flagged},
                {"referee", r.referee}};
    if (r.simulated) {
      row["simulated"] = number(*r.simulated);
      row["simulated_se"] = number(*r.simulated_se);
    }
    rows.push_back(row);
  }
  return {{"rows", rows}, {"any_flagged", d.any_flagged()}, {"sigma_gate", d.sigma_gate}};
}

inline json to_json(const GapReport& g) {
  return {{"n_list", g.n_list},
          {"max_normalized_gap", numbers(g.max_normalized_gap)},
          {"slope_vs_log_n", number(g.slope_vs_log_n)},
          {"slope_vs_log_gamma", number(g.slope_vs_log_gamma)},
          {"all_zero", g.all_zero},
          {"d1", g.d1},
          {"rows", g.rows.size()}};
}

inline json to_json(const LyapunovReport& r) {
  return {{"alpha", number(r.alpha)}, {"beta", number(r.beta)},   {"y_c", number(r.y_c)},
          {"feasible", r.feasible},  {"constraints", r.constraints}, {"pass", r.pass}};
}

inline json to_json(const MartingaleReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"n", x.n},
                    {"mean_M", number(x.mean_M)},
                    {"t_M", number(x.t_M)},
                    {"mean_M2_minus_bracket", number(x.mean_centered_square)},
                    {"t_bracket", number(x.t_square)}});
  }
  return {{"rows", rows}, {"pass", r.pass}};
}

inline json to_json(const FddReport& r) {
  json rows = json::array();
  for (const auto& c : r.checks) {
    rows.push_back({{"moment", c.label}, {"chain", number(c.chain)}, {"limit", number(c.limit)},
                    {"se", number(c.se)}, {"pass", c.pass}});
  }
  return {{"checks", rows}, {"pass", r.pass}};
}

inline json to_json(const DerivativeReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"x", x.x}, {"h", x.h}, {"estimate", number(x.estimate)}, {"se", number(x.se)},
                    {"forward", x.forward}});
  }
  return {{"order", r.order}, {"t", r.t}, {"bound", number(r.bound)}, {"max_abs", number(r.max_abs)},
          {"se_at_max", number(r.se_at_max)}, {"pass", r.pass}, {"rows", rows}, {"warnings", r.warnings}};
}

inline json to_json(const DoeblinReport& r) {
  double worst_ratio = 0.0;
  for (std::size_t n = 0; n < r.tv.size(); ++n) {
    if (r.bound[n] > 0.0) worst_ratio = std::max(worst_ratio, r.tv[n] / r.bound[n]);
  }
  return {{"eps", r.eps},
          {"eps_available", r.eps_available},
          {"tv0", number(r.tv0)},
          {"pi", r.pi.p},
          {"n_max", r.tv.empty() ? 0 : r.tv.size() - 1},
          {"final_tv", r.tv.empty() ? json(nullptr) : number(r.tv.back())},
          {"final_bound", r.bound.empty() ? json(nullptr) : number(r.bound.back())},
          {"max_tv_over_bound", number(worst_ratio)},
          {"first_violation", r.first_violation},
          {"pass", r.pass}};
}

inline json to_json(const PseudoGapCurve& c) {
  json j = {{"t", numbers(c.t)}, {"gap", numbers(c.gap)}, {"T", c.T}, {"distance", to_string(c.kind)},
            {"replicas", c.replicas}, {"seed", c.seed}};
  if (!c.bound.empty()) j["bound"] = numbers(c.bound);
  return j;
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
}

}  // namespace aptlab::io

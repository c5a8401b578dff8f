#pragma once

#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

#include "aptlab/errors.hpp"
#include "aptlab/rng.hpp"

namespace aptlab {

struct Atom {
  std::vector<double> value;
  double prob = 0.0;
};

struct FiniteSupport {
  std::vector<Atom> atoms;
};

/// Independent normal components, diagonal covariance.
struct Gaussian {
  std::vector<double> mean;
  std::vector<double> variance;
};

class NoiseSpec {
 public:
  NoiseSpec() : NoiseSpec(Gaussian{{0.0}, {1.0}}) {}

  NoiseSpec(FiniteSupport fs) : kind_(std::move(fs)) {
    const auto& atoms = std::get<FiniteSupport>(kind_).atoms;
    require(!atoms.empty(), "noise: finite support needs at least one atom");
    dim_ = atoms.front().value.size();
    require(dim_ >= 1, "noise: atoms must have dimension >= 1");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      require(atoms[i].value.size() == dim_, "noise: atoms must share one dimension");
      require(atoms[i].prob >= 0.0, "noise: negative atom probability");
      total += atoms[i].prob;
      for (std::size_t j = 0; j < i; ++j) {
        require(atoms[i].value != atoms[j].value, "noise: atoms must be distinct");
      }
    }
    require(std::abs(total - 1.0) <= 1e-12, "noise: atom probabilities must sum to 1");
    cumulative_.reserve(atoms.size());
    double acc = 0.0;
    for (const auto& a : atoms) cumulative_.push_back(acc += a.prob);
  }

  NoiseSpec(Gaussian g) : kind_(std::move(g)) {
    const auto& gs = std::get<Gaussian>(kind_);
    require(!gs.mean.empty() && gs.mean.size() == gs.variance.size(),
            "noise: Gaussian mean and variance must have equal positive length");
    for (double v : gs.variance) require(v > 0.0, "noise: Gaussian variances must be positive");
    dim_ = gs.mean.size();
  }

  /// Rademacher noise (+1 or -1, each with probability 1/2).
  static NoiseSpec plus_minus_one() {
    return FiniteSupport{{{{-1.0}, 0.5}, {{1.0}, 0.5}}};
  }
  static NoiseSpec standard_normal(std::size_t dim = 1) {
    return Gaussian{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  }

  std::size_t dim() const { return dim_; }
  bool finite() const { return std::holds_alternative<FiniteSupport>(kind_); }
  const FiniteSupport& atoms() const { return std::get<FiniteSupport>(kind_); }
  const Gaussian& gaussian() const { return std::get<Gaussian>(kind_); }

  std::vector<double> mean() const {
    if (!finite()) return gaussian().mean;
    std::vector<double> m(dim_, 0.0);
    for (const auto& a : atoms().atoms)
      for (std::size_t k = 0; k < dim_; ++k) m[k] += a.prob * a.value[k];
    return m;
  }

  /// Per-component variance.
  std::vector<double> variance() const {
    if (!finite()) return gaussian().variance;
    const auto m = mean();
    std::vector<double> v(dim_, 0.0);
    for (const auto& a : atoms().atoms)
      for (std::size_t k = 0; k < dim_; ++k) v[k] += a.prob * (a.value[k] - m[k]) * (a.value[k] - m[k]);
    return v;
  }

  bool centered(double tol = 1e-12) const {
    for (double m : mean())
      if (std::abs(m) > tol) return false;
    return true;
  }

  /// Writes one draw into out[0..dim).
  void sample(Rng& rng, double* out) const {
    if (finite()) {
      const std::size_t i = sample_index(rng);
      const auto& v = atoms().atoms[i].value;
      for (std::size_t k = 0; k < dim_; ++k) out[k] = v[k];
      return;
    }
    const auto& g = gaussian();
    for (std::size_t k = 0; k < dim_; ++k) out[k] = g.mean[k] + std::sqrt(g.variance[k]) * rng.normal();
  }

  std::size_t sample_index(Rng& rng) const {
    const double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < cumulative_.size() && u >= cumulative_[i]) ++i;
    return i;
  }

 private:
  std::variant<FiniteSupport, Gaussian> kind_;
  std::size_t dim_ = 1;
  std::vector<double> cumulative_;
};

}  // namespace aptlab

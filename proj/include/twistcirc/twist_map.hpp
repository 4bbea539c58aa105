#pragma once

// Generating-function family G_n(x,x') = (x-x')^2/2 + q_n^{-(4+eps)} V(q_n x')
// and the exact area-preserving twist map it induces on the cylinder.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twistcirc/continued_fraction.hpp"

namespace twistcirc {

// Finite cosine series V(x) = sum_k c_k cos(2 pi k x), period 1. All
// derivatives are closed-form.
class Potential {
 public:
  Potential() = default;
  explicit Potential(std::vector<std::pair<int, double>> fourier_cosine)
      : terms_(std::move(fourier_cosine)) {
    for (auto& [k, c] : terms_)
      if (k < 1) throw std::invalid_argument("fourier mode k must be >= 1");
  }

  // The default single-harmonic choice (2 pi)^{-2} cos(2 pi x), scaled.
  static Potential standard(double amplitude = 1.0) {
    double twopi = 2.0 * std::numbers::pi;
    return Potential({{1, amplitude / (twopi * twopi)}});
  }

  double value(double x) const { return eval(x, 0); }
  double d1(double x) const { return eval(x, 1); }
  double d2(double x) const { return eval(x, 2); }
  double d3(double x) const { return eval(x, 3); }
  double d4(double x) const { return eval(x, 4); }

  // sum_k (2 pi k)^r |c_k|: a bound on max|V^{(r)}|, exact for one harmonic
  double derivative_bound(int order) const {
    double twopi = 2.0 * std::numbers::pi;
    double s = 0;
    for (auto& [k, c] : terms_) s += std::pow(twopi * k, order) * std::abs(c);
    return s;
  }
  // reported C^4 norm of the finite Fourier sum
  double c4_norm() const {
    double s = 0;
    for (int r = 0; r <= 4; ++r) s = std::max(s, derivative_bound(r));
    return s;
  }

  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  bool zero() const { return terms_.empty(); }

 private:
  double eval(double x, int order) const {
    double twopi = 2.0 * std::numbers::pi;
    double s = 0;
    for (auto& [k, c] : terms_) {
      double w = twopi * k;
      double u = w * x;
      double f;
      switch (order % 4) {
        case 0: f = std::cos(u); break;
        case 1: f = -std::sin(u); break;
        case 2: f = -std::cos(u); break;
        default: f = std::sin(u); break;
      }
      s += c * std::pow(w, order) * f;
    }
    return s;
  }

  std::vector<std::pair<int, double>> terms_;
};

struct StepResult {
  double x, y;
};

// Immutable map data: level index n (a convergent index of alpha), eps in
// (0,1), and the cached coefficient q_n^{-(3+eps)}. All coordinates are
// lifted reals; reduction mod 1 happens only inside circle norms.
class TwistMap {
 public:
  TwistMap(ConstantTypeIrrational alpha, int n_index, double eps,
           Potential potential)
      : alpha_(std::move(alpha)),
        n_index_(n_index),
        eps_(eps),
        potential_(std::move(potential)) {
    if (!(eps > 0 && eps < 1))
      throw std::invalid_argument("eps must lie in (0,1)");
    qn_ = static_cast<double>(alpha_.q(n_index));
    coeff_ = std::pow(qn_, -(3.0 + eps_));
  }

  const ConstantTypeIrrational& alpha() const { return alpha_; }
  int n_index() const { return n_index_; }
  long long qn() const { return alpha_.q(n_index_); }
  double eps() const { return eps_; }
  double coeff() const { return coeff_; }  // q_n^{-(3+eps)}
  const Potential& potential() const { return potential_; }

  // G_n(x, x'); invariant under the diagonal unit translation
  double action(double x, double xp) const {
    double d = x - xp;
    return 0.5 * d * d + (coeff_ / qn_) * potential_.value(qn_ * xp);
  }

  double d1_action(double x, double xp) const { return x - xp; }
  double d2_action(double x, double xp) const {
    return (xp - x) + coeff_ * potential_.d1(qn_ * xp);
  }

  StepResult step(double x, double y) const {
    double xp = x + y;
    double yp = y + coeff_ * potential_.d1(qn_ * xp);
    return {xp, yp};
  }

  StepResult inverse_step(double xp, double yp) const {
    double y = yp - coeff_ * potential_.d1(qn_ * xp);
    return {xp - y, y};
  }

  // row-major [[dxp/dx, dxp/dy], [dyp/dx, dyp/dy]]; det == 1 identically
  std::array<double, 4> jacobian(double x, double y) const {
    double c = coeff_ * qn_ * potential_.d2(qn_ * (x + y));
    return {1.0, 1.0, c, 1.0 + c};
  }

  // Max deviation of the implicit generating equations y = -d1 G(x,x'),
  // y' = d2 G(x,x') over seeded random samples.
  double generating_consistency(int samples, unsigned long long seed = 1) const {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(-1.0, 1.0);
    double worst = 0;
    for (int t = 0; t < samples; ++t) {
      double x = ux(rng), y = uy(rng);
      auto [xp, yp] = step(x, y);
      worst = std::max(worst, std::abs(y + d1_action(x, xp)));
      worst = std::max(worst, std::abs(yp - d2_action(x, xp)));
    }
    return worst;
  }

 private:
  ConstantTypeIrrational alpha_;
  int n_index_;
  double eps_;
  Potential potential_;
  double qn_;
  double coeff_;
};

}  // namespace twistcirc

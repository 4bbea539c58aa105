#pragma once

// Continued-fraction arithmetic for constant-type irrationals: convergents,
// Dirichlet norms ||q_n alpha||, and the kappa-indexing machinery built on
// phi(m) = log2 a_{m+1} + log2 q_m.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistcirc {

// Software extended precision (~33 significant decimal digits). Needed because
// ||q_n alpha|| = |q_n*alpha - p_n| ~ 1/q_{n+1} cancels catastrophically in
// double once q_n gets large.
using real128 = __float128;

inline real128 qabs128(real128 x) { return x < 0 ? -x : x; }

// floor for nonnegative quad values well inside the int64 range
inline real128 qfloor128(real128 x) {
  auto k = static_cast<long long>(x);
  return static_cast<real128>(k - (static_cast<real128>(k) > x ? 1 : 0));
}

inline real128 circle_norm_q(real128 x) {
  real128 f = x - qfloor128(x);
  real128 g = 1 - f;
  return f < g ? f : g;
}

// ||x|| = inf_p |x + p|, the flat metric on T = R/Z. Result in [0, 1/2].
inline double circle_norm(double x) {
  double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

// An irrational alpha in (0,1) with bounded partial quotients, held together
// with its convergents p_i/q_i and an extended-precision value.
//
// Indexing: p_0/q_0 = 0/1, q_i = a_i q_{i-1} + q_{i-2}; quotients a_1..a_D.
// A finite quotient list is extended cyclically to define the value, so the
// Dirichlet brackets stay strict at every stored index.
class ConstantTypeIrrational {
 public:
  static ConstantTypeIrrational from_partial_quotients(
      const std::vector<int>& quotients, int depth) {
    if (quotients.empty())
      throw std::invalid_argument("partial quotient list is empty");
    for (int a : quotients)
      if (a < 1)
        throw std::invalid_argument("partial quotients must be >= 1");
    if (depth < 4)
      throw std::invalid_argument("depth must be >= 4, got " +
                                  std::to_string(depth));
    ConstantTypeIrrational r;
    r.a_.resize(depth + 1);
    r.a_[0] = 0;
    for (int i = 1; i <= depth; ++i)
      r.a_[i] = quotients[(i - 1) % quotients.size()];
    r.bound_ = *std::max_element(r.a_.begin() + 1, r.a_.end());

    r.p_.assign(depth + 1, 0);
    r.q_.assign(depth + 1, 0);
    long long pm1 = 1, qm1 = 0;  // index -1
    r.p_[0] = 0;
    r.q_[0] = 1;
    for (int i = 1; i <= depth; ++i) {
      long long a = r.a_[i];
      if (r.q_[i - 1] > (int64_t{9} << 56) / a)
        throw std::invalid_argument("depth " + std::to_string(depth) +
                                    " overflows 64-bit convergents");
      r.p_[i] = a * r.p_[i - 1] + pm1;
      r.q_[i] = a * r.q_[i - 1] + qm1;
      pm1 = r.p_[i - 1];
      qm1 = r.q_[i - 1];
    }

    // value of the cyclically extended fraction, evaluated tail-first
    int total = std::max(depth, 300);
    real128 t = 0;
    for (int i = total; i >= 1; --i) {
      int ai = (i <= depth) ? r.a_[i] : quotients[(i - 1) % quotients.size()];
      t = real128(1) / (real128(ai) + t);
    }
    r.value_ = t;
    return r;
  }

  static ConstantTypeIrrational golden(int depth) {
    return from_partial_quotients({1}, depth);
  }
  static ConstantTypeIrrational silver(int depth) {
    return from_partial_quotients({2}, depth);
  }
  static ConstantTypeIrrational preset(const std::string& name, int depth) {
    if (name == "golden") return golden(depth);
    if (name == "silver") return silver(depth);
    throw std::invalid_argument("unknown alpha preset: " + name);
  }

  int depth() const { return static_cast<int>(a_.size()) - 1; }
  int bound() const { return bound_; }  // A_alpha

  int quotient(int i) const {  // a_i, 1 <= i <= depth
    if (i < 1 || i > depth())
      throw std::out_of_range("quotient index " + std::to_string(i));
    return a_[i];
  }
  long long p(int i) const {
    check_index(i);
    return p_[i];
  }
  long long q(int i) const {
    check_index(i);
    return q_[i];
  }

  real128 value_q() const { return value_; }
  double value() const { return static_cast<double>(value_); }

  // ||q_n alpha||, extended precision. Defined for 0 <= n < depth.
  double qalpha_norm(int n) const {
    if (n < 0 || n >= depth())
      throw std::out_of_range("qalpha_norm: index " + std::to_string(n) +
                              " not in [0, " + std::to_string(depth()) + ")");
    return multiple_norm(q_[n]);
  }

  // ||d alpha|| for an arbitrary integer multiple, extended precision.
  double multiple_norm(long long d) const {
    real128 x = real128(d < 0 ? -d : d) * value_;
    return static_cast<double>(circle_norm_q(x));
  }

  // Strict Dirichlet bracket 1/((a_{n+1}+2) q_n) < ||q_n alpha|| <
  // 1/(a_{n+1} q_n), plus the growth bounds q_{n+2} >= 2 q_n and
  // q_n >= sqrt(2)^{n-1}. Throws on the first violation.
  void check_invariants() const {
    for (int n = 0; n < depth(); ++n) {
      double nrm = qalpha_norm(n);
      double lo = 1.0 / (double(a_[n + 1] + 2) * double(q_[n]));
      double hi = 1.0 / (double(a_[n + 1]) * double(q_[n]));
      if (!(lo < nrm && nrm < hi))
        throw std::logic_error("Dirichlet bracket fails at n=" +
                               std::to_string(n));
    }
    for (int n = 0; n + 2 <= depth(); ++n)
      if (q_[n + 2] < 2 * q_[n])
        throw std::logic_error("q_{n+2} >= 2 q_n fails at n=" +
                               std::to_string(n));
    for (int n = 0; n <= depth(); ++n)
      if (std::pow(2.0, 0.5 * (n - 1)) > double(q_[n]) * (1 + 1e-12))
        throw std::logic_error("q_n >= sqrt(2)^{n-1} fails at n=" +
                               std::to_string(n));
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i > depth())
      throw std::out_of_range("convergent index " + std::to_string(i) +
                              " not in [0, " + std::to_string(depth()) + "]");
  }

  std::vector<int> a_;        // a_0 = 0, a_1..a_D
  std::vector<long long> p_;  // p_0..p_D
  std::vector<long long> q_;  // q_0..q_D
  int bound_ = 0;
  real128 value_ = 0;
};

// phi / floor-phi / S / kappa-check / psi / gamma0 of the kappa-indexing.
// phi(m) is defined for 0 <= m <= depth-2; the last stored quotient is
// refused as a phi argument rather than silently truncated.
class KappaMachinery {
 public:
  explicit KappaMachinery(const ConstantTypeIrrational& alpha)
      : alpha_(alpha) {
    int top = alpha_.depth() - 2;
    phi_floor_.resize(top + 1);
    for (int m = 0; m <= top; ++m) {
      phi_floor_[m] = static_cast<int>(std::floor(phi(m)));
      if (m > 0 && phi_floor_[m] < phi_floor_[m - 1])
        throw std::logic_error("phi floor not nondecreasing");
      image_.insert(phi_floor_[m]);
      if (!first_m_.count(phi_floor_[m])) first_m_[phi_floor_[m]] = m;
    }
    gamma0_ = static_cast<int>(
                  std::floor(std::log2(2.0 * (alpha_.bound() + 2)))) +
              1;
  }

  double phi(int m) const {
    if (m < 0 || m > alpha_.depth() - 2)
      throw std::out_of_range("phi: index " + std::to_string(m) +
                              " needs quotient depth > " +
                              std::to_string(m + 2));
    // a_{m+1} * q_m <= A * q_D fits a double exactly, so a single log2 keeps
    // floor(phi) away from spurious integer crossings
    double prod = double(alpha_.quotient(m + 1)) * double(alpha_.q(m));
    return std::log2(prod);
  }
  int phi_floor(int m) const {
    if (m < 0 || m >= static_cast<int>(phi_floor_.size()))
      throw std::out_of_range("phi_floor: index " + std::to_string(m));
    return phi_floor_[m];
  }

  const std::set<int>& image() const { return image_; }  // S up to depth
  int gamma0() const { return gamma0_; }
  int min_kappa() const { return *image_.begin(); }
  int max_kappa() const { return *image_.rbegin(); }

  // kappa-check: kappa itself if in S, otherwise the maximal element of S
  // below it. A miss deeper than 2 is a hard error, not a fallback.
  int kappa_check(int kappa) const {
    if (image_.count(kappa)) return kappa;
    auto it = image_.lower_bound(kappa);
    if (it == image_.begin())
      throw std::out_of_range("kappa " + std::to_string(kappa) +
                              " below min(S)=" + std::to_string(min_kappa()));
    int hat = *std::prev(it);
    if (hat < kappa - 2)
      throw std::logic_error("no element of S within 2 below kappa=" +
                             std::to_string(kappa));
    return hat;
  }

  // psi(kappa) = min{ m : floor(phi(m)) = kappa-check }
  int psi(int kappa) const { return first_m_.at(kappa_check(kappa)); }

  struct Windows {
    int n_kappa;  // psi(kappa)
    int Ntilde;   // n_kappa - 1
    int Nbar;     // n_kappa + 2*gamma0
  };

  Windows windows(int kappa) const {
    int nk = psi(kappa);
    int nbar = nk + 2 * gamma0_;
    if (nbar >= alpha_.depth())
      throw std::out_of_range(
          "kappa=" + std::to_string(kappa) + " needs convergent depth >= " +
          std::to_string(nbar + 1) + ", have " +
          std::to_string(alpha_.depth()));
    return {nk, nk - 1, nbar};
  }

  // Checks "q_M <= q_m^{1+delta}  implies  M <= m + [m/2]" at one (m, M).
  bool check_arithmetic_growth(int m, int M, double delta) const {
    if (M < m || m < 20)
      throw std::invalid_argument("need M >= m >= 20");
    double dmax = std::log(2.0) / (5.0 * std::log(1.0 + alpha_.bound()));
    if (!(delta > 0 && delta < dmax))
      throw std::invalid_argument("delta outside (0, ln2/(5 ln(1+A)))");
    double lqm = std::log(double(alpha_.q(m)));
    double lqM = std::log(double(alpha_.q(M)));
    bool hyp = lqM <= (1.0 + delta) * lqm;
    return !hyp || (M <= m + m / 2);
  }

  const ConstantTypeIrrational& alpha() const { return alpha_; }

 private:
  ConstantTypeIrrational alpha_;
  std::vector<int> phi_floor_;
  std::set<int> image_;
  std::map<int, int> first_m_;
  int gamma0_;
};

// kappa_0(n_0) = [log2 a_{n0+1} + log2 q_{n0}]
inline int kappa_of_n(const KappaMachinery& km, int n0) {
  if (n0 >= km.alpha().depth() - 1)
    throw std::out_of_range("kappa_of_n: n0=" + std::to_string(n0) +
                            " too deep for stored quotients");
  return km.phi_floor(n0);
}

}  // namespace twistcirc

#pragma once

// Chord algebra over a periodic minimal configuration: lambda/theta/Theta/r/s,
// Type-I / Type-II classification, pair and quadruple families, and seeded
// deterministic enumeration for the sup estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "twistcirc/continued_fraction.hpp"
#include "twistcirc/minimal_config.hpp"

namespace twistcirc {

namespace detail {
// signed representative of x mod 1 in (-1/2, 1/2]
inline double wrap_half(double x) {
  double f = x - std::floor(x);
  return f > 0.5 ? f - 1.0 : f;
}
inline std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

struct Chord {
  long long i, j;
  double lambda;     // ||(j-i) alpha||, true alpha, F-invariant
  double theta;      // x_j - x_i, lifted
  double theta_red;  // representative of theta mod 1 in (0, 1/2]
  double Theta;      // ||theta|| = theta_red
  double r;          // y_j - y_i
  double s;          // r / Theta, the first-order difference quotient

  long long step() const { return j - i; }
};

inline constexpr double kThetaFloor = 1e-13;
inline constexpr double kSMax = 2.0;

// Chords are canonically oriented: endpoints are swapped if needed so the
// reduced displacement is positive. This is the orientation under which
// s(v) = r(v)/Theta(v) is the one-sided difference quotient.
inline Chord make_chord(const Configuration& c, long long i, long long j) {
  if (i == j) throw std::invalid_argument("chord endpoints coincide");
  Chord v;
  v.i = i;
  v.j = j;
  v.theta = c.x(j) - c.x(i);
  v.theta_red = detail::wrap_half(v.theta);
  if (std::abs(v.theta_red) < kThetaFloor)
    throw DegeneracyError("chord spatial length below degeneracy floor");
  if (v.theta_red < 0) {
    std::swap(v.i, v.j);
    v.theta = -v.theta;
    v.theta_red = -v.theta_red;
  }
  v.lambda = c.map().alpha().multiple_norm(v.j - v.i);
  v.Theta = v.theta_red;
  v.r = c.y(v.j) - c.y(v.i);
  v.s = v.r / v.Theta;
  if (std::abs(v.s) > kSMax + 1e-9)
    throw std::logic_error("|s(v)| exceeds s_max = 2");
  return v;
}

// chord shifted k steps along the orbit; lambda carried over exactly
inline Chord iterate_chord(const Configuration& c, const Chord& v,
                           long long k) {
  Chord w = make_chord(c, v.i + k, v.j + k);
  w.lambda = v.lambda;
  return w;
}

// Theta(F^k v) without building the shifted chord
inline double theta_shift(const Configuration& c, const Chord& v,
                          long long k) {
  return circle_norm(c.x(v.j + k) - c.x(v.i + k));
}

inline bool classify_type1(const Chord& v, int kappa) {
  double lo = std::pow(2.0, -(kappa + 4)), hi = std::pow(2.0, -kappa);
  return v.lambda >= lo && v.lambda <= hi;
}

inline bool classify_type2(const KappaMachinery& km, const Chord& v,
                           int kappa) {
  if (!classify_type1(v, kappa)) return false;
  auto w = km.windows(kappa);
  const auto& a = km.alpha();
  double bracket = std::pow(a.bound() + 1.0, 6.0);
  double qnk = double(a.q(w.n_kappa));
  double d = double(std::llabs(v.step()));
  if (!(d >= qnk / bracket && d <= qnk * bracket)) return false;
  double nq = a.qalpha_norm(w.n_kappa);
  if (!(v.lambda >= nq && v.lambda <= 16.0 * nq)) return false;
  // sanity bound 2/q_Nbar < lambda < 2/q_Ntilde for every member
  if (!(v.lambda > 2.0 / double(a.q(w.Nbar)) &&
        v.lambda < 2.0 / double(a.q(w.Ntilde))))
    throw std::logic_error("Type-II chord violates the lambda window bounds");
  return true;
}

// --- pairs -----------------------------------------------------------------

struct ChordPair {
  Chord v1, v2;
  double lambda;  // (||(i2-i1) alpha|| + ||(j2-j1) alpha||)/2
  double Theta;   // ||x_{i2} - x_{i1}||
};

inline double pair_lambda(const ConstantTypeIrrational& a, const Chord& u,
                          const Chord& w) {
  return 0.5 * (a.multiple_norm(w.i - u.i) + a.multiple_norm(w.j - u.j));
}

// Ordering witness: all endpoints lifted from x_{i1}; requires the chain
// 0 < t(j1) <= t(i2) < t(j2) <= 1/2.
inline bool pair_ordering(const Configuration& c, const Chord& u,
                          const Chord& w) {
  double t1 = detail::wrap_half(c.x(u.j) - c.x(u.i));
  double t2 = detail::wrap_half(c.x(w.i) - c.x(u.i));
  double t3 = detail::wrap_half(c.x(w.j) - c.x(u.i));
  return 0 < t1 && t1 <= t2 && t2 < t3 && t3 <= 0.5;
}

// Classified construction against (kappa, r)_II. Ordering violations yield
// nullopt (not-a-pair); type/precondition violations throw.
inline std::optional<ChordPair> make_pair(const Configuration& c,
                                          const KappaMachinery& km,
                                          const Chord& v1, const Chord& v2,
                                          int kappa, int r) {
  if (!classify_type2(km, v1, kappa) || !classify_type2(km, v2, kappa))
    throw std::invalid_argument("make_pair requires Type-II chords");
  int base = r - 2 * km.gamma0();
  if (base < 0)
    throw std::invalid_argument("r < 2*gamma0: no (kappa,r) family");
  if (v1.i == v2.i) return std::nullopt;
  const auto& a = km.alpha();
  double bracket = std::pow(a.bound() + 1.0, 6.0);
  double qb = double(a.q(base));
  double e = double(std::llabs(v2.i - v1.i));
  if (!(e >= qb / bracket && e <= qb * bracket)) return std::nullopt;
  double lam = pair_lambda(a, v1, v2);
  double nq = a.qalpha_norm(base);
  if (!(lam >= nq && lam <= 16.0 * nq)) return std::nullopt;
  // window bound on the pair lambda: kept as a membership filter so every
  // accepted pair satisfies it
  if (!(lam > 2.0 / double(a.q(r)) && lam < 1.0 / qb)) return std::nullopt;
  if (!pair_ordering(c, v1, v2)) return std::nullopt;
  ChordPair p{v1, v2, lam, circle_norm(c.x(v2.i) - c.x(v1.i))};
  if (p.Theta < v1.Theta - 1e-12)
    throw std::logic_error("pair violates Theta(v1,v2) >= Theta(v1)");
  return p;
}

inline ChordPair iterate_pair(const Configuration& c, const ChordPair& p,
                              long long k) {
  ChordPair q;
  q.v1 = iterate_chord(c, p.v1, k);
  q.v2 = iterate_chord(c, p.v2, k);
  q.lambda = p.lambda;
  q.Theta = circle_norm(c.x(q.v2.i) - c.x(q.v1.i));
  return q;
}

inline double pair_theta_shift(const Configuration& c, const ChordPair& p,
                               long long k) {
  return circle_norm(c.x(p.v2.i + k) - c.x(p.v1.i + k));
}

// --- quadruples ------------------------------------------------------------

struct ChordQuadruple {
  ChordPair front;  // (v1, v2)
  ChordPair back;   // (v3, v4)
  double lambda;    // (lambda(v1,v3) + lambda(v2,v4))/2
  double Theta;
};

inline std::optional<ChordQuadruple> make_quadruple(
    const Configuration& c, const KappaMachinery& km, const ChordPair& front,
    const ChordPair& back, int kappa, int r, int s) {
  if (s > r) throw std::invalid_argument("quadruple requires s <= r");
  int base = s - 2 * km.gamma0();
  if (base < 0)
    throw std::invalid_argument("s < 2*gamma0: no (kappa,r,s) family");
  const auto& a = km.alpha();
  const Chord &v1 = front.v1, &v2 = front.v2, &v3 = back.v1, &v4 = back.v2;
  double bracket = std::pow(a.bound() + 1.0, 6.0);
  double qb = double(a.q(base));
  double g = double(std::llabs(v3.i - v1.i));
  if (!(g >= qb / bracket && g <= qb * bracket)) return std::nullopt;
  double lam = 0.5 * (pair_lambda(a, v1, v3) + pair_lambda(a, v2, v4));
  double nq = a.qalpha_norm(base);
  if (!(lam >= nq && lam < 16.0 * nq)) return std::nullopt;
  // full ordering chain over the eight endpoints
  double t0 = 0;
  double ts[7];
  const Chord* ch[4] = {&v1, &v2, &v3, &v4};
  int idx = 0;
  double anchor = c.x(v1.i);
  for (int k = 0; k < 4; ++k) {
    if (k > 0) ts[idx++] = detail::wrap_half(c.x(ch[k]->i) - anchor);
    ts[idx++] = detail::wrap_half(c.x(ch[k]->j) - anchor);
  }
  double prev = t0;
  for (int k = 0; k < 7; ++k) {
    if (!(ts[k] > 0 && ts[k] <= 0.5)) return std::nullopt;
    bool strict = (k % 2 == 0);  // i_m < j_m strict, j_m <= i_{m+1}
    if (strict ? !(ts[k] > prev) : !(ts[k] >= prev)) return std::nullopt;
    prev = ts[k];
  }
  double th = (c.x(v4.j) + c.x(v4.i) + c.x(v3.j) + c.x(v3.i) - c.x(v2.j) -
               c.x(v2.i) - c.x(v1.j) - c.x(v1.i)) /
              4.0;
  return ChordQuadruple{front, back, lam, circle_norm(th)};
}

inline ChordQuadruple iterate_quadruple(const Configuration& c,
                                        const ChordQuadruple& qd,
                                        long long k) {
  ChordQuadruple out;
  out.front = iterate_pair(c, qd.front, k);
  out.back = iterate_pair(c, qd.back, k);
  out.lambda = qd.lambda;
  double th = (c.x(out.back.v2.j) + c.x(out.back.v2.i) + c.x(out.back.v1.j) +
               c.x(out.back.v1.i) - c.x(out.front.v2.j) - c.x(out.front.v2.i) -
               c.x(out.front.v1.j) - c.x(out.front.v1.i)) /
              4.0;
  out.Theta = circle_norm(th);
  return out;
}

// --- enumeration -----------------------------------------------------------

// Steps d whose ||d alpha|| falls in [band_lo, band_hi], scanned over
// [d_lo, d_hi]. Incremental filter over the extended-precision norms.
inline std::vector<long long> admissible_steps(const ConstantTypeIrrational& a,
                                               long long d_lo, long long d_hi,
                                               double band_lo,
                                               double band_hi) {
  std::vector<long long> out;
  for (long long d = std::max<long long>(1, d_lo); d <= d_hi; ++d) {
    double lam = a.multiple_norm(d);
    if (lam >= band_lo && lam <= band_hi) out.push_back(d);
  }
  return out;
}

struct EnumerationPolicy {
  // sampled steps stay within step_cap_factor * q_{n_kappa} so that the
  // rational-window drift stays far below every probed scale; Def 3.3
  // membership is still checked in full
  double step_cap_factor = 16.0;
  int max_steps = 24;  // distinct step values per family
};

// Deterministic (seeded) Type-II sample. The canonical step q_{n_kappa} is
// always attempted first; candidates are generated in a budget-independent
// order so growing the budget only extends the sample.
inline std::vector<Chord> enumerate_type2(const Configuration& c,
                                          const KappaMachinery& km, int kappa,
                                          int budget,
                                          unsigned long long seed,
                                          EnumerationPolicy pol = {}) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  auto w = km.windows(kappa);
  const auto& a = km.alpha();
  long long qnk = a.q(w.n_kappa);
  double bracket = std::pow(a.bound() + 1.0, 6.0);
  double nq = a.qalpha_norm(w.n_kappa);
  double t1lo = std::pow(2.0, -(kappa + 4)), t1hi = std::pow(2.0, -kappa);
  double lo = std::max(nq, t1lo), hi = std::min(16.0 * nq, t1hi);
  long long d_lo = static_cast<long long>(std::ceil(double(qnk) / bracket));
  long long d_hi = static_cast<long long>(
      std::min(double(qnk) * bracket,
               double(qnk) * pol.step_cap_factor));
  d_hi = std::min(d_hi, c.q() / 2);
  auto steps = admissible_steps(a, d_lo, d_hi, lo, hi);
  // canonical step first, then evenly thinned
  std::vector<long long> chosen;
  if (std::find(steps.begin(), steps.end(), qnk) != steps.end())
    chosen.push_back(qnk);
  if (!steps.empty()) {
    size_t take = std::min<size_t>(steps.size(), pol.max_steps);
    for (size_t t = 0; t < take; ++t) {
      long long d = steps[t * steps.size() / take];
      if (std::find(chosen.begin(), chosen.end(), d) == chosen.end())
        chosen.push_back(d);
    }
  }
  std::vector<Chord> fam;
  long long q = c.q();
  int per_step = std::max(1, budget);
  for (int t = 0; t < per_step && static_cast<int>(fam.size()) < budget; ++t) {
    for (size_t si = 0;
         si < chosen.size() && static_cast<int>(fam.size()) < budget; ++si) {
      long long d = chosen[si];
      // stratified base with per-candidate hash jitter (budget independent)
      int strata = 64;
      long long base =
          (static_cast<long long>(t % strata) * q) / strata +
          static_cast<long long>(
              detail::splitmix(seed ^ detail::splitmix(
                                          (std::uint64_t(d) << 20) ^ t)) %
              std::max<long long>(1, q / strata));
      try {
        Chord v = make_chord(c, base % q, base % q + d);
        if (classify_type2(km, v, kappa)) fam.push_back(v);
      } catch (const DegeneracyError&) {
      }
    }
  }
  std::sort(fam.begin(), fam.end(), [](const Chord& x, const Chord& y) {
    return std::pair(x.step(), x.i) < std::pair(y.step(), y.i);
  });
  fam.erase(std::unique(fam.begin(), fam.end(),
                        [](const Chord& x, const Chord& y) {
                          return x.i == y.i && x.j == y.j;
                        }),
            fam.end());
  if (fam.empty())
    throw std::runtime_error("empty Type-II family at kappa=" +
                             std::to_string(kappa) +
                             " (window/depth mismatch)");
  return fam;
}

// Type-I sample for the Lambda_I sup: all Type-II members plus extra steps
// across the full dyadic band, capped so the rational window resolves them.
inline std::vector<Chord> enumerate_type1(const Configuration& c,
                                          const KappaMachinery& km, int kappa,
                                          int budget,
                                          unsigned long long seed,
                                          EnumerationPolicy pol = {}) {
  double t1lo = std::pow(2.0, -(kappa + 4)), t1hi = std::pow(2.0, -kappa);
  double gap = std::abs(km.alpha().value() -
                        double(c.p()) / double(c.q()));
  long long d_cap = static_cast<long long>(
      std::min(double(c.q() / 2), t1lo / (64.0 * std::max(gap, 1e-300))));
  auto steps = admissible_steps(km.alpha(), 1, d_cap, t1lo, t1hi);
  std::vector<Chord> fam = enumerate_type2(c, km, kappa, budget / 2, seed, pol);
  long long q = c.q();
  size_t want = static_cast<size_t>(budget);
  for (int t = 0; t < budget && fam.size() < want; ++t) {
    for (size_t si = 0; si < steps.size() && fam.size() < want; ++si) {
      long long d = steps[(si * 7919 + 1) % steps.size()];
      long long base = static_cast<long long>(
          detail::splitmix(seed ^ detail::splitmix(std::uint64_t(d) * 31 + t)) %
          std::uint64_t(q));
      try {
        Chord v = make_chord(c, base, base + d);
        if (classify_type1(v, kappa)) fam.push_back(v);
      } catch (const DegeneracyError&) {
      }
    }
  }
  return fam;
}

// Seeded (kappa, r)_II sample. Same-step pairs dominate (their pair-lambda is
// a single ||e alpha||); a quarter of the budget tries mixed steps.
inline std::vector<ChordPair> enumerate_pairs(const Configuration& c,
                                              const KappaMachinery& km,
                                              int kappa, int r, int budget,
                                              unsigned long long seed,
                                              EnumerationPolicy pol = {}) {
  int base_idx = r - 2 * km.gamma0();
  if (base_idx < 0)
    throw std::invalid_argument("r < 2*gamma0: no (kappa,r) family");
  const auto& a = km.alpha();
  long long qb = a.q(base_idx);
  double bracket = std::pow(a.bound() + 1.0, 6.0);
  double nq = a.qalpha_norm(base_idx);
  long long e_lo = static_cast<long long>(std::ceil(double(qb) / bracket));
  long long e_hi = static_cast<long long>(std::min(
      double(qb) * bracket, double(qb) * pol.step_cap_factor));
  e_hi = std::min(e_hi, c.q() / 2);
  auto shifts = admissible_steps(a, e_lo, e_hi, nq, 16.0 * nq);
  if (std::find(shifts.begin(), shifts.end(), qb) == shifts.end() &&
      qb >= e_lo && qb <= e_hi)
    shifts.insert(shifts.begin(), qb);
  auto chords = enumerate_type2(c, km, kappa, std::max(budget, 32), seed, pol);
  std::vector<ChordPair> out;
  for (size_t t = 0; t < chords.size() * 2 &&
                     static_cast<int>(out.size()) < budget;
       ++t) {
    const Chord& v1 = chords[t % chords.size()];
    for (size_t si = 0;
         si < shifts.size() && static_cast<int>(out.size()) < budget; ++si) {
      long long e = shifts[si];
      for (long long sgn : {+1LL, -1LL}) {
        Chord lead = v1;
        try {
          Chord v2 = make_chord(c, v1.i + sgn * e, v1.j + sgn * e);
          // mixed-step quarter: replace v2's far endpoint by another step
          if (t % 4 == 3 && chords.size() > 1) {
            const Chord& alt = chords[(t / 4 + si) % chords.size()];
            v2 = make_chord(c, v1.i + sgn * e, v1.i + sgn * e + alt.step());
          }
          if (!classify_type2(km, v2, kappa)) continue;
          auto p = make_pair(c, km, lead, v2, kappa, r);
          if (!p) p = make_pair(c, km, v2, lead, kappa, r);
          if (p) {
            out.push_back(*p);
            break;
          }
        } catch (const DegeneracyError&) {
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ChordPair& x, const ChordPair& y) {
    return std::tuple(x.v1.i, x.v1.j, x.v2.i, x.v2.j) <
           std::tuple(y.v1.i, y.v1.j, y.v2.i, y.v2.j);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const ChordPair& x, const ChordPair& y) {
                          return x.v1.i == y.v1.i && x.v1.j == y.v1.j &&
                                 x.v2.i == y.v2.i && x.v2.j == y.v2.j;
                        }),
            out.end());
  return out;
}

// Seeded (kappa, r, s)_II sample via nested same-step construction.
inline std::vector<ChordQuadruple> enumerate_quadruples(
    const Configuration& c, const KappaMachinery& km, int kappa, int r, int s,
    int budget, unsigned long long seed, EnumerationPolicy pol = {}) {
  if (s > r) throw std::invalid_argument("quadruple family requires s <= r");
  int base_idx = s - 2 * km.gamma0();
  if (base_idx < 0)
    throw std::invalid_argument("s < 2*gamma0: no (kappa,r,s) family");
  const auto& a = km.alpha();
  long long qb = a.q(base_idx);
  double bracket = std::pow(a.bound() + 1.0, 6.0);
  double nq = a.qalpha_norm(base_idx);
  long long g_lo = static_cast<long long>(std::ceil(double(qb) / bracket));
  long long g_hi = static_cast<long long>(std::min(
      double(qb) * bracket, double(qb) * pol.step_cap_factor));
  g_hi = std::min(g_hi, c.q() / 2);
  auto gaps = admissible_steps(a, g_lo, g_hi, nq, 16.0 * nq);
  auto pairs = enumerate_pairs(c, km, kappa, r, std::max(budget, 16), seed,
                               pol);
  std::vector<ChordQuadruple> out;
  for (size_t t = 0;
       t < pairs.size() * 2 && static_cast<int>(out.size()) < budget; ++t) {
    const ChordPair& front = pairs[t % pairs.size()];
    for (size_t gi = 0;
         gi < gaps.size() && static_cast<int>(out.size()) < budget; ++gi) {
      for (long long sgn : {+1LL, -1LL}) {
        long long g = sgn * gaps[gi];
        try {
          ChordPair back = iterate_pair(c, front, g);
          auto qd = make_quadruple(c, km, front, back, kappa, r, s);
          if (!qd) qd = make_quadruple(c, km, back, front, kappa, r, s);
          if (qd) {
            out.push_back(*qd);
            break;
          }
        } catch (const DegeneracyError&) {
        }
      }
    }
  }
  return out;
}

}  // namespace twistcirc

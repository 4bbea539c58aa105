#pragma once

// Birkhoff (p,q)-periodic minimal configurations: damped Newton on the
// discrete Euler-Lagrange system with the cyclic tridiagonal action Hessian,
// ordering verification, and graph extraction.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twistcirc/twist_map.hpp"

namespace twistcirc {

struct ConvergenceError : std::runtime_error {
  double best_residual;
  ConvergenceError(const std::string& what, double r)
      : std::runtime_error(what), best_residual(r) {}
};

struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A (p,q)-periodic minimal state standing in for the Aubry-Mather set at the
// rational approximant p/q. Lifted reals; x_{i+q} = x_i + p exactly.
class Configuration {
 public:
  Configuration(TwistMap map, long long p, long long q, std::vector<double> x,
                double residual)
      : map_(std::move(map)), p_(p), q_(q), x_(std::move(x)),
        residual_(residual) {}

  const TwistMap& map() const { return map_; }
  long long p() const { return p_; }
  long long q() const { return q_; }
  double residual() const { return residual_; }
  const std::vector<double>& window() const { return x_; }

  double x(long long i) const {
    long long k = i % q_;
    long long cyc = (i - k) / q_;
    if (k < 0) { k += q_; cyc -= 1; }
    return x_[static_cast<size_t>(k)] + double(p_) * double(cyc);
  }
  double y(long long i) const { return x(i + 1) - x(i); }

  double action_value() const {
    double s = 0;
    for (long long i = 0; i < q_; ++i) s += map_.action(x(i), x(i + 1));
    return s;
  }

 private:
  TwistMap map_;
  long long p_, q_;
  std::vector<double> x_;
  double residual_;
};

// max_i |d1 G(x_i, x_{i+1}) + d2 G(x_{i-1}, x_i)|
inline double el_residual(const Configuration& c) {
  const auto& m = c.map();
  double worst = 0;
  for (long long i = 0; i < c.q(); ++i) {
    double g = m.d1_action(c.x(i), c.x(i + 1)) +
               m.d2_action(c.x(i - 1), c.x(i));
    worst = std::max(worst, std::abs(g));
  }
  return worst;
}

namespace detail {

inline double frac(double x) { return x - std::floor(x); }

// Solve the cyclic tridiagonal system (sub/super = -1, corners = -1) that
// arises as the periodic action Hessian, diag given. q >= 4.
inline std::vector<double> solve_cyclic(const std::vector<double>& diag,
                                        const std::vector<double>& rhs) {
  size_t n = diag.size();
  auto tridiag = [&](const std::vector<double>& d,
                     const std::vector<double>& r) {
    std::vector<double> cp(n), xp(n);
    double beta = d[0];
    xp[0] = r[0] / beta;
    for (size_t i = 1; i < n; ++i) {
      cp[i] = -1.0 / beta;
      beta = d[i] + cp[i];
      xp[i] = (r[i] + xp[i - 1]) / beta;
    }
    for (size_t i = n - 1; i-- > 0;) xp[i] -= cp[i + 1] * xp[i + 1];
    return xp;
  };
  double gamma = -diag[0];
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= 1.0 / gamma;  // alpha*beta/gamma with alpha=beta=-1
  auto xr = tridiag(d, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = -1.0;
  auto z = tridiag(d, u);
  double fact = (xr[0] - xr[n - 1] / gamma) / (1.0 + z[0] - z[n - 1] / gamma);
  for (size_t i = 0; i < n; ++i) xr[i] -= fact * z[i];
  return xr;
}

inline std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
  size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (size_t r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      for (size_t cc = col; cc < n; ++cc) A[r][cc] -= f * A[col][cc];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (size_t r = n; r-- > 0;) {
    double s = b[r];
    for (size_t cc = r + 1; cc < n; ++cc) s -= A[r][cc] * x[cc];
    x[r] = s / A[r][r];
  }
  return x;
}

struct SolveState {
  std::vector<double> x;
  double residual;
  double action;
};

inline void gradient(const TwistMap& m, long long p,
                     const std::vector<double>& x, std::vector<double>& g) {
  long long q = static_cast<long long>(x.size());
  auto at = [&](long long i) {
    long long k = ((i % q) + q) % q;
    long long cyc = (i - k) / q;
    return x[static_cast<size_t>(k)] + double(p) * double(cyc);
  };
  double qn = double(m.qn());
  for (long long i = 0; i < q; ++i)
    g[static_cast<size_t>(i)] = 2.0 * at(i) - at(i + 1) - at(i - 1) +
                                m.coeff() * m.potential().d1(qn * at(i));
}

inline double action_of(const TwistMap& m, long long p,
                        const std::vector<double>& x) {
  long long q = static_cast<long long>(x.size());
  double s = 0;
  for (long long i = 0; i < q; ++i) {
    double xi = x[static_cast<size_t>(i)];
    double xn = (i + 1 < q) ? x[static_cast<size_t>(i + 1)] : x[0] + double(p);
    s += m.action(xi, xn);
  }
  return s;
}

inline SolveState newton_solve(const TwistMap& m, long long p, long long q,
                               std::vector<double> x, double tol,
                               int max_iters) {
  std::vector<double> g(x.size()), diag(x.size());
  double qn = double(m.qn());
  gradient(m, p, x, g);
  double res = 0;
  for (double v : g) res = std::max(res, std::abs(v));
  double act = action_of(m, p, x);
  double mu = 0.0;
  for (int it = 0; it < max_iters && res > tol; ++it) {
    for (long long i = 0; i < q; ++i)
      diag[static_cast<size_t>(i)] =
          2.0 + mu +
          m.coeff() * qn * m.potential().d2(qn * x[static_cast<size_t>(i)]);
    std::vector<double> step;
    if (q >= 4) {
      step = solve_cyclic(diag, g);
    } else {
      std::vector<std::vector<double>> H(q, std::vector<double>(q, 0.0));
      for (long long i = 0; i < q; ++i) {
        H[i][i] = diag[static_cast<size_t>(i)];
        H[i][(i + 1) % q] -= 1.0;
        H[i][(i - 1 + q) % q] -= 1.0;
      }
      step = dense_solve(H, g);
    }
    bool finite = std::all_of(step.begin(), step.end(),
                              [](double v) { return std::isfinite(v); });
    if (!finite) {
      mu = (mu == 0.0) ? 1e-8 : mu * 10.0;
      continue;
    }
    // backtracking on the residual norm
    double t = 1.0;
    std::vector<double> xn(x.size()), gn(x.size());
    double best = res;
    bool accepted = false;
    for (int bt = 0; bt < 12; ++bt, t *= 0.5) {
      for (size_t i = 0; i < x.size(); ++i) xn[i] = x[i] - t * step[i];
      gradient(m, p, xn, gn);
      double rn = 0;
      for (double v : gn) rn = std::max(rn, std::abs(v));
      if (rn < best) {
        x.swap(xn);
        g.swap(gn);
        res = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      mu = (mu == 0.0) ? 1e-8 : mu * 10.0;
      if (mu > 1.0) break;
      continue;
    }
    double na = action_of(m, p, x);
    act = std::min(act, na);
    mu = 0.0;
  }
  return {std::move(x), res, action_of(m, p, x)};
}

// Potential part of the action along the uniform-shift family x + c; the
// Laplacian part is shift-invariant, so this is the whole c-dependence.
inline double phase_value(const TwistMap& m, const std::vector<double>& x,
                          double c) {
  double qn = double(m.qn());
  double s = 0;
  for (double xi : x) s += m.potential().value(qn * (xi + c));
  return s;
}

// Minimize phase_value over one period c in [0, 1/qn): coarse scan, then
// golden-section refinement. Critical points of the full action need not
// minimize along this soft direction, so the solver polishes with it.
inline double phase_minimize(const TwistMap& m, const std::vector<double>& x) {
  double period = 1.0 / double(m.qn());
  const int K = 64;
  double bestc = 0.0, bestf = phase_value(m, x, 0.0);
  for (int k = 1; k < K; ++k) {
    double c = period * double(k) / K;
    double v = phase_value(m, x, c);
    if (v < bestf) { bestf = v; bestc = c; }
  }
  double lo = bestc - period / K, hi = bestc + period / K;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = phase_value(m, x, c1), f2 = phase_value(m, x, c2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = c2; c2 = c1; f2 = f1;
      c1 = hi - gr * (hi - lo); f1 = phase_value(m, x, c1);
    } else {
      lo = c1; c1 = c2; f1 = f2;
      c2 = lo + gr * (hi - lo); f2 = phase_value(m, x, c2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline bool ordering_check(const Configuration& c);

// Minimize the periodic action over x_0..x_{q-1} with x_q = x_0 + p.
// Initialization scans 8 rigid-rotation phases; the least-action converged
// result is kept, ties broken by the smallest x_0 representative in [0,1).
inline Configuration birkhoff_minimize(const TwistMap& map, long long p,
                                       long long q,
                                       unsigned long long /*seed*/ = 0,
                                       double tol = 5e-11) {
  if (!(p > 0 && p < q))
    throw std::invalid_argument("need 0 < p < q");
  if (std::gcd(p, q) != 1)
    throw std::invalid_argument("(p,q) = (" + std::to_string(p) + "," +
                                std::to_string(q) + ") not coprime");
  std::optional<detail::SolveState> best;
  double best_phase = 0;
  for (int ph = 0; ph < 8; ++ph) {
    double x0 = double(ph) / 8.0;
    std::vector<double> x(static_cast<size_t>(q));
    for (long long i = 0; i < q; ++i)
      x[static_cast<size_t>(i)] = x0 + double(i) * double(p) / double(q);
    auto st = detail::newton_solve(map, p, q, std::move(x), tol, 60);
    if (st.residual > tol) continue;
    // descend along the uniform-shift soft mode: Newton alone lands on an
    // arbitrary critical point of the phase landscape
    for (int round = 0; round < 6; ++round) {
      double f0 = detail::phase_value(map, st.x, 0.0);
      double c = detail::phase_minimize(map, st.x);
      if (!(detail::phase_value(map, st.x, c) <
            f0 - 1e-16 * (1.0 + std::abs(f0))))
        break;
      for (double& v : st.x) v += c;
      st = detail::newton_solve(map, p, q, std::move(st.x), tol, 60);
      if (st.residual > tol) break;
    }
    if (st.residual > tol) continue;
    double rep = detail::frac(st.x[0]);
    if (!best || st.action < best->action - 1e-13 ||
        (std::abs(st.action - best->action) <= 1e-13 && rep < best_phase)) {
      best = std::move(st);
      best_phase = rep;
    }
  }
  if (!best) {
    // report the best residual reached from the natural phase
    std::vector<double> x(static_cast<size_t>(q));
    for (long long i = 0; i < q; ++i)
      x[static_cast<size_t>(i)] = double(i) * double(p) / double(q);
    auto st = detail::newton_solve(map, p, q, std::move(x), tol, 60);
    throw ConvergenceError("birkhoff_minimize: residual " +
                               std::to_string(st.residual) +
                               " did not reach tolerance",
                           st.residual);
  }
  // canonical lift: x_0 in [0,1)
  double shift = std::floor(best->x[0]);
  for (double& v : best->x) v -= shift;
  Configuration c(map, p, q, std::move(best->x), best->residual);
  {
    std::vector<double> fr(static_cast<size_t>(q));
    for (long long i = 0; i < q; ++i)
      fr[static_cast<size_t>(i)] = detail::frac(c.x(i));
    std::sort(fr.begin(), fr.end());
    for (size_t k = 0; k + 1 < fr.size(); ++k)
      if (fr[k + 1] - fr[k] < 1e-13)
        throw DegeneracyError("configuration points collide on the circle");
    if (q > 1 && fr.front() + 1.0 - fr.back() < 1e-13)
      throw DegeneracyError("configuration points collide on the circle");
  }
  if (!ordering_check(c))
    throw std::logic_error("minimizer violates the Birkhoff ordering");
  return c;
}

// Cyclic-order test: the points x_i mod 1 must be ordered exactly as the
// rotation by p/q orders the indices.
inline bool ordering_check(const Configuration& c) {
  long long q = c.q(), p = c.p();
  std::vector<long long> by_pos(static_cast<size_t>(q));
  std::iota(by_pos.begin(), by_pos.end(), 0);
  std::vector<double> fr(static_cast<size_t>(q));
  for (long long i = 0; i < q; ++i)
    fr[static_cast<size_t>(i)] = detail::frac(c.x(i));
  std::stable_sort(by_pos.begin(), by_pos.end(), [&](long long a, long long b) {
    return fr[static_cast<size_t>(a)] < fr[static_cast<size_t>(b)];
  });
  for (long long k = 0; k + 1 < q; ++k)
    if (fr[static_cast<size_t>(by_pos[k])] ==
        fr[static_cast<size_t>(by_pos[k + 1])])
      return false;
  // expected cyclic order: indices sorted by (i*p mod q)
  std::vector<long long> expect(static_cast<size_t>(q));
  for (long long i = 0; i < q; ++i)
    expect[static_cast<size_t>((i * p) % q)] = i;
  auto it = std::find(by_pos.begin(), by_pos.end(), 0);
  size_t off = static_cast<size_t>(it - by_pos.begin());
  for (long long k = 0; k < q; ++k)
    if (by_pos[(off + k) % q] != expect[static_cast<size_t>(k)]) return false;
  return true;
}

struct HolderDiagnostic {
  double exponent;          // log-log slope of sup |second difference|
  double max_second_diff;   // at stride 1
};

struct GraphSample {
  std::vector<std::pair<double, double>> points;  // (x mod 1, y), x increasing
  HolderDiagnostic holder;
};

// Candidate invariant-circle graph sample. Requires the ordering check.
inline GraphSample graph_extract(const Configuration& c) {
  if (!ordering_check(c))
    throw std::logic_error("graph_extract requires the ordering check");
  long long q = c.q();
  GraphSample g;
  g.points.reserve(static_cast<size_t>(q));
  for (long long i = 0; i < q; ++i)
    g.points.emplace_back(detail::frac(c.x(i)), c.y(i));
  std::sort(g.points.begin(), g.points.end());
  for (size_t k = 0; k + 1 < g.points.size(); ++k)
    if (g.points[k].first == g.points[k + 1].first)
      throw DegeneracyError("duplicate graph abscissae");
  // sup of |y_{k+m} - 2 y_k + y_{k-m}| over dyadic strides, slope in log-log
  std::vector<double> lh, ls;
  double d1max = 0;
  for (long long m = 1; 4 * m < q; m *= 2) {
    double sup = 0;
    for (long long k = m; k + m < q; ++k) {
      double d2 = g.points[static_cast<size_t>(k + m)].second -
                  2.0 * g.points[static_cast<size_t>(k)].second +
                  g.points[static_cast<size_t>(k - m)].second;
      sup = std::max(sup, std::abs(d2));
    }
    if (m == 1) d1max = sup;
    if (sup > 0) {
      lh.push_back(std::log(double(m) / double(q)));
      ls.push_back(std::log(sup));
    }
    if (m > q / 16) break;
  }
  double slope = 0;
  if (lh.size() >= 2) {
    double mh = 0, ms = 0;
    for (size_t i = 0; i < lh.size(); ++i) { mh += lh[i]; ms += ls[i]; }
    mh /= lh.size();
    ms /= ls.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < lh.size(); ++i) {
      num += (lh[i] - mh) * (ls[i] - ms);
      den += (lh[i] - mh) * (lh[i] - mh);
    }
    slope = den > 0 ? num / den : 0;
  }
  g.holder = {slope, d1max};
  return g;
}

// The (p_M, q_M) window standing in for the alpha-frequency configuration.
// Feasibility against a kappa-range is checked by the harness; here we only
// require M to be stored.
inline Configuration minimal_window(const TwistMap& map, int M,
                                    unsigned long long seed = 0) {
  const auto& a = map.alpha();
  return birkhoff_minimize(map, a.p(M), a.q(M), seed);
}

}  // namespace twistcirc

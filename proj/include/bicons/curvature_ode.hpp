#pragma once

// Intrinsic curvature equation of the profile curve of a non-CMC
// biconservative surface in N^3(c):
//
//   k k'' = (7/4) k'^2 + (4c/3) k^2 - 4 k^4,
//
// with prime integral (k')^2 = P(k) := -(16c/9) k^2 - 16 k^4 + C k^{7/2}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bicons/dop853.hpp"
#include "bicons/errors.hpp"

namespace bicons {

inline void require_curvature(int c) {
  if (c != 0 && c != 1 && c != -1) throw UsageError("curvature c must be 0, +1 or -1");
}

/// Second derivative k'' from the curvature ODE.
inline double ode_rhs(double k, double kp, int c) {
  require_curvature(c);
  if (!(k > 0.0)) throw DomainError("ode_rhs: k must be positive");
  return (1.75 * kp * kp + (4.0 * c / 3.0) * k * k - 4.0 * k * k * k * k) / k;
}

/// Prime-integral polynomial P(k); (k')^2 = P(k) along solutions.
inline double prime_polynomial(double k, double C, int c) {
  return -(16.0 * c / 9.0) * k * k - 16.0 * k * k * k * k + C * std::pow(k, 3.5);
}

/// Integration constant C fixed by the state (k, k').
inline double prime_constant(double k, double kp, int c) {
  require_curvature(c);
  if (!(k > 0.0)) throw DomainError("prime_constant: k must be positive");
  return (kp * kp + (16.0 * c / 9.0) * k * k + 16.0 * k * k * k * k) / std::pow(k, 3.5);
}

/// Curvature of the integral circles of the second principal direction.
inline double kappa2(double k, double C) {
  if (!(k > 0.0)) throw DomainError("kappa2: k must be positive");
  if (C == 0.0) throw DegeneracyError("kappa2: undefined for C = 0");
  return 0.75 * std::sqrt(std::abs(C)) * std::pow(k, 0.75);
}

/// W = 9|grad f|^2/(16 f^2) + 9 f^2/4 - 1 evaluated with f = 2k.
inline double w_value(double k, double kp) {
  if (!(k > 0.0)) throw DomainError("w_value: k must be positive");
  const double q = kp / k;
  return 0.5625 * q * q + 9.0 * k * k - 1.0;
}

struct AdmissibleInterval {
  double lo = 0.0;  // 0 means the interval is open at k = 0
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double k, double rel = 0.0) const {
    return k >= lo * (1.0 - rel) && k <= hi * (1.0 + rel);
  }
};

namespace detail {

// Q(k) = P(k)/k^2; same sign as P on k > 0, better scaled near 0.
inline double prime_q(double k, double C, int c) {
  return -(16.0 * c / 9.0) - 16.0 * k * k + C * std::pow(k, 1.5);
}

// Root of Q on [a,b] with Q(a), Q(b) of opposite sign.
inline double bisect_q(double a, double b, double C, int c) {
  double qa = prime_q(a, C, c);
  for (int it = 0; it < 400; ++it) {
    const double m = 0.5 * (a + b);
    const double qm = prime_q(m, C, c);
    if (qm == 0.0) return m;
    if ((qm > 0.0) == (qa > 0.0)) {
      a = m;
      qa = qm;
    } else {
      b = m;
    }
    if (b - a <= 1e-15 * std::max(std::abs(a), std::abs(b))) break;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Maximal interval of k > 0 on which P(k) >= 0. Q = P/k^2 is unimodal for
/// C > 0 (peak at k* = (3C/64)^{2/3}) and decreasing for C <= 0, so the set
/// is always a single interval.
inline AdmissibleInterval admissible_interval(double C, int c) {
  require_curvature(c);
  AdmissibleInterval iv;
  const double q0 = -(16.0 * c / 9.0);  // Q(0+)

  double peak = 0.0;
  if (C > 0.0) peak = std::pow(3.0 * C / 64.0, 2.0 / 3.0);
  const double qpeak = detail::prime_q(peak, C, c);
  if (C > 0.0 ? qpeak < 0.0 : q0 <= 0.0)
    throw DomainError("admissible_interval: P(k) < 0 for every k > 0, no real solution");

  // Lower endpoint.
  if (q0 >= 0.0 || C <= 0.0) {
    iv.lo = 0.0;
  } else if (qpeak == 0.0) {
    iv.lo = peak;
  } else {
    iv.lo = detail::bisect_q(0.0, peak, C, c);
  }

  // Upper endpoint: Q -> -inf as k -> inf.
  double a = std::max(peak, 1e-300);
  if (detail::prime_q(a, C, c) == 0.0) {
    iv.hi = a;
    return iv;
  }
  double b = std::max(2.0 * a, 1.0);
  while (detail::prime_q(b, C, c) > 0.0) b *= 2.0;
  iv.hi = detail::bisect_q(a, b, C, c);
  return iv;
}

struct CurvatureSample {
  double u = 0.0;
  double k = 0.0;
  double kp = 0.0;
};

struct TurningPoint {
  double u = 0.0;
  double k = 0.0;
};

struct BoundaryEvent {
  double u = 0.0;
  std::string reason;
};

class CurvatureSolution {
 public:
  int c = 0;
  double C = 0.0;  // prime constant at the initial point
  double u0 = 0.0;
  double k0 = 0.0;
  double kp0 = 0.0;
  std::pair<double, double> requested_span{0.0, 0.0};
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  AdmissibleInterval interval;
  std::vector<CurvatureSample> samples;  // step points, increasing u
  std::vector<TurningPoint> turning_points;
  std::vector<BoundaryEvent> events;
  bool truncated = false;
  double max_drift = 0.0;  // max |C(u) - C| / max(|C|, 1e-300) over samples
  DenseTrajectory<2> dense;

  double u_min() const { return dense.lo(); }
  double u_max() const { return dense.hi(); }

  std::pair<double, double> eval(double u) const {
    if (u < u_min() - 1e-12 || u > u_max() + 1e-12)
      throw DomainError("CurvatureSolution: u outside the solved span");
    const auto y = dense.eval(std::clamp(u, u_min(), u_max()));
    return {y[0], y[1]};
  }
  double k(double u) const { return eval(u).first; }
  double kp(double u) const { return eval(u).second; }

  std::vector<CurvatureSample> sample_uniform(int n) const {
    std::vector<CurvatureSample> out;
    if (n < 2) throw UsageError("sample_uniform: need at least 2 points");
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double u = u_min() + (u_max() - u_min()) * i / (n - 1);
      const auto [kk, kkp] = eval(u);
      out.push_back({u, kk, kkp});
    }
    return out;
  }

  double drift_at(double u) const {
    const auto [kk, kkp] = eval(u);
    return (prime_constant(kk, kkp, c) - C) / std::max(std::abs(C), 1e-300);
  }
};

namespace detail {

inline const char* status_name(OdeStatus s) {
  switch (s) {
    case OdeStatus::completed: return "completed";
    case OdeStatus::stopped: return "boundary";
    case OdeStatus::step_underflow: return "step-size underflow";
    case OdeStatus::max_steps: return "step limit";
  }
  return "unknown";
}

}  // namespace detail

/// Integrate the curvature ODE from (u=0, k0, kp0) across `span`, which must
/// contain 0. Integration stops early with a recorded boundary event when k
/// drops below 1e-8 or the state leaves {P >= 0}.
inline CurvatureSolution solve_curvature(int c, double k0, double kp0,
                                         std::pair<double, double> span,
                                         double rel_tol = 1e-10, double abs_tol = 1e-12) {
  require_curvature(c);
  if (!(k0 > 0.0)) throw DomainError("solve_curvature: k0 must be positive");
  if (!(span.first <= 0.0 && span.second >= 0.0 && span.first < span.second))
    throw UsageError("solve_curvature: span must be an interval containing 0");

  CurvatureSolution sol;
  sol.c = c;
  sol.k0 = k0;
  sol.kp0 = kp0;
  sol.requested_span = span;
  sol.rel_tol = rel_tol;
  sol.abs_tol = abs_tol;
  sol.C = prime_constant(k0, kp0, c);
  sol.interval = admissible_interval(sol.C, c);

  const double C = sol.C;
  auto rhs = [c](double, const OdeState<2>& y) -> OdeState<2> {
    if (!(y[0] > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    return {y[1], (1.75 * y[1] * y[1] + (4.0 * c / 3.0) * y[0] * y[0] -
                   4.0 * y[0] * y[0] * y[0] * y[0]) / y[0]};
  };
  auto outside = [C, c](double, const OdeState<2>& y) {
    if (y[0] < 1e-8) return true;
    const double p = prime_polynomial(y[0], C, c);
    return p < -1e-8 * std::max(1.0, std::abs(C) * std::pow(y[0], 3.5));
  };

  OdeOptions opt;
  opt.rtol = rel_tol;
  opt.atol = abs_tol;
  const OdeState<2> y0{k0, kp0};
  const auto fwd = dop853_integrate<2>(rhs, 0.0, y0, span.second, opt, outside);
  const auto bwd = dop853_integrate<2>(rhs, 0.0, y0, span.first, opt, outside);
  for (const auto* r : {&bwd, &fwd}) {
    if (r->status != OdeStatus::completed) {
      sol.truncated = true;
      sol.events.push_back({r->t_end, detail::status_name(r->status)});
    }
  }
  sol.dense = DenseTrajectory<2>(bwd, fwd, 0.0, y0);

  // Step points in increasing u.
  const auto& segs = sol.dense.segments();
  if (segs.empty()) {
    sol.samples.push_back({0.0, k0, kp0});
  } else {
    for (const auto& s : segs) {
      const double u = s.lo();
      const auto y = s.eval(u);
      sol.samples.push_back({u, y[0], y[1]});
    }
    const double u = segs.back().hi();
    const auto y = segs.back().eval(u);
    sol.samples.push_back({u, y[0], y[1]});
  }
  for (const auto& smp : sol.samples) {
    const double d = std::abs(prime_constant(smp.k, smp.kp, c) - C) / std::max(std::abs(C), 1e-300);
    sol.max_drift = std::max(sol.max_drift, d);
  }

  // k' = 0 events: sign changes between step points, refined by bisection on
  // the interpolant.
  for (const auto& s : segs) {
    double a = s.lo(), b = s.hi();
    double fa = s.eval(a)[1], fb = s.eval(b)[1];
    if (fa == 0.0 && a != sol.u_min()) continue;  // counted as previous segment's b
    if (fb == 0.0) {
      sol.turning_points.push_back({b, s.eval(b)[0]});
      continue;
    }
    if ((fa > 0.0) == (fb > 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      const double fm = s.eval(m)[1];
      if ((fm > 0.0) == (fa > 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    const double ut = 0.5 * (a + b);
    sol.turning_points.push_back({ut, s.eval(ut)[0]});
  }
  return sol;
}

}  // namespace bicons

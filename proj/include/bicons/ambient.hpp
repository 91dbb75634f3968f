#pragma once

// Signature-aware vector algebra for E^3, E^4 and the Lorentz-Minkowski
// space L^4 (metric dx1^2 + dx2^2 + dx3^2 - dx4^2), together with the
// three space-form models R^3, S^3 (unit sphere in E^4) and H^3 (upper
// sheet of <r,r> = -1 in L^4).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bicons/errors.hpp"

namespace bicons {

struct Signature {
  int dim = 3;
  int timelike_count = 0;  // 1 => last coordinate is timelike

  static constexpr Signature euclidean(int d) { return {d, 0}; }
  static constexpr Signature lorentz() { return {4, 1}; }

  constexpr bool is_lorentz() const { return timelike_count == 1; }

  // Metric coefficient of coordinate i.
  constexpr double eps(int i) const {
    return (timelike_count == 1 && i == dim - 1) ? -1.0 : 1.0;
  }

  friend constexpr bool operator==(const Signature&, const Signature&) = default;
};

inline void validate(const Signature& s) {
  if (s.dim != 3 && s.dim != 4)
    throw UsageError("signature dimension must be 3 or 4");
  if (s.timelike_count != 0 && s.timelike_count != 1)
    throw UsageError("timelike_count must be 0 or 1");
  if (s.timelike_count == 1 && s.dim != 4)
    throw UsageError("Lorentz signature requires dimension 4");
}

class AmbientVector {
 public:
  AmbientVector() = default;

  explicit AmbientVector(Signature sig) : sig_(sig) { validate(sig_); }

  AmbientVector(Signature sig, std::initializer_list<double> xs) : sig_(sig) {
    validate(sig_);
    if (static_cast<int>(xs.size()) != sig_.dim)
      throw UsageError("component count does not match signature dimension");
    std::copy(xs.begin(), xs.end(), x_.begin());
  }

  AmbientVector(Signature sig, std::span<const double> xs) : sig_(sig) {
    validate(sig_);
    if (static_cast<int>(xs.size()) != sig_.dim)
      throw UsageError("component count does not match signature dimension");
    std::copy(xs.begin(), xs.end(), x_.begin());
  }

  static AmbientVector basis(Signature sig, int i) {
    AmbientVector e(sig);
    e.x_.at(static_cast<std::size_t>(i)) = 1.0;
    return e;
  }

  const Signature& signature() const { return sig_; }
  int dim() const { return sig_.dim; }

  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return x_[static_cast<std::size_t>(i)]; }

  std::span<const double> components() const {
    return {x_.data(), static_cast<std::size_t>(sig_.dim)};
  }

  AmbientVector& operator+=(const AmbientVector& o) {
    check_same(o);
    for (int i = 0; i < sig_.dim; ++i) (*this)[i] += o[i];
    return *this;
  }
  AmbientVector& operator-=(const AmbientVector& o) {
    check_same(o);
    for (int i = 0; i < sig_.dim; ++i) (*this)[i] -= o[i];
    return *this;
  }
  AmbientVector& operator*=(double s) {
    for (int i = 0; i < sig_.dim; ++i) (*this)[i] *= s;
    return *this;
  }

  friend AmbientVector operator+(AmbientVector a, const AmbientVector& b) { return a += b; }
  friend AmbientVector operator-(AmbientVector a, const AmbientVector& b) { return a -= b; }
  friend AmbientVector operator*(AmbientVector a, double s) { return a *= s; }
  friend AmbientVector operator*(double s, AmbientVector a) { return a *= s; }
  friend AmbientVector operator/(AmbientVector a, double s) { return a *= 1.0 / s; }
  friend AmbientVector operator-(AmbientVector a) { return a *= -1.0; }

  // Norm of the raw components, ignoring the metric.
  double euclidean_norm() const {
    double s = 0.0;
    for (int i = 0; i < sig_.dim; ++i) s += (*this)[i] * (*this)[i];
    return std::sqrt(s);
  }

 private:
  void check_same(const AmbientVector& o) const {
    if (!(o.sig_ == sig_)) throw UsageError("mismatched ambient signatures");
  }

  Signature sig_{};
  std::array<double, 4> x_{};
};

inline double inner(const AmbientVector& a, const AmbientVector& b) {
  if (!(a.signature() == b.signature()))
    throw UsageError("inner: mismatched ambient signatures");
  const Signature& s = a.signature();
  double acc = 0.0;
  for (int i = 0; i < s.dim; ++i) acc += s.eps(i) * a[i] * b[i];
  return acc;
}

// sqrt(|<v,v>|)
inline double metric_norm(const AmbientVector& v) {
  return std::sqrt(std::abs(inner(v, v)));
}

struct SpaceForm {
  int c = 0;
  Signature ambient = Signature::euclidean(3);

  static SpaceForm r3() { return {0, Signature::euclidean(3)}; }
  static SpaceForm s3() { return {1, Signature::euclidean(4)}; }
  static SpaceForm h3() { return {-1, Signature::lorentz()}; }

  static SpaceForm from_curvature(int c) {
    switch (c) {
      case 0: return r3();
      case 1: return s3();
      case -1: return h3();
      default: throw UsageError("space-form curvature must be 0, +1 or -1");
    }
  }

  // <r,r> on the model; meaningless for R^3.
  std::optional<double> constraint() const {
    if (c == 0) return std::nullopt;
    return c > 0 ? 1.0 : -1.0;
  }

  // Ric(eta, eta) for a unit tangent vector of N^3(c).
  double normal_ricci() const { return 2.0 * c; }

  std::string name() const { return c == 0 ? "R3" : (c > 0 ? "S3" : "H3"); }
};

inline bool on_model(const AmbientVector& p, const SpaceForm& m, double tol) {
  if (m.c == 0) throw UsageError("on_model: R^3 has no defining constraint");
  if (!(p.signature() == m.ambient))
    throw UsageError("on_model: point is not in the model's ambient space");
  const double target = *m.constraint();
  if (std::abs(inner(p, p) - target) > tol) return false;
  if (m.c < 0 && !(p[3] > 0.0)) return false;
  return true;
}

namespace detail {

// Determinant of an n x n matrix (n <= 4), partial pivoting.
inline double determinant(std::array<std::array<double, 4>, 4> a, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (int k = col; k < n; ++k) a[r][k] -= m * a[col][k];
    }
  }
  return det;
}

}  // namespace detail

// Unit vector orthogonal (in the ambient metric) to every vector of `vs`,
// which must hold dim-1 vectors. Without a sign convention the result is
// the normalized metric dual of the generalized cross product, so it varies
// continuously with the inputs; with one, the result is flipped to have a
// positive inner product with it (when that product is nonzero).
inline AmbientVector orthonormal_complement(
    std::span<const AmbientVector> vs,
    const std::optional<AmbientVector>& sign_convention = std::nullopt) {
  if (vs.empty()) throw UsageError("orthonormal_complement: empty input");
  const Signature sig = vs.front().signature();
  const int n = sig.dim;
  if (static_cast<int>(vs.size()) != n - 1)
    throw UsageError("orthonormal_complement: need exactly dim-1 vectors");
  for (const auto& v : vs)
    if (!(v.signature() == sig))
      throw UsageError("orthonormal_complement: mismatched signatures");

  // |det Gram| relative to the product of squared Euclidean norms.
  std::array<std::array<double, 4>, 4> gram{};
  double scale = 1.0;
  for (int i = 0; i < n - 1; ++i) {
    for (int j = 0; j < n - 1; ++j) gram[i][j] = inner(vs[i], vs[j]);
    const double en = vs[i].euclidean_norm();
    scale *= en * en;
  }
  const double gdet = detail::determinant(gram, n - 1);
  if (!(scale > 0.0) || std::abs(gdet) < 1e-10 * scale)
    throw DegeneracyError("orthonormal_complement: degenerate span");

  AmbientVector w(sig);
  for (int j = 0; j < n; ++j) {
    std::array<std::array<double, 4>, 4> m{};
    for (int i = 0; i < n - 1; ++i)
      for (int k = 0; k < n; ++k) m[i][k] = vs[i][k];
    m[n - 1][j] = 1.0;
    // Cofactor gives the covector; raise the index with the metric.
    w[j] = sig.eps(j) * detail::determinant(m, n);
  }
  const double ww = inner(w, w);
  if (std::abs(ww) < 1e-10 * scale)
    throw DegeneracyError("orthonormal_complement: null complement");
  w *= 1.0 / std::sqrt(std::abs(ww));

  if (sign_convention) {
    if (inner(w, *sign_convention) < 0.0) w *= -1.0;
  }
  return w;
}

inline AmbientVector orthonormal_complement(
    std::initializer_list<AmbientVector> vs,
    const std::optional<AmbientVector>& sign_convention = std::nullopt) {
  std::vector<AmbientVector> tmp(vs);
  return orthonormal_complement(std::span<const AmbientVector>(tmp), sign_convention);
}

}  // namespace bicons

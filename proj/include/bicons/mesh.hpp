#pragma once

// Regular-grid triangulation of a patch, conformal charts for the curved
// models, and ASCII OBJ / PLY export.

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bicons/ambient.hpp"
#include "bicons/errors.hpp"
#include "bicons/surface.hpp"
#include "bicons/verify.hpp"

namespace bicons {

enum class ProjectionKind { automatic, identity, stereographic, poincare };

struct Projection {
  ProjectionKind kind = ProjectionKind::automatic;
  std::optional<AmbientVector> pole;  // stereographic only; default -e4
};

inline ProjectionKind parse_projection(const std::string& s) {
  if (s == "auto") return ProjectionKind::automatic;
  if (s == "identity" || s == "none") return ProjectionKind::identity;
  if (s == "stereographic") return ProjectionKind::stereographic;
  if (s == "poincare") return ProjectionKind::poincare;
  throw UsageError("unknown projection '" + s + "' (auto|identity|stereographic|poincare)");
}

inline std::string to_string(ProjectionKind k) {
  switch (k) {
    case ProjectionKind::automatic: return "auto";
    case ProjectionKind::identity: return "identity";
    case ProjectionKind::stereographic: return "stereographic";
    case ProjectionKind::poincare: return "poincare";
  }
  return "?";
}

using Point3 = std::array<double, 3>;

/// Stereographic chart of S^3 from `pole` onto the equatorial R^3. The
/// pole is moved to -e4 by a Householder reflection, then
/// P(x) = (x1, x2, x3) / (1 + x4).
class Stereographic {
 public:
  explicit Stereographic(AmbientVector pole) {
    if (!(pole.signature() == Signature::euclidean(4)))
      throw UsageError("stereographic pole must be a vector of E^4");
    const double n = pole.euclidean_norm();
    if (!(n > 0.0)) throw UsageError("stereographic pole must be nonzero");
    pole_ = pole / n;
    v_ = pole_;
    v_[3] += 1.0;  // v = p + e4; H v-reflection sends p to -e4
    vv_ = inner(v_, v_);
  }

  const AmbientVector& pole() const { return pole_; }

  Point3 operator()(const AmbientVector& x) const {
    AmbientVector y = x;
    if (vv_ > 1e-30) y = x - (2.0 * inner(v_, x) / vv_) * v_;
    const double den = 1.0 + y[3];
    if (!(den > 1e-9))
      throw DomainError("stereographic projection: point at the pole");
    return {y[0] / den, y[1] / den, y[2] / den};
  }

 private:
  AmbientVector pole_;
  AmbientVector v_;
  double vv_ = 0.0;
};

/// Poincare ball chart of the hyperboloid: (x1, x2, x3) / (1 + x4).
inline Point3 poincare_ball(const AmbientVector& x) {
  if (!(x.signature() == Signature::lorentz()))
    throw UsageError("poincare_ball: point must lie in L^4");
  const double den = 1.0 + x[3];
  if (!(den > 0.0)) throw DomainError("poincare_ball: point not on the upper sheet");
  return {x[0] / den, x[1] / den, x[2] / den};
}

struct Mesh {
  int nu = 0, nv = 0;
  std::vector<Point3> vertices;
  std::vector<std::array<int, 4>> quads;  // counter-clockwise in (u, v)
  std::vector<std::pair<double, double>> params;
  std::vector<std::pair<std::string, std::vector<double>>> channels;

  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> t;
    t.reserve(2 * quads.size());
    for (const auto& q : quads) {
      t.push_back({q[0], q[1], q[2]});
      t.push_back({q[0], q[2], q[3]});
    }
    return t;
  }

  void add_channel(std::string name, std::vector<double> values) {
    if (values.size() != vertices.size())
      throw UsageError("mesh channel '" + name + "' does not match the vertex count");
    channels.emplace_back(std::move(name), std::move(values));
  }
};

inline ProjectionKind resolve_projection(const SpaceForm& m, ProjectionKind k) {
  if (k == ProjectionKind::automatic)
    return m.c == 0 ? ProjectionKind::identity
                    : (m.c > 0 ? ProjectionKind::stereographic : ProjectionKind::poincare);
  if (m.c == 0 && k != ProjectionKind::identity)
    throw UsageError("R3 patches take the identity projection");
  if (m.c > 0 && k != ProjectionKind::stereographic)
    throw UsageError("S3 patches need the stereographic projection");
  if (m.c < 0 && k != ProjectionKind::poincare)
    throw UsageError("H3 patches need the poincare projection");
  return k;
}

namespace detail {

// Coordinate pole +/-e_i farthest from every sample.
inline AmbientVector suggest_pole(const std::vector<AmbientVector>& pts) {
  AmbientVector best;
  double best_gap = -1.0;
  for (int i = 3; i >= 0; --i) {
    for (double s : {-1.0, 1.0}) {
      AmbientVector p = s * AmbientVector::basis(Signature::euclidean(4), i);
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& x : pts) gap = std::min(gap, 1.0 - inner(x, p));
      if (gap > best_gap) {
        best_gap = gap;
        best = p;
      }
    }
  }
  return best;
}

inline std::string describe(const AmbientVector& v) {
  std::string s = "(";
  for (int i = 0; i < v.dim(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%g", i ? ", " : "", v[i]);
    s += buf;
  }
  return s + ")";
}

}  // namespace detail

inline Mesh sample_mesh(const SurfacePatch& patch, const GridSpec& grid, const Projection& proj = {}) {
  if (grid.nu < 2 || grid.nv < 2) throw UsageError("sample_mesh: nu and nv must be at least 2");
  const ProjectionKind kind = resolve_projection(patch.model, proj.kind);

  Mesh mesh;
  mesh.nu = grid.nu;
  mesh.nv = grid.nv;
  std::vector<AmbientVector> pts;
  pts.reserve(static_cast<std::size_t>(grid.nu * grid.nv));
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j) {
      pts.push_back(patch.X(grid.u(i), grid.v(j)));
      mesh.params.emplace_back(grid.u(i), grid.v(j));
    }

  mesh.vertices.reserve(pts.size());
  if (kind == ProjectionKind::identity) {
    for (const auto& x : pts) mesh.vertices.push_back({x[0], x[1], x[2]});
  } else if (kind == ProjectionKind::poincare) {
    for (const auto& x : pts) mesh.vertices.push_back(poincare_ball(x));
  } else {
    const Stereographic st(proj.pole.value_or(-1.0 * AmbientVector::basis(Signature::euclidean(4), 3)));
    for (const auto& x : pts) {
      if (inner(x, st.pole()) > 1.0 - 1e-9)
        throw DomainError("stereographic projection: the pole " + detail::describe(st.pole()) +
                          " lies on the surface; try pole " + detail::describe(detail::suggest_pole(pts)));
      mesh.vertices.push_back(st(x));
    }
  }

  for (int i = 0; i + 1 < grid.nu; ++i)
    for (int j = 0; j + 1 < grid.nv; ++j) {
      const int a = i * grid.nv + j;
      mesh.quads.push_back({a, a + grid.nv, a + grid.nv + 1, a + 1});
    }
  return mesh;
}

inline Mesh sample_mesh(const SurfacePatch& patch, int nu, int nv, const Projection& proj = {}) {
  return sample_mesh(patch, GridSpec{nu, nv, patch.rect}, proj);
}

/// Mesh over the report's grid with f, K and residual channels attached.
inline Mesh sample_mesh(const SurfacePatch& patch, const VerificationReport& rep, const Projection& proj = {}) {
  Mesh mesh = sample_mesh(patch, rep.grid, proj);
  mesh.add_channel("f", rep.f_values);
  mesh.add_channel("K", rep.K_values);
  mesh.add_channel("biconservative", rep.biconservative_values);
  mesh.add_channel("normal_bitension", rep.bitension_values);
  return mesh;
}

// ---------------------------------------------------------------------------
// Writers. Numbers use %.17g so output is exact and reproducible.

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_obj(std::ostream& os, const Mesh& m) {
  os << "# bicons mesh " << m.nu << "x" << m.nv << "\n";
  for (const auto& v : m.vertices)
    os << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
  for (const auto& q : m.quads)
    os << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

/// Sidecar holding the per-vertex channels, one row per OBJ vertex.
inline void write_channels_csv(std::ostream& os, const Mesh& m) {
  os << "vertex,u,v";
  for (const auto& [name, _] : m.channels) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    os << i + 1 << ',' << format_double(m.params[i].first) << ',' << format_double(m.params[i].second);
    for (const auto& [_, values] : m.channels) os << ',' << format_double(values[i]);
    os << '\n';
  }
}

inline void write_ply(std::ostream& os, const Mesh& m) {
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << m.vertices.size() << '\n';
  os << "property double x\nproperty double y\nproperty double z\n";
  for (const auto& [name, _] : m.channels) os << "property double " << name << '\n';
  os << "element face " << m.quads.size() << '\n';
  os << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const auto& v = m.vertices[i];
    os << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]);
    for (const auto& [_, values] : m.channels) os << ' ' << format_double(values[i]);
    os << '\n';
  }
  for (const auto& q : m.quads) os << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
}

}  // namespace bicons

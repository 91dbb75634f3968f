#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bicons/mesh.hpp"

using namespace bicons;

namespace {

SurfacePatch r3_patch() {
  return build_r3_revolution(revolution_profile(1.0, 8.0), {1.5, 8.0, 0, 2 * std::numbers::pi});
}

// Clifford-type torus {x1^2 + x2^2 = a^2, x3^2 + x4^2 = 1 - a^2} in S^3.
SurfacePatch torus(double a) {
  const double b = std::sqrt(1 - a * a);
  const Signature E4 = Signature::euclidean(4);
  SurfacePatch p;
  p.tag = SurfaceCase::S3;
  p.model = SpaceForm::s3();
  p.rect = {0, 2 * std::numbers::pi, 0, 2 * std::numbers::pi};
  p.X = [=](double u, double v) {
    return AmbientVector(E4, {a * std::cos(u), a * std::sin(u), b * std::cos(v), b * std::sin(v)});
  };
  p.Xu = [=](double u, double) { return AmbientVector(E4, {-a * std::sin(u), a * std::cos(u), 0, 0}); };
  p.Xv = [=](double, double v) { return AmbientVector(E4, {0, 0, -b * std::sin(v), b * std::cos(v)}); };
  return p;
}

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream is(text);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);)
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST(Mesh, SmallestGrid) {
  const auto m = sample_mesh(r3_patch(), 2, 2);
  EXPECT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.quads.size(), 1u);
  EXPECT_EQ(m.triangles().size(), 2u);
  EXPECT_EQ(m.quads[0], (std::array<int, 4>{0, 2, 3, 1}));
  EXPECT_THROW(sample_mesh(r3_patch(), 1, 5), UsageError);
}

TEST(Mesh, CountsForGeneralGrid) {
  const auto m = sample_mesh(r3_patch(), 5, 7);
  EXPECT_EQ(m.vertices.size(), 35u);
  EXPECT_EQ(m.quads.size(), 24u);
  EXPECT_EQ(m.triangles().size(), 48u);
  for (const auto& q : m.quads)
    for (int i : q) EXPECT_LT(i, 35);
}

TEST(Mesh, IdentityProjectionForR3) {
  const auto patch = r3_patch();
  const auto m = sample_mesh(patch, 4, 4);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const auto [u, v] = m.params[i];
    const auto x = patch.X(u, v);
    for (int d = 0; d < 3; ++d) EXPECT_EQ(m.vertices[i][static_cast<std::size_t>(d)], x[d]);
  }
  EXPECT_THROW(sample_mesh(patch, 4, 4, {ProjectionKind::stereographic, std::nullopt}), UsageError);
}

TEST(Stereographic, AntipodeOfPoleGoesToOrigin) {
  const Signature E4 = Signature::euclidean(4);
  const Stereographic st(-1.0 * AmbientVector::basis(E4, 3));
  const auto o = st(AmbientVector::basis(E4, 3));
  for (double c : o) EXPECT_NEAR(c, 0.0, 1e-15);
  const auto e1 = st(AmbientVector::basis(E4, 0));
  EXPECT_NEAR(e1[0], 1.0, 1e-15);

  const AmbientVector pole(E4, {1, 1, 0, 0});
  const Stereographic s2(pole);
  const auto o2 = s2(-1.0 / std::sqrt(2.0) * pole);
  for (double c : o2) EXPECT_NEAR(c, 0.0, 1e-15);
}

TEST(Stereographic, EquatorMapsToUnitSphere) {
  const Signature E4 = Signature::euclidean(4);
  const Stereographic st(AmbientVector(E4, {0, 0.6, 0, 0.8}));
  const AmbientVector x(E4, {1, 0, 0, 0});
  const auto y = st(x);
  EXPECT_NEAR(std::hypot(y[0], y[1], y[2]), 1.0, 1e-14);
}

TEST(Stereographic, PoleOnSurfaceSuggestsAnother) {
  // The torus with a = 0.6 passes through (0.6, 0, 0.8, 0); use that point as pole.
  const Signature E4 = Signature::euclidean(4);
  const auto patch = torus(0.6);
  try {
    sample_mesh(patch, GridSpec{5, 5, patch.rect}, {ProjectionKind::stereographic, AmbientVector(E4, {0.6, 0, 0.8, 0})});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("try pole"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(sample_mesh(patch, 5, 5));
}

TEST(Poincare, UpperSheetToUnitBall) {
  const Signature L4 = Signature::lorentz();
  const auto o = poincare_ball(AmbientVector::basis(L4, 3));
  for (double c : o) EXPECT_EQ(c, 0.0);
  const double t = 1.3;
  const auto p = poincare_ball(AmbientVector(L4, {std::sinh(t), 0, 0, std::cosh(t)}));
  EXPECT_NEAR(p[0], std::tanh(t / 2), 1e-15);
  EXPECT_THROW(poincare_ball(AmbientVector(L4, {0, 0, 0, -1})), DomainError);
}

TEST(Projection, ParseAndResolve) {
  EXPECT_EQ(parse_projection("auto"), ProjectionKind::automatic);
  EXPECT_EQ(parse_projection("none"), ProjectionKind::identity);
  EXPECT_THROW(parse_projection("mercator"), UsageError);
  EXPECT_EQ(resolve_projection(SpaceForm::h3(), ProjectionKind::automatic), ProjectionKind::poincare);
  EXPECT_EQ(resolve_projection(SpaceForm::s3(), ProjectionKind::automatic), ProjectionKind::stereographic);
  EXPECT_THROW(resolve_projection(SpaceForm::h3(), ProjectionKind::stereographic), UsageError);
}

TEST(Mesh, ChannelLengthChecked) {
  auto m = sample_mesh(r3_patch(), 3, 3);
  EXPECT_THROW(m.add_channel("f", std::vector<double>(8, 0.0)), UsageError);
  m.add_channel("f", std::vector<double>(9, 0.5));
  EXPECT_EQ(m.channels.size(), 1u);
}

TEST(Writers, ObjLayout) {
  auto m = sample_mesh(r3_patch(), 3, 4);
  std::ostringstream os;
  write_obj(os, m);
  const std::string s = os.str();
  EXPECT_EQ(count_lines_starting(s, "v "), 12u);
  EXPECT_EQ(count_lines_starting(s, "f "), 6u);
  EXPECT_NE(s.find("f 1 5 6 2"), std::string::npos);
}

TEST(Writers, PlyHeaderAndBody) {
  auto m = sample_mesh(r3_patch(), 3, 3);
  std::ostringstream os;
  write_ply(os, m);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("ply\nformat ascii 1.0\n", 0), 0u);
  EXPECT_NE(s.find("element vertex 9"), std::string::npos);
  EXPECT_NE(s.find("element face 4"), std::string::npos);
  EXPECT_EQ(count_lines_starting(s, "4 "), 4u);
}

TEST(Writers, ChannelsCsv) {
  auto m = sample_mesh(r3_patch(), 2, 3);
  m.add_channel("f", {1, 2, 3, 4, 5, 6});
  std::ostringstream os;
  write_channels_csv(os, m);
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  EXPECT_EQ(header, "vertex,u,v,f");
  EXPECT_EQ(first.substr(0, 2), "1,");
  EXPECT_EQ(first.substr(first.size() - 2), ",1");
}

TEST(Writers, RoundTripDoubles) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 8.211270})
    EXPECT_EQ(std::stod(format_double(x)), x);
}

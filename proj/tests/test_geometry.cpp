#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/geometry.hpp"
#include "tlsnoise/hypothesis.hpp"
#include "tlsnoise/rng.hpp"

using namespace tlsnoise;

namespace {

Tls random_tls(Rng& rng, double min_z = 20.0) {
  Tls t;
  t.position = {rng.uniform(-150.0, 150.0), rng.uniform(-150.0, 150.0),
                rng.uniform(min_z, 120.0)};
  t.orientation = sample_orientation(OrientationClass::FullyRandom, rng);
  t.moment_e_nm = rng.log_uniform(0.01, 10.0);
  t.switch_rate_hz = rng.log_uniform(1e-5, 1.0);
  return t;
}

}  // namespace

TEST_CASE("on-axis z dipole gives -p/(4 pi eps h^2), negative for p > 0") {
  Tls t{{0.0, 0.0, 50.0}, {0.0, 0.0, 1.0}, 2.0, 1.0};
  const double v = voltage_kernel(t, {0.0, 0.0, 0.0}, 11.0);
  CHECK(v < 0.0);
  CHECK(v == doctest::Approx(-kCoulombVnm2 / 11.0 * 2.0 / (50.0 * 50.0)).epsilon(1e-14));
}

TEST_CASE("perpendicular dipole gives zero potential") {
  Tls t{{0.0, 0.0, 50.0}, {1.0, 0.0, 0.0}, 1.0, 1.0};
  CHECK(voltage_kernel(t, {0.0, 0.0, 0.0}, 11.0) == 0.0);
}

TEST_CASE("frozen SI spot value: p = 1 e nm, h = 50 nm, eps_r = 11") {
  // Independent high-precision evaluation of -e*1e9/(4 pi eps0 eps_r) * h/h^3.
  Tls t{{0.0, 0.0, 50.0}, {0.0, 0.0, 1.0}, 1.0, 1.0};
  CHECK(voltage_kernel(t, {0.0, 0.0, 0.0}, 11.0) ==
        doctest::Approx(-5.2362347194275171e-05).epsilon(1e-14));
}

TEST_CASE("coincident dipole and site is an error, not a singular value") {
  Tls t{{1.0, 2.0, 0.0}, {0.0, 0.0, 1.0}, 1.0, 1.0};
  CHECK_THROWS_AS(voltage_kernel(t, {1.0, 2.0, 0.0}, 11.0), ZeroDistance);
  CHECK_THROWS_AS(field_kernel(t, {1.0, 2.0, 0.0}, 11.0), ZeroDistance);
  Tls almost = t;
  almost.position.z = 1e-10;
  CHECK_THROWS_AS(voltage_kernel(almost, {1.0, 2.0, 0.0}, 11.0), ZeroDistance);
}

TEST_CASE("moment scaling is linear") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    Tls t = random_tls(rng);
    const Vec3 site{rng.uniform(-80.0, 80.0), rng.uniform(-80.0, 80.0), 0.0};
    const double v1 = voltage_kernel(t, site, 11.0);
    Tls scaled = t;
    scaled.moment_e_nm *= 7.5;
    CHECK(voltage_kernel(scaled, site, 11.0) == doctest::Approx(7.5 * v1).epsilon(1e-12));
  }
}

TEST_CASE("geometry matrix element matches a term-by-term reimplementation") {
  Rng rng(22);
  for (int i = 0; i < 500; ++i) {
    const Tls m = random_tls(rng);
    const Tls n = random_tls(rng);
    const Vec3 s1{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), 0.0};
    const Vec3 s2{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), 0.0};

    // brute-force evaluation in plain scalars
    const double dx1 = m.position.x - s1.x, dy1 = m.position.y - s1.y,
                 dz1 = m.position.z - s1.z;
    const double dx2 = n.position.x - s2.x, dy2 = n.position.y - s2.y,
                 dz2 = n.position.z - s2.z;
    const double num1 = m.orientation.x * dx1 + m.orientation.y * dy1 + m.orientation.z * dz1;
    const double num2 = n.orientation.x * dx2 + n.orientation.y * dy2 + n.orientation.z * dz2;
    const double r1 = std::sqrt(dx1 * dx1 + dy1 * dy1 + dz1 * dz1);
    const double r2 = std::sqrt(dx2 * dx2 + dy2 * dy2 + dz2 * dz2);
    const double expected = num1 * num2 / (r1 * r1 * r1 * r2 * r2 * r2);

    CHECK(geometry_matrix_element(m, n, s1, s2) ==
          doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("diagonal element with coincident sites is a square, hence >= 0") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const Tls t = random_tls(rng);
    const Vec3 s{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), 0.0};
    CHECK(geometry_matrix_element(t, t, s, s) >= 0.0);
  }
}

TEST_CASE("A symmetry under swapping (m, site1) with (n, site2)") {
  Rng rng(24);
  for (int i = 0; i < 200; ++i) {
    const Tls m = random_tls(rng);
    const Tls n = random_tls(rng);
    const Vec3 s1{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), 0.0};
    const Vec3 s2{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), 0.0};
    CHECK(geometry_matrix_element(m, n, s1, s2) ==
          doctest::Approx(geometry_matrix_element(n, m, s2, s1)).epsilon(1e-13));
  }
}

TEST_CASE("sign law: sign(A) = sign((p.u1)(p.u2))") {
  Rng rng(25);
  for (int i = 0; i < 1000; ++i) {
    const Tls t = random_tls(rng);
    const Vec3 s1{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), 0.0};
    const Vec3 s2{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), 0.0};
    const double a = geometry_matrix_element(t, t, s1, s2);
    const Vec3 u1 = (t.position - s1).normalized();
    const Vec3 u2 = (t.position - s2).normalized();
    const double product = t.orientation.dot(u1) * t.orientation.dot(u2);
    if (a != 0.0) CHECK((a > 0.0) == (product > 0.0));
  }
}

TEST_CASE("x-oriented dipole between sites at +-d/2 anticorrelates iff inside the slab") {
  const double d = 100.0;
  const Vec3 s1{-d / 2, 0.0, 0.0}, s2{d / 2, 0.0, 0.0};
  Rng rng(26);
  for (int i = 0; i < 500; ++i) {
    Tls t;
    t.position = {rng.uniform(-150.0, 150.0), rng.uniform(-150.0, 150.0),
                  rng.uniform(20.0, 120.0)};
    t.orientation = {1.0, 0.0, 0.0};
    t.moment_e_nm = 1.0;
    t.switch_rate_hz = 1.0;
    const double a = geometry_matrix_element(t, t, s1, s2);
    const bool inside = std::abs(t.position.x) < d / 2;
    if (a != 0.0) CHECK((a < 0.0) == inside);
  }
}

TEST_CASE("field kernel is the site-gradient of the voltage kernel") {
  Rng rng(27);
  const double step = 1e-3;
  for (int i = 0; i < 300; ++i) {
    const Tls t = random_tls(rng);
    const Vec3 site{rng.uniform(-80.0, 80.0), rng.uniform(-80.0, 80.0), 0.0};
    const Vec3 field = field_kernel(t, site, 11.0);

    auto central = [&](Vec3 dir) {
      const Vec3 plus = site + dir * step;
      const Vec3 minus = site - dir * step;
      return (voltage_kernel(t, plus, 11.0) - voltage_kernel(t, minus, 11.0)) /
             (2.0 * step);
    };
    const double fx = central({1, 0, 0});
    const double fy = central({0, 1, 0});
    const double fz = central({0, 0, 1});
    const double scale = std::max({std::abs(fx), std::abs(fy), std::abs(fz)});
    CHECK(std::abs(field.x - fx) <= 1e-5 * scale);
    CHECK(std::abs(field.y - fy) <= 1e-5 * scale);
    CHECK(std::abs(field.z - fz) <= 1e-5 * scale);
  }
}

TEST_CASE("on-axis z dipole has a pure z field; x dipole overhead has no y field") {
  Tls tz{{0.0, 0.0, 60.0}, {0.0, 0.0, 1.0}, 1.0, 1.0};
  const Vec3 fz = field_kernel(tz, {0.0, 0.0, 0.0}, 11.0);
  CHECK(fz.x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(fz.y == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(fz.z != 0.0);

  Tls tx{{0.0, 0.0, 60.0}, {1.0, 0.0, 0.0}, 1.0, 1.0};
  const Vec3 fx = field_kernel(tx, {0.0, 0.0, 0.0}, 11.0);
  CHECK(fx.x != 0.0);
  CHECK(fx.y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("validation rejects broken values") {
  Tls t{{0, 0, 50}, {0, 0, 1}, 1.0, 1.0};
  CHECK_NOTHROW(t.validate());
  Tls bad = t;
  bad.orientation = {0.0, 0.0, 1.1};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = t;
  bad.moment_e_nm = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = t;
  bad.switch_rate_hz = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  TlsConfiguration empty;
  CHECK_THROWS_AS(empty.validate(), ValidationError);

  QubitLayout off_plane{{{0.0, 0.0, 1.0}}};
  CHECK_THROWS_AS(off_plane.validate(), ValidationError);
  QubitLayout duplicated{{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};
  CHECK_THROWS_AS(duplicated.validate(), ValidationError);
  QubitLayout good{{{-50.0, 0.0, 0.0}, {50.0, 0.0, 0.0}}};
  CHECK_NOTHROW(good.validate());
}

namespace {

ModelHypothesis layer_hypothesis(int n, OrientationClass cls) {
  ModelHypothesis hyp;
  hyp.n_tls = n;
  hyp.dipole_length_nm = 1.0;
  hyp.orientation = cls;
  hyp.layer = {{-150.0, 150.0}, {-150.0, 150.0}, {72.0, 72.0}};
  hyp.rate_interval_hz = {1e-5, 1.0};
  return hyp;
}

}  // namespace

TEST_CASE("deterministic orientation classes sample exactly their axis") {
  const TlsConfiguration config =
      sample_configuration(layer_hypothesis(10, OrientationClass::HorizontalY), 5);
  for (const Tls& t : config.tls) {
    CHECK(t.orientation.x == 0.0);
    CHECK(t.orientation.y == 1.0);
    CHECK(t.orientation.z == 0.0);
  }
}

TEST_CASE("sampled configurations land in the box with log-uniform rates") {
  const TlsConfiguration config =
      sample_configuration(layer_hypothesis(200, OrientationClass::HorizontalRandom), 6);
  CHECK(config.tls.size() == 200);
  for (const Tls& t : config.tls) {
    CHECK(std::abs(t.position.x) <= 150.0);
    CHECK(std::abs(t.position.y) <= 150.0);
    CHECK(t.position.z == 72.0);
    CHECK(t.orientation.z == 0.0);
    CHECK(t.orientation.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.switch_rate_hz >= 1e-5);
    CHECK(t.switch_rate_hz <= 1.0);
  }
}

TEST_CASE("fully random orientations have zero-mean z component") {
  const int n = 10000;
  const TlsConfiguration config =
      sample_configuration(layer_hypothesis(n, OrientationClass::FullyRandom), 7);
  double mean_z = 0.0;
  for (const Tls& t : config.tls) mean_z += t.orientation.z;
  mean_z /= n;
  // cos(theta) is uniform on [-1,1]: variance 1/3.
  const double sigma = std::sqrt(1.0 / 3.0 / n);
  CHECK(std::abs(mean_z) < 3.0 * sigma);
}

TEST_CASE("same seed reproduces the identical configuration") {
  const auto a = sample_configuration(layer_hypothesis(50, OrientationClass::FullyRandom), 99);
  const auto b = sample_configuration(layer_hypothesis(50, OrientationClass::FullyRandom), 99);
  REQUIRE(a.tls.size() == b.tls.size());
  for (size_t i = 0; i < a.tls.size(); ++i) {
    CHECK(a.tls[i].position.x == b.tls[i].position.x);
    CHECK(a.tls[i].position.y == b.tls[i].position.y);
    CHECK(a.tls[i].position.z == b.tls[i].position.z);
    CHECK(a.tls[i].orientation.x == b.tls[i].orientation.x);
    CHECK(a.tls[i].switch_rate_hz == b.tls[i].switch_rate_hz);
  }
  // A TLS's draw is independent of how many TLS follow it.
  const auto c = sample_configuration(layer_hypothesis(10, OrientationClass::FullyRandom), 99);
  for (size_t i = 0; i < c.tls.size(); ++i) {
    CHECK(a.tls[i].position.x == c.tls[i].position.x);
    CHECK(a.tls[i].switch_rate_hz == c.tls[i].switch_rate_hz);
  }
}

TEST_CASE("degenerate boxes are allowed for sampling but not for densities") {
  ModelHypothesis point = layer_hypothesis(3, OrientationClass::VerticalZ);
  point.layer = {{10.0, 10.0}, {-5.0, -5.0}, {60.0, 60.0}};
  const auto config = sample_configuration(point, 1);
  for (const Tls& t : config.tls) {
    CHECK(t.position.x == 10.0);
    CHECK(t.position.y == -5.0);
    CHECK(t.position.z == 60.0);
  }
  CHECK_THROWS_AS(point.areal_density_cm2(), DegenerateLayer);
  CHECK_THROWS_AS(point.validate(true), DegenerateLayer);
  CHECK_NOTHROW(point.validate());

  ModelHypothesis extended = layer_hypothesis(40, OrientationClass::VerticalZ);
  // 300 nm x 300 nm box
  CHECK(extended.areal_density_cm2() ==
        doctest::Approx(40.0 / (300.0 * 300.0 * 1e-14)).epsilon(1e-12));
}

TEST_CASE("count and length sweep grids") {
  const std::vector<int> counts = geometric_count_grid();
  CHECK(counts.front() == 1);
  CHECK(counts.back() == 177);
  for (size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] > counts[i - 1]);
  CHECK(counts.size() <= 13);

  const std::vector<double> lengths = log_length_grid(0.05, 5.0, 13);
  CHECK(lengths.size() == 13);
  CHECK(lengths.front() == doctest::Approx(0.05));
  CHECK(lengths.back() == doctest::Approx(5.0));
  CHECK(lengths[6] == doctest::Approx(0.5));
}

#include "lsssc/errors.hpp"
#include "lsssc/generator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace lsssc;

namespace {

GeneratorConfig base_config() {
  GeneratorConfig g;
  g.ambient_dim = 10;
  g.dims = {2, 3};
  g.kappas = {4.0, 3.0};
  g.seed = 42;
  return g;
}

// Mean and standard error of a sample.
struct Moments {
  double mean;
  double se;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

TEST_CASE("config validation") {
  GeneratorConfig g = base_config();
  CHECK_NOTHROW(g.validate());
  g.dims = {11, 2};
  CHECK_THROWS_AS(g.validate(), InvalidParameter);
  g = base_config();
  g.kappas = {0.5, 3.0};  // round(1) < d + 1
  CHECK_THROWS_AS(g.validate(), InvalidParameter);
  g = base_config();
  g.noise.kind = NoiseKind::Missing;
  g.noise.missing = {10};
  CHECK_THROWS_AS(g.validate(), InvalidParameter);
  g = base_config();
  g.noise.kind = NoiseKind::Ball;
  g.noise.delta = -0.1;
  CHECK_THROWS_AS(g.validate(), InvalidParameter);
  CHECK(base_config().points_in(0) == 8);
  CHECK(base_config().total_points() == 17);
}

TEST_CASE("sample_subspaces: full dimension and orthonormality") {
  GeneratorConfig g;
  g.ambient_dim = 5;
  g.dims = {5};
  g.kappas = {2.0};
  g.seed = 3;
  const auto bases = sample_subspaces(g);
  REQUIRE(bases.size() == 1);
  CHECK((bases[0].transpose() * bases[0] - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sample_subspaces is deterministic per seed") {
  GeneratorConfig g;
  g.ambient_dim = 4;
  g.dims = {2, 2};
  g.kappas = {2.0, 2.0};
  g.seed = 11;
  const auto a = sample_subspaces(g);
  const auto b = sample_subspaces(g);
  REQUIRE(a.size() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(a[k].rows() == 4);
    CHECK(a[k].cols() == 2);
    CHECK((a[k].transpose() * a[k] - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a[k] == b[k]);
  }
  g.seed = 12;
  CHECK(sample_subspaces(g)[0] != a[0]);
}

TEST_CASE("sample_subspaces is isotropic") {
  // E|<u,v>|^2 = 1/n for unit u, v in independent uniform subspaces.
  std::vector<double> vals;
  GeneratorConfig g;
  g.ambient_dim = 50;
  g.dims = {4, 4, 4};
  g.kappas = {2.0, 2.0, 2.0};
  for (int t = 0; t < 10000; ++t) {
    g.seed = 1000 + static_cast<std::uint64_t>(t);
    const auto b = sample_subspaces(g);
    const double ip = b[0].col(0).dot(b[1].col(0));
    vals.push_back(ip * ip);
  }
  const Moments m = moments(vals);
  CHECK(std::abs(m.mean - 1.0 / 50.0) <= 3.0 * m.se);
}

TEST_CASE("sample_points: unit norm and membership") {
  GeneratorConfig g = base_config();
  const auto bases = sample_subspaces(g);
  const PointSample s = sample_points(bases, g.kappas, g.seed);
  CHECK(s.Y.cols() == 17);
  CHECK(s.Y.role() == Role::Clean);
  for (Index i = 0; i < s.Y.cols(); ++i) {
    const Vector y = s.Y.col(i);
    const Matrix& U = bases[s.labels[i] - 1];
    CHECK(std::abs(y.norm() - 1.0) <= 1e-12);
    CHECK((y - U * (U.transpose() * y)).norm() <= 1e-12);
  }
}

TEST_CASE("sample_points in a 1-d subspace gives +-u") {
  Matrix U = Matrix::Zero(3, 1);
  U(1, 0) = 1.0;
  const PointSample s = sample_points({U}, {6.0}, 5);
  for (Index i = 0; i < s.Y.cols(); ++i) {
    const Vector y = s.Y.col(i);
    CHECK(std::abs(std::abs(y(1)) - 1.0) <= 1e-15);
    CHECK(y(0) == 0.0);
    CHECK(y(2) == 0.0);
  }
}

TEST_CASE("sample_points moments on a 3-d sphere") {
  const Matrix U = Matrix::Identity(3, 3);
  const PointSample s = sample_points({U}, {100000.0 / 3.0}, 77);
  const Index N = s.Y.cols();
  REQUIRE(N == 100000);
  for (int a = 0; a < 3; ++a) {
    std::vector<double> coord(N);
    for (Index i = 0; i < N; ++i) coord[i] = s.Y.values()(a, i);
    const Moments m = moments(coord);
    CHECK(std::abs(m.mean) <= 3.0 * m.se);
    for (int b = a; b < 3; ++b) {
      std::vector<double> prod(N);
      for (Index i = 0; i < N; ++i) prod[i] = s.Y.values()(a, i) * s.Y.values()(b, i);
      const Moments p = moments(prod);
      const double expected = a == b ? 1.0 / 3.0 : 0.0;
      CHECK(std::abs(p.mean - expected) <= 3.0 * p.se);
    }
  }
}

TEST_CASE("bounded noise") {
  GeneratorConfig g = base_config();
  const auto bases = sample_subspaces(g);
  const PointSample s = sample_points(bases, g.kappas, g.seed);

  SUBCASE("delta = 0 leaves Y unchanged") {
    const CorruptedData c = add_bounded_noise(s.Y, 0.0, 9);
    CHECK(c.X.values() == s.Y.values());
    CHECK(c.Z.values().isZero(0.0));
  }
  SUBCASE("every column within delta and X = Y + Z") {
    const CorruptedData c = add_bounded_noise(s.Y, 0.1, 9);
    for (Index i = 0; i < c.Z.cols(); ++i) CHECK(c.Z.col(i).norm() <= 0.1);
    CHECK((c.X.values() - s.Y.values() - c.Z.values()).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("negative delta is rejected") {
    CHECK_THROWS_AS(add_bounded_noise(s.Y, -1.0, 9), InvalidParameter);
  }
}

TEST_CASE("bounded noise radius law") {
  // Uniform in the n-ball: E||z||/delta = n/(n+1).
  const int n = 20;
  const DataMatrix Y(Matrix::Zero(n, 10000), Role::Clean);
  const CorruptedData c = add_bounded_noise(Y, 0.1, 2024);
  std::vector<double> radii;
  for (Index i = 0; i < c.Z.cols(); ++i) radii.push_back(c.Z.col(i).norm() / 0.1);
  const Moments m = moments(radii);
  CHECK(std::abs(m.mean - 20.0 / 21.0) <= 3.0 * m.se);
}

TEST_CASE("adversarial noise has norm delta and points at another subspace") {
  GeneratorConfig g = base_config();
  const auto bases = sample_subspaces(g);
  const PointSample s = sample_points(bases, g.kappas, g.seed);
  const CorruptedData c = add_adversarial_noise(s.Y, bases, s.labels, 0.2, 4);
  for (Index i = 0; i < c.Z.cols(); ++i) {
    const Vector z = c.Z.col(i);
    CHECK(std::abs(z.norm() - 0.2) <= 1e-12);
    const Matrix& other = bases[s.labels[i] == 1 ? 1 : 0];
    CHECK((z - other * (other.transpose() * z)).norm() <= 1e-12);
  }
}

TEST_CASE("missing entries") {
  GeneratorConfig g;
  g.ambient_dim = 12;
  g.dims = {2, 3};
  g.kappas = {5.0, 4.0};
  g.seed = 8;
  const auto bases = sample_subspaces(g);
  const PointSample s = sample_points(bases, g.kappas, g.seed);

  SUBCASE("m = 0 changes nothing") {
    const CorruptedData c = apply_missing(s.Y, s.labels, {0, 0}, 1);
    CHECK(c.X.values() == s.Y.values());
    REQUIRE(c.mask);
    CHECK(c.mask->observed().all());
  }
  SUBCASE("exact counts per subspace and zero-fill consistency") {
    const CorruptedData c = apply_missing(s.Y, s.labels, {3, 11}, 1);
    REQUIRE(c.mask);
    for (Index i = 0; i < s.Y.cols(); ++i) {
      CHECK(c.mask->missing_in_column(i) == (s.labels[i] == 1 ? 3 : 11));
    }
    const Matrix expected = s.Y.values().cwiseProduct(c.mask->as_matrix());
    CHECK(c.X.values() == expected);
    for (Index i = 0; i < s.Y.cols(); ++i)
      for (Index r = 0; r < s.Y.rows(); ++r) {
        const double z = c.Z.values()(r, i);
        CHECK(z == (c.mask->is_observed(r, i) ? 0.0 : -s.Y.values()(r, i)));
      }
  }
  SUBCASE("m >= n is rejected") {
    CHECK_THROWS_AS(apply_missing(s.Y, s.labels, {12, 0}, 1), InvalidParameter);
  }
  SUBCASE("masks are nested in m") {
    const CorruptedData small = apply_missing(s.Y, s.labels, {2, 2}, 5);
    const CorruptedData large = apply_missing(s.Y, s.labels, {6, 6}, 5);
    CHECK((large.mask->observed() <= small.mask->observed()).all());
  }
  SUBCASE("mask ignores Y values") {
    const DataMatrix shuffled(s.Y.values().rowwise().reverse(), Role::Clean);
    const CorruptedData a = apply_missing(s.Y, s.labels, {4, 4}, 5);
    const CorruptedData b = apply_missing(shuffled, s.labels, {4, 4}, 5);
    CHECK((a.mask->observed() == b.mask->observed()).all());
  }
}

TEST_CASE("missing entries remove m/n of the energy") {
  const int n = 100;
  const Matrix U = sample_subspaces([] {
    GeneratorConfig g;
    g.ambient_dim = 100;
    g.dims = {4};
    g.kappas = {250.0};
    g.seed = 5;
    return g;
  }())[0];
  const PointSample s = sample_points({U}, {250.0}, 6);
  REQUIRE(s.Y.cols() == 1000);
  const CorruptedData c = apply_missing(s.Y, s.labels, {25}, 7);
  std::vector<double> energy;
  for (Index i = 0; i < c.Z.cols(); ++i) energy.push_back(c.Z.col(i).squaredNorm());
  const Moments m = moments(energy);
  CHECK(std::abs(m.mean - 25.0 / n) <= 3.0 * m.se);
}

TEST_CASE("generate_dataset is bit-deterministic") {
  GeneratorConfig g = base_config();
  g.noise.kind = NoiseKind::Ball;
  g.noise.delta = 0.05;
  const Dataset a = generate_dataset(g);
  const Dataset b = generate_dataset(g);
  CHECK(a.X.values() == b.X.values());
  CHECK(a.Y.values() == b.Y.values());
  CHECK(a.truth.labels() == b.truth.labels());
  CHECK(a.X.role() == Role::Observed);
  CHECK((a.X.values() - a.Y.values() - a.Z.values()).cwiseAbs().maxCoeff() <= 1e-15);
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/hermite_basis.hpp"
#include "hermite_riesz/output.hpp"

using namespace hermite_riesz;
using doctest::Approx;

TEST_CASE("h_k at sample points against high-precision values")
{
  struct Row
  {
    int k;
    double x, value;
  };
  // 40-digit evaluation of (2^k k! sqrt(pi))^{-1/2} H_k(x) e^{-x^2/2}
  const Row rows[] = {
      {5, 1.3, -0.39939146281375073457},
      {40, 2.5, -0.26498308850855747182},
      {200, 10.0, -0.19128996363059031197},
      {1000, 30.0, -0.013944824394386906175},
  };
  for (const auto& r : rows) {
    auto v = hermite_values(r.k, r.x);
    CHECK(v[r.k] == Approx(r.value).epsilon(1e-11));
  }
}

TEST_CASE("h_0 and h_1 closed forms")
{
  std::vector<double> pts = {-3.0, -0.5, 0.0, 0.25, 2.0, 7.5};
  auto b = hermite_eval_1d(1, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-pts[i] * pts[i] / 2);
    CHECK(b(0, i) == Approx(h0).epsilon(1e-15));
    CHECK(b(1, i) == Approx(std::sqrt(2.0) * pts[i] * h0).epsilon(1e-15));
  }
  CHECK(hermite_values(1, 0.0)[1] == 0.0);
  CHECK(hermite_values(0, 0.0)[0] == Approx(0.75112554446494248).epsilon(1e-15));
}

TEST_CASE("three-term recurrence holds at every order")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-12, 12);
  for (int trial = 0; trial < 20; ++trial) {
    double x = U(rng);
    auto h = hermite_values(120, x);
    for (int k = 1; k < 120; ++k) {
      double next = std::sqrt(2.0 / (k + 1)) * x * h[k] - std::sqrt(double(k) / (k + 1)) * h[k - 1];
      CHECK(std::abs(h[k + 1] - next) <= 1e-14 * (1 + std::abs(h[k + 1])));
    }
  }
}

TEST_CASE("no overflow far into the tail")
{
  auto h = hermite_values(1500, 45.0);
  for (double v : h) CHECK(std::isfinite(v));
  CHECK(hermite_values(10, 60.0)[10] == 0.0);
}

TEST_CASE("orthonormality through a 64-node rule")
{
  auto rule = gauss_hermite_rule(64);
  auto b = hermite_eval_1d(5, rule.nodes);
  double i35 = 0, i33 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    i35 += rule.weights[i] * b(3, i) * b(5, i);
    i33 += rule.weights[i] * b(3, i) * b(3, i);
  }
  CHECK(std::abs(i35) <= 1e-12);
  CHECK(std::abs(i33 - 1) <= 1e-12);
}

TEST_CASE("Gram matrix of h_0..h_K is the identity on K+1 nodes")
{
  for (int K : {1, 10, 60, 200}) {
    auto rule = gauss_hermite_rule(K + 1);
    auto b = hermite_eval_1d(K, rule.nodes);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), K + 1);
    RowMatrix G = b.values * w.asDiagonal() * b.values.transpose();
    double err = (G - RowMatrix::Identity(K + 1, K + 1)).cwiseAbs().maxCoeff();
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("enumerate_shell")
{
  CHECK(enumerate_shell(2, 0) == std::vector<std::vector<int>>{{0, 0}});
  CHECK(enumerate_shell(2, 2) == std::vector<std::vector<int>>{{0, 2}, {1, 1}, {2, 0}});
  CHECK(enumerate_shell(3, 3).size() == 10);

  // brute force over the cube [0, k]^n
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= 7; ++k) {
      std::set<std::vector<int>> brute;
      std::vector<int> a(n, 0);
      while (true) {
        int s = 0;
        for (int v : a) s += v;
        if (s == k) brute.insert(a);
        int d = n - 1;
        while (d >= 0 && a[d] == k) a[d--] = 0;
        if (d < 0) break;
        ++a[d];
      }
      auto shell = enumerate_shell(n, k);
      CHECK(shell.size() == brute.size());
      CHECK(shell_size(n, k) == brute.size());
      CHECK(std::set<std::vector<int>>(shell.begin(), shell.end()) == brute);
      CHECK(std::is_sorted(shell.begin(), shell.end()));
      for (std::size_t i = 0; i < shell.size(); ++i) CHECK(shell_offset(shell[i]) == i);
    }
}

TEST_CASE("Gauss-Hermite small rules")
{
  auto r1 = gauss_hermite_rule(1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.raw_weight(0) == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));

  auto r2 = gauss_hermite_rule(2);
  CHECK(r2.nodes[0] == Approx(-1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  for (int i = 0; i < 2; ++i) CHECK(r2.raw_weight(i) == Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-14));

  // nodes +-sqrt((5 -+ sqrt 10)/2)
  auto r5 = gauss_hermite_rule(5);
  const double x[] = {-2.0201828704560856329, -0.95857246461381850711, 0.0, 0.95857246461381850711,
                      2.0201828704560856329};
  const double w[] = {0.019953242059045913208, 0.39361932315224115983, 0.94530872048294188123,
                      0.39361932315224115983, 0.019953242059045913208};
  for (int i = 0; i < 5; ++i) {
    CHECK(r5.nodes[i] == Approx(x[i]).epsilon(1e-14));
    CHECK(r5.raw_weight(i) == Approx(w[i]).epsilon(1e-13));
  }
}

TEST_CASE("Gauss-Hermite rule invariants")
{
  for (int m : {3, 8, 33, 100, 400, 2000}) {
    auto r = gauss_hermite_rule(m);
    REQUIRE(r.nodes.size() == std::size_t(m));
    double sum = 0;
    for (int i = 0; i < m; ++i) {
      if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
      CHECK(r.nodes[i] == Approx(-r.nodes[m - 1 - i]).epsilon(1e-13));
      CHECK(r.weights[i] > 0);
      CHECK(r.weights[i] == Approx(r.weights[m - 1 - i]).epsilon(1e-11));
      sum += r.raw_weight(i);
    }
    CHECK(sum == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gauss_hermite_rule(0), ConfigError);
  CHECK_THROWS_AS(gauss_hermite_rule(kMaxQuadratureNodes + 1), ConfigError);
}

TEST_CASE("m-node rule is exact to degree 2m-1")
{
  // int x^{2j} e^{-x^2} = Gamma(j + 1/2)
  for (int m : {4, 9, 16}) {
    auto r = gauss_hermite_rule(m);
    for (int d = 0; d <= 2 * m - 1; ++d) {
      double q = 0, scale = 0;
      for (int i = 0; i < m; ++i) {
        q += r.raw_weight(i) * std::pow(r.nodes[i], d);
        scale += r.raw_weight(i) * std::abs(std::pow(r.nodes[i], d));
      }
      double exact = d % 2 ? 0.0 : std::tgamma(d / 2.0 + 0.5);
      CHECK(std::abs(q - exact) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("tensor grids")
{
  auto g = gauss_hermite_grid(3, 5);
  CHECK(g.size() == 125);
  CHECK(g.shape() == std::vector<std::size_t>{5, 5, 5});
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.measure(i) > 0);
    CHECK(g.flat_index(g.multi_index(i)) == i);
  }
  std::vector<std::size_t> mi = {1, 0, 4};
  CHECK(g.flat_index(mi) == 1 * 25 + 0 * 5 + 4);

  auto u = uniform_grid(2, -2.0, 2.0, 8);
  CHECK(u.size() == 64);
  CHECK(u.axis_edges[0].size() == 9);
  CHECK(u.point(0)[0] == Approx(-1.75));
  double total = 0;
  for (double m : u.measures()) total += m;
  CHECK(total == Approx(16.0).epsilon(1e-15));
  CHECK_THROWS_AS(uniform_grid(2, 1.0, -1.0, 4), ConfigError);
}

TEST_CASE("basis cache round trip and corruption")
{
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "hr_test_basis";
  fs::create_directories(dir);
  std::string path = (dir / "b.hrb").string();
  auto rule = gauss_hermite_rule(12);
  auto b = hermite_eval_1d(11, rule.nodes);
  save_basis(path, 2, b);
  int dim = 0;
  auto back = load_basis(path, &dim);
  CHECK(dim == 2);
  CHECK(back.k_max == 11);
  CHECK(back.points == b.points);
  CHECK((back.values - b.values).cwiseAbs().maxCoeff() == 0.0);

  auto bytes = io::read_file(path);
  io::atomic_write(path, bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_basis(path), ConfigError);
  bytes[0] = 'X';
  io::atomic_write(path, bytes);
  CHECK_THROWS_AS(load_basis(path), ConfigError);
  fs::remove_all(dir);
}

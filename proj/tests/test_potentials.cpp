#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"
#include "hermite_riesz/potentials.hpp"

using namespace hermite_riesz;
using doctest::Approx;

namespace {

PotentialSpec zero_potential()
{
  return {"zero", [](std::span<const double>) { return 0.0; }, {}};
}

double mesh_dot(const EigenDecomp& d, const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
  return a.dot(b) * d.cell_measure();
}

}  // namespace

TEST_CASE("declared potential bounds")
{
  auto h = validate_potential(harmonic_potential(), 2, 8.0, 41);
  CHECK(h.passed());
  CHECK(h.ratio_min == Approx(1.0).epsilon(1e-9));
  CHECK(h.ratio_max == Approx(1.0).epsilon(1e-9));
  CHECK(h.second_max == Approx(2.0).epsilon(1e-4));
  CHECK(h.samples > 0);

  auto p = validate_potential(perturbed_harmonic_potential(0.05), 2, 9.0, 41);
  CHECK(p.passed());
  CHECK(p.ratio_min >= 0.9);
  CHECK(p.ratio_max <= 1.1);

  auto lin = validate_potential(linear_potential(), 2, 8.0, 41);
  CHECK_FALSE(lin.passed());
  CHECK_FALSE(lin.failures.empty());
}

TEST_CASE("free Laplacian spectra are exact for both schemes")
{
  double A = 3.0, h = 0.1;
  auto dvr = build_operator(zero_potential(), 1, A, h, LaplacianScheme::SineDVR);
  auto fd = build_operator(zero_potential(), 1, A, h, LaplacianScheme::SecondOrder);
  CHECK(dvr.m == 59);
  CHECK(dvr.axis.front() == Approx(-A + h));
  CHECK((dvr.matrix - dvr.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((fd.matrix - fd.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  auto ed = eigensolve(dvr, 10, 1.0);
  auto ef = eigensolve(fd, 10, 1.0);
  double L = 2 * A;
  for (int j = 1; j <= 10; ++j) {
    double k = std::numbers::pi * j / L;
    CHECK(ed.eigenvalues(j - 1) == Approx(k * k).epsilon(1e-12));
    double s = std::sin(std::numbers::pi * j * h / (2 * L));
    CHECK(ef.eigenvalues(j - 1) == Approx(4 / (h * h) * s * s).epsilon(1e-12));
  }
}

TEST_CASE("harmonic spectrum in one and two dimensions")
{
  auto op1 = build_operator(harmonic_potential(), 1, 12.0, 0.05);
  auto d1 = eigensolve(op1, 20);
  REQUIRE(d1.count() == 20);
  for (int j = 0; j < 20; ++j) CHECK(std::abs(d1.eigenvalues(j) - (2 * j + 1)) <= 1e-3);
  // Gershgorin: no row can put an eigenvalue below zero for V >= 0 beyond rounding
  for (int i = 0; i < op1.matrix.rows(); ++i) {
    double off = op1.matrix.row(i).cwiseAbs().sum() - std::abs(op1.matrix(i, i));
    CHECK(op1.matrix(i, i) + off >= 0);
  }

  auto op2 = build_operator(harmonic_potential(), 2, 8.0, 0.4);
  auto d2 = eigensolve(op2, 6);
  const double expect[] = {2, 4, 4, 6, 6, 6};
  for (int j = 0; j < 6; ++j) CHECK(std::abs(d2.eigenvalues(j) - expect[j]) <= 1e-3);
}

TEST_CASE("eigenvectors are mesh-orthonormal and satisfy the eigen-equation")
{
  auto op = build_operator(harmonic_potential(), 2, 7.0, 0.35);
  auto d = eigensolve(op, 15);
  Eigen::MatrixXd G = d.vectors.transpose() * d.vectors * d.cell_measure();
  CHECK((G - Eigen::MatrixXd::Identity(d.count(), d.count())).cwiseAbs().maxCoeff() <= 1e-8);
  for (int j = 0; j < d.count(); ++j) {
    Eigen::VectorXd r = op.matrix * d.vectors.col(j) - d.eigenvalues(j) * d.vectors.col(j);
    CHECK(std::sqrt(mesh_dot(d, r, r)) <= 1e-6 * std::abs(d.eigenvalues(j)));
    Eigen::Index at = 0;
    d.vectors.col(j).cwiseAbs().maxCoeff(&at);
    CHECK(d.vectors(at, j) > 0);
  }
}

TEST_CASE("perturbation moves eigenvalues by at most sup |dV|")
{
  double A = 6.0, eps = 0.05;
  auto a = eigensolve(build_operator(harmonic_potential(), 1, A, 0.05), 8);
  auto b = eigensolve(build_operator(perturbed_harmonic_potential(eps), 1, A, 0.05), 8);
  double sup = eps * A * A;
  for (int j = 0; j < 8; ++j) CHECK(std::abs(a.eigenvalues(j) - b.eigenvalues(j)) <= sup);
}

TEST_CASE("spectral ceiling")
{
  CHECK(spectral_ceiling(0.5) == Approx(0.2 * std::pow(std::numbers::pi / 0.5, 2)));
  auto d = eigensolve(build_operator(harmonic_potential(), 1, 6.0, 0.5), 20);
  CHECK(d.count() < 20);
  CHECK(d.eigenvalues(d.count() - 1) <= d.ceiling);
  CHECK_FALSE(d.warnings.empty());
}

TEST_CASE("band projectors")
{
  auto d = eigensolve(build_operator(harmonic_potential(), 1, 10.0, 0.1), 12);
  auto empty = band_projector_constant(d, std::sqrt(1.5));
  CHECK(empty.empty);
  CHECK(empty.norm.value == 0.0);
  CHECK(empty.modes == 0);

  // band around 3 holds phi_1 only; ||E||_{1->2} = sup |phi_1|
  auto one = band_projector_constant(d, std::sqrt(2.5));
  CHECK(one.modes == 1);
  CHECK(one.norm.value == Approx(d.vectors.col(1).cwiseAbs().maxCoeff()).epsilon(1e-14));

  Eigen::MatrixXd P = band_projector_matrix(d, 2.0, 8.0);
  CHECK((P * P - P).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(P.trace() == Approx(3.0).epsilon(1e-10));

  CHECK_THROWS_AS(band_projector_constant(d, 1.0, 1.5), ConfigError);
  CHECK_THROWS_AS(band_projector_constant(d, 10.0), NumericalError);
}

TEST_CASE("two-dimensional bands against the Hermite kernel")
{
  auto d = eigensolve(build_operator(harmonic_potential(), 2, 9.0, 0.3), 66);
  auto ax = d.axis();
  Eigen::MatrixXd pts(d.size(), 2);
  for (int i = 0; i < d.m; ++i)
    for (int j = 0; j < d.m; ++j) {
      pts(i * d.m + j, 0) = ax[i];
      pts(i * d.m + j, 1) = ax[j];
    }
  for (int k = 0; 2 * k + 2.5 < d.eigenvalues(d.count() - 1); ++k) {
    auto b = band_projector_constant(d, std::sqrt(2 * k + 1.5));
    CHECK(b.modes == k + 1);
    auto diag = projection_kernel_diag(k, pts);
    CHECK(b.norm.value == Approx(std::sqrt(*std::max_element(diag.begin(), diag.end()))).epsilon(1e-2));
  }
  std::vector<double> lambdas;
  for (int k = 0; k < 8; ++k) lambdas.push_back(std::sqrt(2 * k + 1.5));
  CHECK(band_projector_sweep(d, lambdas).ratio_spread() <= 3.0);
}

TEST_CASE("Bochner-Riesz means on the mesh")
{
  auto d = eigensolve(build_operator(harmonic_potential(), 1, 10.0, 0.05), 10);
  // delta = 0 with R^2 above every retained eigenvalue: identity on the retained span
  Eigen::VectorXd f = d.vectors.col(0) + 0.5 * d.vectors.col(3) - 2.0 * d.vectors.col(9);
  std::vector<double> fv(f.data(), f.data() + f.size());
  auto same = br_means_V(d, fv, 5.0, 0.0);
  for (std::size_t i = 0; i < fv.size(); ++i) CHECK(same[i] == Approx(fv[i]).epsilon(1e-10).scale(1.0));

  // phi_0 is scaled by (1 - lambda_0/R^2)^delta
  std::vector<double> p0(d.vectors.col(0).data(), d.vectors.col(0).data() + d.size());
  auto s = br_means_V(d, p0, 2.0, 0.5);
  double m0 = std::sqrt(1 - d.eigenvalues(0) / 4);
  for (std::size_t i = 0; i < p0.size(); ++i) CHECK(std::abs(s[i] - m0 * p0[i]) <= 1e-12);

  // continuum pipeline: f = sum c_k h_k, S_R f = sum (1 - (2k+1)/R^2)_+^delta c_k h_k
  const double c[] = {1.0, -0.4, 0.25, 0.6};
  auto ax = d.axis();
  std::vector<double> g(ax.size()), expect(ax.size());
  double R = std::sqrt(8.0);
  for (std::size_t i = 0; i < ax.size(); ++i) {
    auto hv = hermite_values(3, ax[i]);
    for (int k = 0; k < 4; ++k) {
      g[i] += c[k] * hv[k];
      expect[i] += std::sqrt(std::max(0.0, 1 - (2 * k + 1) / 8.0)) * c[k] * hv[k];
    }
  }
  auto out = br_means_V(d, g, R, 0.5);
  double err = 0;
  for (std::size_t i = 0; i < ax.size(); ++i) err = std::max(err, std::abs(out[i] - expect[i]));
  CHECK(err <= 1e-3);

  CHECK_THROWS_AS(br_means_V(d, g, 100.0, 0.5), NumericalError);
}

TEST_CASE("second-order scheme converges at order two")
{
  auto orders = eigenvalue_convergence_order(harmonic_potential(), 1, 8.0, 0.2, 4);
  REQUIRE(orders.size() == 4);
  for (double o : orders) CHECK(o == Approx(2.0).epsilon(0.1));
}

TEST_CASE("operator construction errors")
{
  CHECK_THROWS_AS(build_operator(harmonic_potential(), 1, 1.0, 0.3), ConfigError);
  CHECK_THROWS_AS(build_operator(harmonic_potential(), 3, 2.0, 0.5), ConfigError);
  CHECK_THROWS_AS(build_operator(harmonic_potential(), 2, 20.0, 0.05), ConfigError);
}

TEST_CASE("eigenpair files")
{
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "hr_test_hve";
  fs::create_directories(dir);
  std::string path = (dir / "e.hve").string();
  auto d = eigensolve(build_operator(harmonic_potential(), 2, 4.0, 0.5), 6);
  save_eigendecomp(path, d);
  auto back = load_eigendecomp(path);
  CHECK(back.dim == 2);
  CHECK(back.m == d.m);
  CHECK(back.h == d.h);
  CHECK(back.A == Approx(d.A).epsilon(1e-15));
  CHECK(back.ceiling == d.ceiling);
  CHECK((back.eigenvalues - d.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.vectors - d.vectors).cwiseAbs().maxCoeff() == 0.0);

  auto bytes = io::read_file(path);
  io::atomic_write(path, bytes + "x");
  CHECK_THROWS_AS(load_eigendecomp(path), ConfigError);
  io::atomic_write(path, bytes.substr(0, 20));
  CHECK_THROWS_AS(load_eigendecomp(path), ConfigError);
  fs::remove_all(dir);
}

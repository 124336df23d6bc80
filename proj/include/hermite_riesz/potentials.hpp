#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hermite_riesz/analysis.hpp"

namespace hermite_riesz {

struct PotentialBounds
{
  double c1 = 1.0, c2 = 1.0;  // V / |x|^2
  double c3 = 2.0, c4 = 2.0;  // |grad V| / |x|
  double c5 = 2.0;            // sup |d_i d_j V|
  double core_radius = 1.0;   // ratio checks only for |x| > core_radius
};

struct PotentialSpec
{
  std::string name;
  std::function<double(std::span<const double>)> V;
  PotentialBounds declared;
};

PotentialSpec harmonic_potential();
/// |x|^2 (1 + eps sin x_1); declared bounds hold on boxes of half-width <= 9.
PotentialSpec perturbed_harmonic_potential(double eps = 0.05);
PotentialSpec linear_potential();

struct PotentialReport
{
  double ratio_min = 0.0, ratio_max = 0.0;
  double grad_min = 0.0, grad_max = 0.0;
  double second_max = 0.0;
  double core_radius = 0.0;
  std::size_t samples = 0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// Samples [-A, A]^dim with `samples` points per axis.
PotentialReport validate_potential(const PotentialSpec& spec, int dim, double A, int samples);

enum class LaplacianScheme { SineDVR, SecondOrder };

std::string to_string(LaplacianScheme s);

/// -Delta_h + diag V on the interior nodes -A + i h, i = 1..m, of [-A, A]^dim, Dirichlet boundary.
struct DiscreteOperator
{
  int dim = 1;
  double A = 0.0;
  double h = 0.0;
  int m = 0;  // interior nodes per axis
  LaplacianScheme scheme = LaplacianScheme::SineDVR;
  std::string potential;
  std::vector<double> axis;
  Eigen::MatrixXd matrix;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

DiscreteOperator build_operator(const PotentialSpec& spec, int dim, double A, double h,
                                LaplacianScheme scheme = LaplacianScheme::SineDVR);

struct EigenDecomp
{
  int dim = 1;
  int m = 0;
  double h = 0.0;
  double A = 0.0;
  double ceiling = 0.0;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd vectors;      // columns, sum_i phi(x_i)^2 h^dim = 1
  std::vector<std::string> warnings;

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  int count() const { return static_cast<int>(eigenvalues.size()); }
  std::vector<double> axis() const;
  double cell_measure() const;
};

inline constexpr double kCeilingFactor = 0.2;

double spectral_ceiling(double h, double factor = kCeilingFactor);

/// Lowest `count` eigenpairs; modes above the ceiling are dropped with a warning.
EigenDecomp eigensolve(const DiscreteOperator& op, int count, double ceiling_factor = kCeilingFactor);

struct BandReport
{
  NormReport norm;
  double lo = 0.0, hi = 0.0;
  int modes = 0;
  bool empty = true;
};

/// ||E[lambda^2, lambda^2 + 1)||_{1->2} = sup_y sqrt(sum_band phi_j(y)^2). Only p = 1.
BandReport band_projector_constant(const EigenDecomp& d, double lambda, double p = 1.0);

/// Non-empty bands only, ratios against (1 + lambda)^{n(1/p - 1/2) - 1}.
SweepResult band_projector_sweep(const EigenDecomp& d, const std::vector<double>& lambdas, double p = 1.0);

/// Matrix of E[lo, hi) acting on mesh functions.
Eigen::MatrixXd band_projector_matrix(const EigenDecomp& d, double lo, double hi);

/// sum_j (1 - lambda_j / R^2)_+^delta (f, phi_j) phi_j.
std::vector<double> br_means_V(const EigenDecomp& d, std::span<const double> f, double R, double delta);

/// Observed order log2((l(h) - l(h/2)) / (l(h/2) - l(h/4))) for each of the lowest `modes` eigenvalues.
std::vector<double> eigenvalue_convergence_order(const PotentialSpec& spec, int dim, double A, double h, int modes,
                                                 LaplacianScheme scheme = LaplacianScheme::SecondOrder);

/// HVE1 eigenpair file.
void save_eigendecomp(const std::string& path, const EigenDecomp& d);
EigenDecomp load_eigendecomp(const std::string& path);

}  // namespace hermite_riesz

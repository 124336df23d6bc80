#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hermite_riesz/cz.hpp"
#include "hermite_riesz/spectral_core.hpp"

namespace hermite_riesz {

enum class NormMethod { ExactKernel, TestFamilyLowerBound, SortedLevelSet, Quadrature };

std::string to_string(NormMethod m);

struct NormReport
{
  double value = 0.0;
  NormMethod method = NormMethod::SortedLevelSet;
  int family_size = 0;
  std::string description;
};

struct SweepResult
{
  std::string axis_name;
  std::vector<double> axis;
  std::vector<double> values;
  double reference_exponent = 0.0;
  std::vector<double> ratios;  // values / axis^reference_exponent
  double fitted_constant = 0.0;

  double ratio_spread() const;  // max ratio / min ratio
  double loglog_slope() const;  // least squares slope of log(value) against log(axis)
};

/// sup_a a |{|f| > a}|^{1/p} with the grid measures.
NormReport weak_lp_quasinorm(const GridFunction& f, double p);
NormReport weak_lp_quasinorm(std::span<const double> values, std::span<const double> measures, double p);
NormReport lp_norm(const GridFunction& f, double p);

struct RestrictionOptions
{
  double ray_step = 0.01;
  double ray_margin = 4.0;  // ray covers [0, sqrt(2k+n) + margin]
  double ray_max = 0.0;     // overrides the above when > 0
};

/// sup_y Phi_k(y,y) for k = 0..K along a ray, refined at the discrete maximum.
struct RestrictionTable
{
  int n = 0;
  std::vector<double> sup_phi;  // sup_y Phi_k(y,y)
  std::vector<double> argmax;   // radius of the sup

  double sup_beyond(int l) const;
};

RestrictionTable restriction_table(int n, int K, const RestrictionOptions& opt = {});

/// ||P_k||_{1->2} = sup sqrt(Phi_k) for k in [k_min, k_max]; ratios against k^{(n-2)/4}.
SweepResult restriction_constant_sweep(int n, int k_min, int k_max, const RestrictionOptions& opt = {});

/// Phi_k(y,y) by summing h_alpha(y)^2 over the shell.
double projection_diag_bruteforce(int k, std::span<const double> y);

struct FamilyMember
{
  std::string name;
  CoeffRep coeffs;
};

/// Gaussians (5 centers x 3 widths), single-shell functions at k in {1,4,16,64},
/// random band functions (3 seeds) and a bump at the turning point of shell 64.
/// Members beyond K are dropped.
std::vector<FamilyMember> standard_test_family(int n, int K, std::uint64_t seed = 1);

/// Hermite coefficients up to K of exp(-|x-c|^2/(2 sigma^2)), unit L2 norm.
CoeffRep gaussian_coeffs(int n, int K, std::span<const double> center, double sigma);

NormReport apriori_constant(int n, double p, const std::vector<FamilyMember>& family,
                            std::shared_ptr<const TensorGrid> grid);

struct FsCheckResult
{
  SweepResult sweep;
  bool non_increasing = false;
};

/// Kernel mass outside |x - y| <= r for truncations K, on points with measures.
FsCheckResult fs_support_check(const MultiplierSpec& F, const std::vector<int>& Ks, const Eigen::MatrixXd& points,
                               std::span<const double> measures);

struct WeakTypeResult
{
  SweepResult sweep;                       // family max per R
  std::vector<std::vector<double>> member_ratios;  // [member][R]
  std::vector<std::string> member_names;
  double slope = 0.0;
  double max_over_min = 0.0;
  bool uniform = false;  // slope <= 0.1
};

inline constexpr double kUniformitySlope = 0.1;

WeakTypeResult weak_type_sweep(int n, double p, const std::vector<double>& Rs, const std::vector<FamilyMember>& family,
                               double delta, std::shared_ptr<const TensorGrid> grid);

struct ConvergenceResult
{
  SweepResult sweep;                  // ||S_R f - f||_{p,inf} via grid differences
  std::vector<double> coefficient_route;  // same quantity, (m - 1) c synthesized directly
  bool decreasing_past_top = false;
  double top_eigenvalue = 0.0;
};

ConvergenceResult convergence_sweep(const CoeffRep& c, double p, double delta, const std::vector<double>& Rs,
                                    std::shared_ptr<const TensorGrid> grid);

/// ||A c||_2^2 <= A sum ||f_k||^2 for random Q_k; returns the largest observed lhs / rhs.
double orthogonality_trial_ratio(int n, int K, int members, int trials, std::uint64_t seed);

struct NkBoundOptions
{
  int M = 10;
  int K = 600;
};

struct NkBoundReport
{
  int k = 0;
  double R = 0.0;
  double p = 1.0;
  int n = 2;
  double alpha = 0.0;
  double ball_radius = 0.0;
  double head_norm = 0.0;      // shells <= K, exact coefficients
  double tail_majorant = 0.0;  // shells > K, restriction bound
  double norm_estimate = 0.0;  // sqrt(head^2 + tail^2)
  double rhs_scale = 0.0;      // alpha |B_j|^{1/2} max{2^{k/2}/R, 1}
  double ratio = 0.0;
  double restriction_bound = 0.0;  // sqrt(sum_l n_k^2 sup Phi_l) ||b||_1
  double restriction_ratio = 0.0;  // restriction_bound / rhs_scale
  double sum_I = 0.0, sum_II = 0.0, sum_III = 0.0;                 // majorant sums
  double measured_I = 0.0, measured_II = 0.0, measured_III = 0.0;  // n_k^2 ||P_l b||^2 / ||b||_p^2
  double formula_I = 0.0;       // (2^k/R)^{2n(1/2-1/p)} max{1, 2^k/R^2}
  double formula_II_III = 0.0;  // (2^k/R)^{2n(1/2-1/p)}
  double b_p = 0.0;
};

/// Shell energies ||P_l b||^2, l = 0..K, of a CZ part on its uniform grid.
std::vector<double> part_shell_energies(const CZPart& part, const TensorGrid& grid, int K);

NkBoundReport nk_bj_bound_check(const CZPart& part, const TensorGrid& grid, double alpha, int k, double R, double p,
                                const RestrictionTable& table, const NkBoundOptions& opt = {});

struct ProofTraceReport
{
  double alpha = 0.0, R = 0.0, p = 1.0, delta = 0.0;
  int n = 0;
  std::size_t parts = 0, parts_small = 0, parts_large = 0;
  double f_pp = 0.0;
  double budget = 0.0;  // alpha^{-p} ||f||_p^p
  double level_g = 0.0, level_h1 = 0.0, level_h2_outside = 0.0;
  double omega_star = 0.0;
  double g_l2_sq = 0.0;  // ||g||_2^2
  double const_g = 0.0, const_h1 = 0.0, const_h2 = 0.0, const_omega = 0.0;
  double g_chebyshev_ratio = 0.0;  // level_g / (alpha^{-2} ||g||_2^2)
  std::vector<std::string> warnings;

  double total_constant() const { return const_g + const_h1 + const_h2 + const_omega; }
};

ProofTraceReport proof_trace(const GridFunction& f, double alpha, double R, double p);

}  // namespace hermite_riesz

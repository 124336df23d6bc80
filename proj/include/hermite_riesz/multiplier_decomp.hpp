#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace hermite_riesz {

/// psi(u) = (sinc(u/(4M))^{2M} + sinc(u/(4M phi))^{2M}) / 2.
struct BandLimitedBump
{
  int M = 0;
  double scale1 = 0.0;
  double scale2 = 0.0;

  double operator()(double u) const;
};

BandLimitedBump build_bump(int M);

/// theta = indicator of [-3/4, 3/4] convolved with the N-fold box of radius 1/(4N);
/// theta = 1 on [-1/2, 1/2], supported in [-1, 1].
struct FourierCutoff
{
  int order = 0;

  double theta(double tau) const;
  /// (1/2pi) int theta(tau) e^{i tau w} d tau
  double inverse(double w) const;
};

FourierCutoff build_cutoff(int order);

double bochner_riesz_profile(double lambda, double R, double delta);

/// Closed-form int S(lambda) e^{-i t lambda} d lambda for S = (1 - lambda^2/R^2)_+^delta.
double bochner_riesz_fourier_transform(double t, double R, double delta);

struct DecompositionOptions
{
  double guard = 1e-10;
  double tol = 1e-8;
  int cutoff_order = 0;  // 0 means M + 4
  double window = 300.0;
  bool scan_guard = true;
};

struct DecompositionPieces
{
  int k = 0;
  double R = 0.0;
  double delta = 0.0;
  int M = 0;
  double guard_threshold = 0.0;
  double residual_tol = 0.0;
  std::function<double(double)> n_k;
  std::function<double(double)> eta_k;
  std::optional<std::function<double(double)>> m_k;

  double S(double lambda) const { return bochner_riesz_profile(lambda, R, delta); }
  /// Declared Fourier support radius of n_k.
  double n_radius() const;
  /// Declared Fourier support radius of m_k.
  double m_radius() const;
  double identity_residual(double lambda) const;
};

DecompositionPieces decompose_small_k(double R, double delta, int k, int M, const DecompositionOptions& opt = {});
DecompositionPieces decompose_large_k(double R, double delta, int k, int M, const DecompositionOptions& opt = {});

/// Uniform samples on [0, 3R] plus geometric refinement on both sides of lambda = R
/// down to offsets R 2^{-refine_levels}.
std::vector<double> lambda_sample_grid(double R, int uniform_count, int refine_levels);

struct PropertyReport
{
  double identity_residual = 0.0;
  double fourier_leakage = 0.0;
  double envelope_constant = 0.0;
  bool envelope_fit_ok = false;
  double square_sum_max = 0.0;  // max_lambda |eta_k|^2
  double weighted_square_sum = 0.0;  // max_lambda |eta_k|^2 (1+lambda^2)^gamma / R^{2 gamma}
  double eta_min_bound = 0.0;   // small k: max |eta_k| / min(1, (2^k lambda/R)^2) on supp S
};

struct VerifyOptions
{
  double gamma = 1.0;
  int fourier_samples = 1 << 16;
  int m_fourier_samples = 1 << 12;
  int max_k_for_m_leakage = 6;
};

PropertyReport verify_decomposition(const DecompositionPieces& d, std::span<const double> lambdas,
                                    const VerifyOptions& opt = {});

/// sup of |n_k(lambda)| 2^{delta k} (1 + 2^k |1 - |lambda|/R|)^N (large k) or
/// |n_k(lambda)| (1 + 2^k |lambda| / R)^N (small k), sampled out to |u| = 1e6.
/// fit_ok is false when the last decade exceeds the previous one by more than 1.5x.
double envelope_constant(const DecompositionPieces& d, double N, bool* fit_ok = nullptr);

struct FamilyRow
{
  int k;
  PropertyReport report;
};

struct FamilyAudit
{
  double R, delta;
  int M;
  std::vector<FamilyRow> rows;
  double small_square_sum_max = 0.0;  // max_lambda sum_{k<=0} |eta_k|^2
  double weighted_square_sum = 0.0;        // max_lambda sum_{k>=1} |eta_k|^2 (1+lambda^2)^gamma / R^{2 gamma}
  double max_identity_residual = 0.0;
  double max_fourier_leakage = 0.0;
};

FamilyAudit audit_family(double R, double delta, int M, int k_min, int k_max, std::span<const double> lambdas,
                         const VerifyOptions& opt = {});

/// Fourier-side route: (1/pi) int_0^{2^k/R} S^(t) theta(Rt/2^k) cos(t lambda) dt.
double m_k_fourier_route(double lambda, double R, double delta, int k, const FourierCutoff& theta);

/// S^ sampled by a 2^log2n-point DFT of S on [-4R, 4R], linearly interpolated at t.
std::vector<double> bochner_riesz_transform_dft(double R, double delta, int log2n, std::span<const double> t);

}  // namespace hermite_riesz

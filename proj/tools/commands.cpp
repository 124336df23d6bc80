#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <json.hpp>

#include "hermite_riesz/analysis.hpp"
#include "hermite_riesz/cz.hpp"
#include "hermite_riesz/error.hpp"
#include "hermite_riesz/hermite_basis.hpp"
#include "hermite_riesz/multiplier_decomp.hpp"
#include "hermite_riesz/output.hpp"
#include "hermite_riesz/potentials.hpp"
#include "hermite_riesz/spectral_core.hpp"

namespace hermite_riesz::cli {

namespace fs = std::filesystem;
using io::format_double;

bool Artifacts::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Artifacts::check(const std::string& name, double value, const std::string& relation, double threshold)
{
  bool ok = relation == "<=" ? value <= threshold : relation == ">=" ? value >= threshold : value == threshold;
  checks.push_back({name, value, relation, threshold, ok});
}

namespace {

std::string fmt(double v) { return format_double(v); }

std::string join(const std::vector<double>& v)
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

void note(RunContext& ctx, const std::string& msg)
{
  if (!ctx.quiet) std::fprintf(stderr, "%s\n", msg.c_str());
}

double spread(const std::vector<double>& v)
{
  double lo = INFINITY, hi = 0;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

Eigen::MatrixXd cube_points(int n, int side, double half_width)
{
  Eigen::Index N = 1;
  for (int d = 0; d < n; ++d) N *= side;
  Eigen::MatrixXd pts(N, n);
  for (Eigen::Index i = 0; i < N; ++i) {
    Eigen::Index r = i;
    for (int d = n - 1; d >= 0; --d) {
      pts(i, d) = -half_width + 2 * half_width * static_cast<double>(r % side) / (side - 1);
      r /= side;
    }
  }
  return pts;
}

// ------------------------------------------------------------ basis-build
Artifacts basis_build(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("basis");
  int nodes = sec.get_int("nodes", cfg.K + 1);
  sec.reject_unread();
  if (nodes < cfg.K + 1) throw ConfigError("[basis] nodes: need at least K+1 = " + std::to_string(cfg.K + 1));
  Artifacts a;
  a.anchor = "orthonormal Hermite functions h_alpha, eigenfunctions of H = -Delta + |x|^2 with eigenvalue 2|alpha| + n";
  a.parameters = {{"nodes", std::to_string(nodes)}};

  auto rule = gauss_hermite_rule(nodes);
  auto basis = hermite_eval_1d(cfg.K, rule.nodes);
  std::string path = (fs::path(cfg.cache) / ("basis-n" + std::to_string(cfg.dim) + "-K" + std::to_string(cfg.K) +
                                             "-m" + std::to_string(nodes) + ".hrb"))
                         .string();
  double cache_diff = 0;
  if (fs::exists(path)) {
    int d = 0;
    auto cached = load_basis(path, &d);
    if (d != cfg.dim || cached.k_max != cfg.K || cached.points.size() != basis.points.size())
      throw ConfigError(path + ": cached basis does not match the configuration");
    cache_diff = (cached.values - basis.values).cwiseAbs().maxCoeff();
    note(ctx, "basis-build: reused " + path);
  } else {
    save_basis(path, cfg.dim, basis);
    note(ctx, "basis-build: wrote " + path);
  }

  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), nodes);
  RowMatrix G = basis.values * w.asDiagonal() * basis.values.transpose();
  io::CsvWriter csv("basis-build", {"k", "gram_error"});
  io::PlotSeries s{"max_j |G(k,j) - delta_kj|", {}, {}};
  double worst = 0;
  for (int k = 0; k <= cfg.K; ++k) {
    double e = 0;
    for (int j = 0; j <= cfg.K; ++j) e = std::max(e, std::abs(G(k, j) - (k == j ? 1.0 : 0.0)));
    worst = std::max(worst, e);
    csv.cell(k).cell(e).end_row();
    s.x.push_back(k + 1);
    s.y.push_back(e);
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("Gram error of the 1D basis", "k + 1", "error", {s});
  a.check("max gram error", worst, "<=", 1e-10);
  a.check("cache agreement", cache_diff, "<=", 1e-14);
  return a;
}

// ------------------------------------------------------------ restriction-sweep
Artifacts restriction_sweep(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("restriction");
  int kmin = sec.get_int("k_min", 10), kmax = sec.get_int("k_max", 150);
  RestrictionOptions opt;
  opt.ray_step = sec.get_double("ray_step", opt.ray_step);
  double max_spread = sec.get_double("max_spread", 3.0);
  sec.reject_unread();
  if (kmin < 1 || kmax < kmin) throw ConfigError("[restriction] need 1 <= k_min <= k_max");
  if (!(opt.ray_step > 0)) throw ConfigError("[restriction] ray_step: must be > 0");
  Artifacts a;
  a.anchor = "restriction-type estimate ||P_k||_{1->2} <= C k^{(n-2)/4}";
  a.parameters = {{"k_min", std::to_string(kmin)}, {"k_max", std::to_string(kmax)}, {"ray_step", fmt(opt.ray_step)}};

  auto s = restriction_constant_sweep(cfg.dim, kmin, kmax, opt);
  io::CsvWriter csv("restriction-sweep", {"k", "norm_1_to_2", "ratio"});
  for (std::size_t i = 0; i < s.axis.size(); ++i) csv.cell(s.axis[i]).cell(s.values[i]).cell(s.ratios[i]).end_row();
  a.csv = csv.str();
  a.svg = io::svg_loglog("||P_k||_{1->2} and its ratio to k^{(n-2)/4}", "k", "value",
                         {{"||P_k||_{1->2}", s.axis, s.values}, {"ratio", s.axis, s.ratios}});
  if (cfg.dim == 3) {
    double early = 0, all = 0;
    for (std::size_t i = 0; i < s.axis.size(); ++i) {
      if (s.axis[i] <= 20) early = std::max(early, s.ratios[i]);
      all = std::max(all, s.ratios[i]);
    }
    if (early == 0) throw ConfigError("[restriction] k_min must be <= 20 for the n = 3 growth check");
    a.check("max ratio / max ratio for k <= 20", all / early, "<=", 2.0);
  } else {
    a.check("ratio max/min", s.ratio_spread(), "<=", max_spread);
  }
  return a;
}

// ------------------------------------------------------------ apriori
Artifacts apriori(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("apriori");
  auto Ks = sec.get_int_list("K_list", {std::max(1, cfg.K / 4), std::max(1, cfg.K / 2), cfg.K});
  int nodes = sec.get_int("nodes", cfg.K + 20);
  double growth = sec.get_double("max_growth", 2.0);
  sec.reject_unread();
  for (int K : Ks)
    if (K < 1 || K > cfg.K) throw ConfigError("[apriori] K_list: values must lie in [1, K]");
  if (nodes < cfg.K + 1) throw ConfigError("[apriori] nodes: need at least K+1");
  Artifacts a;
  a.anchor = "a priori estimate ||(1+H)^{-gamma/2}||_{L^2 -> L^{p,infinity}} <= C with gamma = n(1/p - 1/2)";
  a.parameters = {{"nodes", std::to_string(nodes)}};

  auto grid = std::make_shared<const TensorGrid>(gauss_hermite_grid(cfg.dim, nodes));
  auto family = standard_test_family(cfg.dim, cfg.K, cfg.seed);
  io::CsvWriter csv("apriori", {"K", "constant", "family_size"});
  std::vector<double> xs, vals;
  for (int K : Ks) {
    std::vector<FamilyMember> trunc;
    for (const auto& m : family) {
      auto c = CoeffRep::zeros(cfg.dim, K);
      for (int k = 0; k <= K; ++k) c.shells[k] = m.coeffs.shells[k];
      if (c.norm() > 0) trunc.push_back({m.name, c});
    }
    auto r = apriori_constant(cfg.dim, cfg.p, trunc, grid);
    csv.cell(K).cell(r.value).cell(r.family_size).end_row();
    xs.push_back(K);
    vals.push_back(r.value);
    note(ctx, "apriori: K=" + std::to_string(K) + " " + r.description);
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("a priori constant, test-family lower bound", "K", "constant", {{"constant", xs, vals}});
  a.check("constant finite and positive", std::isfinite(vals.back()) && vals.back() > 0 ? 1.0 : 0.0, "==", 1.0);
  a.check("max/min across truncations", spread(vals), "<=", growth);
  return a;
}

// ------------------------------------------------------------ decomp-audit
Artifacts decomp_audit(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("decomp");
  int M = sec.get_int("M", 10);
  int kmin = sec.get_int("k_min", -6);
  int extra = sec.get_int("k_extra", 6);
  VerifyOptions vo;
  vo.gamma = sec.get_double("gamma", 1.0);
  sec.reject_unread();
  if (kmin > 0) throw ConfigError("[decomp] k_min: must be <= 0");
  double delta = cfg.delta_value();
  Artifacts a;
  a.anchor = "decomposition S_R^delta(lambda^2) = m_k(lambda) + eta_k(lambda) n_k(lambda) with band-limited m_k, n_k, "
             "the n_k envelope and the square-sum bound on eta_k";
  a.parameters = {{"M", std::to_string(M)}, {"delta", fmt(delta)}, {"gamma", fmt(vo.gamma)}};

  io::CsvWriter csv("decomp-audit",
                    {"R", "k", "identity_residual", "fourier_leakage", "envelope_constant", "envelope_fit_ok",
                     "square_sum_max", "weighted_square_sum"});
  std::vector<double> small, large;
  double ident = 0, leak = 0;
  int bad_fits = 0;
  for (double R : cfg.R) {
    int kmax = static_cast<int>(std::ceil(std::log2(R))) + extra;
    auto fam = audit_family(R, delta, M, kmin, kmax, lambda_sample_grid(R, 601, 16), vo);
    for (const auto& row : fam.rows) {
      const auto& r = row.report;
      csv.cell(R).cell(row.k).cell(r.identity_residual).cell(r.fourier_leakage).cell(r.envelope_constant)
          .cell(r.envelope_fit_ok ? 1 : 0).cell(r.square_sum_max).cell(r.weighted_square_sum).end_row();
      if (!r.envelope_fit_ok) ++bad_fits;
    }
    small.push_back(fam.small_square_sum_max);
    large.push_back(fam.weighted_square_sum);
    ident = std::max(ident, fam.max_identity_residual);
    leak = std::max(leak, fam.max_fourier_leakage);
    note(ctx, "decomp-audit: R=" + fmt(R) + " done");
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("decomposition constants against R", "R", "constant",
                         {{"max sum_{k<=0} |eta_k|^2", cfg.R, small}, {"large-k square-sum constant", cfg.R, large}});
  a.check("identity residual", ident, "<=", 1e-8);
  a.check("Fourier leakage", leak, "<=", 1e-6);
  a.check("failed envelope fits", bad_fits, "==", 0);
  a.check("small-k square sum max/min over R", spread(small), "<=", 2.0);
  a.check("large-k square-sum constant max/min over R", spread(large), "<=", 2.0);
  return a;
}

// ------------------------------------------------------------ fs-check
Artifacts fs_check(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("fs");
  int M = sec.get_int("M", 4);
  double scale = sec.get_double("scale", 4.0);
  auto Ks = sec.get_int_list("K_list", {10, 20, 40, 80, 160});
  int side = sec.get_int("points_per_axis", cfg.dim == 1 ? 401 : cfg.dim == 2 ? 31 : 11);
  double half = sec.get_double("half_width", 10.0);
  double leak_max = sec.get_double("max_leakage", 1e-4);
  sec.reject_unread();
  if (!(scale > 0) || side < 2 || !(half > 0) || Ks.empty()) throw ConfigError("[fs] invalid parameters");
  Artifacts a;
  a.anchor = "finite propagation speed: the kernel of F(sqrt H) vanishes for |x - y| > r when supp F^ lies in [-r, r]";
  a.parameters = {{"M", std::to_string(M)}, {"scale", fmt(scale)}, {"points_per_axis", std::to_string(side)}};

  auto psi = build_bump(M);
  MultiplierSpec F{"psi(scale * lambda)", [psi, scale](double l) { return psi(scale * l); }, true, scale / 2,
                   std::nullopt};
  auto pts = cube_points(cfg.dim, side, half);
  std::vector<double> w(pts.rows(), std::pow(2 * half / (side - 1), cfg.dim));
  auto res = fs_support_check(F, Ks, pts, w);
  io::CsvWriter csv("fs-check", {"K", "leakage"});
  for (std::size_t i = 0; i < res.sweep.axis.size(); ++i) csv.cell(res.sweep.axis[i]).cell(res.sweep.values[i]).end_row();
  a.csv = csv.str();
  a.svg = io::svg_loglog("kernel mass outside |x - y| <= r", "K", "leakage", {{"leakage", res.sweep.axis, res.sweep.values}});
  a.check("leakage non-increasing in K", res.non_increasing ? 1.0 : 0.0, "==", 1.0);
  a.check("leakage at largest K", res.sweep.values.back(), "<=", leak_max);
  return a;
}

// ------------------------------------------------------------ cz-audit
Artifacts cz_audit(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("cz");
  int functions = sec.get_int("functions", 50);
  auto heights = sec.get_list("heights", {1.5, 3, 10, 30, 100});
  int cells = sec.get_int("cells", cfg.dim == 1 ? 256 : cfg.dim == 2 ? 64 : 16);
  double half = sec.get_double("half_width", 8.0);
  sec.reject_unread();
  if (functions < 1 || heights.empty() || !(half > 0)) throw ConfigError("[cz] invalid parameters");
  for (double h : heights)
    if (!(h > 0)) throw ConfigError("[cz] heights: must be positive");
  Artifacts a;
  a.anchor = "Calderon-Zygmund decomposition f = g + sum b_j at height alpha, properties (i)-(iv)";
  a.parameters = {{"functions", std::to_string(functions)}, {"heights", join(heights)}, {"cells", std::to_string(cells)}};

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::normal_distribution<double> N01;
  auto grid = std::make_shared<const TensorGrid>(uniform_grid(cfg.dim, -half, half, cells));
  auto w = grid->measures();
  io::CsvWriter csv("cz-audit", {"function", "height", "parts", "g_inf_over_alpha", "g_p_over_f_p", "iv_max",
                                 "cube_sum_ratio", "ball_sum_ratio", "overlap", "overlap_bound", "reconstruction_error",
                                 "pass"});
  int failed = 0;
  std::vector<double> xs, parts;
  for (int f_i = 0; f_i < functions; ++f_i) {
    std::vector<double> v(grid->size());
    for (double& x : v) x = 0.05 * N01(rng);
    int spikes = 1 + static_cast<int>(10 * U(rng));
    for (int s = 0; s < spikes; ++s) v[static_cast<std::size_t>(U(rng) * v.size())] += 50 * N01(rng);
    GridFunction f(grid, v);
    double mean = 0, tot = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      mean += std::pow(std::abs(v[i]), cfg.p) * w[i];
      tot += w[i];
    }
    mean = std::pow(mean / tot, 1 / cfg.p);
    for (double h : heights) {
      auto out = cz_decompose(f, h * mean, cfg.p);
      auto rep = verify_cz(out, f);
      bool ok = rep.passed() && rep.reconstruction_error == 0.0;
      if (!ok) ++failed;
      for (const auto& w_ : out.warnings) {
        std::string msg = "function " + std::to_string(f_i) + ": " + w_;
        if (std::find(a.warnings.begin(), a.warnings.end(), msg) == a.warnings.end()) a.warnings.push_back(msg);
      }
      const auto& m = rep.measured;
      csv.cell(f_i).cell(h).cell(out.parts.size()).cell(m.g_inf_over_alpha).cell(m.g_p_over_f_p).cell(m.iv_max)
          .cell(m.cube_sum_ratio).cell(m.ball_sum_ratio).cell(m.overlap).cell(rep.bounds.overlap)
          .cell(rep.reconstruction_error).cell(ok ? 1 : 0).end_row();
      if (f_i == 0) {
        xs.push_back(h);
        parts.push_back(static_cast<double>(out.parts.size()));
      }
    }
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("parts selected for the first function", "height / mean", "parts", {{"parts", xs, parts}});
  a.check("failing decompositions", failed, "==", 0);
  return a;
}

// ------------------------------------------------------------ nk-bound
// Dyadic cube side whose ball radius sqrt(n)/2 * side falls in [2^k/R, 2^{k+1}/R).
double side_for_group(int n, int k, double R)
{
  double side = std::exp2(std::ceil(std::log2(std::ldexp(1.0, k) / R * 2 / std::sqrt(double(n)))));
  if (radius_group(side * std::sqrt(double(n)) / 2, R) != k) side *= 2;
  return side;
}

Artifacts nk_bound(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("nk");
  NkBoundOptions opt;
  opt.K = sec.get_int("K", opt.K);
  opt.M = sec.get_int("M", opt.M);
  int cells = sec.get_int("cells", 256);
  double half = sec.get_double("half_width", 32.0);
  int kmin = sec.get_int("k_min", 1), kmax = sec.get_int("k_max", 7);
  auto Rs = sec.get_list("R", {8, 16});
  double stability = sec.get_double("max_factor", 4.0);
  sec.reject_unread();
  if (cfg.dim > 2) throw ConfigError("nk-bound: dim must be 1 or 2");
  if (kmin < 1 || kmax < kmin || Rs.size() < 1) throw ConfigError("[nk] invalid k range or R list");
  Artifacts a;
  a.anchor = "||n_k(sqrt H) b_j||_2 <= C alpha |B_j|^{1/2} max{2^{k/2}/R, 1} and the three-range shell sum behind it";
  a.parameters = {{"K", std::to_string(opt.K)}, {"M", std::to_string(opt.M)}, {"cells", std::to_string(cells)},
                  {"R", join(Rs)}};

  auto grid = std::make_shared<const TensorGrid>(uniform_grid(cfg.dim, -half, half, cells));
  auto table = restriction_table(cfg.dim, opt.K);
  double h = 2 * half / cells;
  io::CsvWriter csv("nk-bound", {"R", "k", "side", "ratio", "head_norm", "tail_majorant", "restriction_ratio",
                                 "measured_I", "measured_II", "measured_III", "formula_I", "formula_II_III", "sum_I",
                                 "sum_II", "sum_III"});
  std::vector<io::PlotSeries> plot;
  std::vector<double> Cs;
  std::vector<std::array<double, 3>> fitted;
  for (double R : Rs) {
    io::PlotSeries s{"R=" + fmt(R), {}, {}};
    double C = 0;
    std::array<double, 3> cases = {0, 0, 0};
    for (int k = kmin; k <= kmax; ++k) {
      double side = side_for_group(cfg.dim, k, R);
      long span = std::lround(side / h);
      if (span < 1 || side > half) {
        a.warnings.push_back("R=" + fmt(R) + ", k=" + std::to_string(k) + ": cube side " + fmt(side) +
                             " does not fit the grid, skipped");
        continue;
      }
      // the dyadic cube [0, side]^n with a single spike cell near its center
      std::vector<double> v(grid->size(), 0.0);
      std::vector<std::size_t> mi(cfg.dim, static_cast<std::size_t>(cells / 2 + span / 2));
      v[grid->flat_index(mi)] = 1.0 / std::pow(h, cfg.dim);
      GridFunction f(grid, v);
      auto out = cz_decompose(f, 0.5 / std::pow(side, cfg.dim), 1.0);
      if (out.parts.size() != 1) throw NumericalError("nk-bound: expected one selected cube");
      auto r = nk_bj_bound_check(out.parts[0], *grid, out.alpha, k, R, 1.0, table, opt);
      csv.cell(R).cell(k).cell(side).cell(r.ratio).cell(r.head_norm).cell(r.tail_majorant).cell(r.restriction_ratio)
          .cell(r.measured_I).cell(r.measured_II).cell(r.measured_III).cell(r.formula_I).cell(r.formula_II_III)
          .cell(r.sum_I).cell(r.sum_II).cell(r.sum_III).end_row();
      s.x.push_back(k);
      s.y.push_back(r.ratio);
      C = std::max(C, r.ratio);
      cases[0] = std::max(cases[0], r.measured_I / r.formula_I);
      cases[1] = std::max(cases[1], r.measured_II / r.formula_II_III);
      cases[2] = std::max(cases[2], r.measured_III / r.formula_II_III);
    }
    plot.push_back(s);
    Cs.push_back(C);
    fitted.push_back(cases);
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("||n_k(sqrt H) b||_2 / (alpha |B|^{1/2} max{2^{k/2}/R, 1})", "k", "ratio", plot);
  a.check("fitted C max/min over R", spread(Cs), "<=", stability);
  static const char* names[] = {"I", "II", "III"};
  for (int c = 0; c < 3; ++c) {
    double worst = 0;
    for (std::size_t i = 1; i < fitted.size(); ++i) worst = std::max(worst, fitted[i][c] / fitted[0][c]);
    a.check(std::string("range ") + names[c] + " constant, other R over first R", worst, "<=", stability);
  }
  return a;
}

// ------------------------------------------------------------ proof-trace
Artifacts proof_trace_cmd(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("proof");
  int cells = sec.get_int("cells", 128);
  double half = sec.get_double("half_width", 8.0);
  int spikes = sec.get_int("spikes", 6);
  double alpha = sec.get_double("alpha", 0.5);
  auto Rs = sec.get_list("R", {4, 8, 16});
  sec.reject_unread();
  if (cfg.dim > 2) throw ConfigError("proof-trace: dim must be 1 or 2");
  if (!(alpha > 0) || spikes < 0) throw ConfigError("[proof] invalid parameters");
  Artifacts a;
  a.anchor = "weak-type argument: |{|S_R f| > alpha}| split over the good part, the small and large balls and the "
             "exceptional set";
  a.parameters = {{"cells", std::to_string(cells)}, {"alpha", fmt(alpha)}, {"R", join(Rs)}};

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0, 1);
  auto grid = std::make_shared<const TensorGrid>(uniform_grid(cfg.dim, -half, half, cells));
  // broad bump of height 1 plus signed single-cell spikes
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto x = grid->point(i);
    double r2 = 0;
    for (double t : x) r2 += t * t;
    v[i] = std::exp(-r2 / 4);
  }
  for (int s = 0; s < spikes; ++s) v[static_cast<std::size_t>(U(rng) * v.size())] += 20 * (U(rng) - 0.5);
  GridFunction f(grid, v);

  int n = cfg.dim;
  double omega_bound = std::pow(4.0, n) * unit_ball_volume(n) * std::pow(std::sqrt(double(n)) / 2, n);
  io::CsvWriter csv("proof-trace", {"R", "parts", "parts_small", "parts_large", "const_g", "const_h1", "const_h2",
                                    "const_omega", "total", "g_chebyshev_ratio"});
  std::vector<double> totals;
  double cheb = 0, omega = 0;
  for (double R : Rs) {
    auto r = proof_trace(f, alpha, R, cfg.p);
    for (const auto& s : r.warnings) a.warnings.push_back("R=" + fmt(R) + ": " + s);
    csv.cell(R).cell(r.parts).cell(r.parts_small).cell(r.parts_large).cell(r.const_g).cell(r.const_h1)
        .cell(r.const_h2).cell(r.const_omega).cell(r.total_constant()).cell(r.g_chebyshev_ratio).end_row();
    totals.push_back(r.total_constant());
    cheb = std::max(cheb, r.g_chebyshev_ratio);
    omega = std::max(omega, r.const_omega);
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("level-set constants against R", "R", "constant", {{"total", Rs, totals}});
  a.check("good part level set / Chebyshev bound", cheb, "<=", 1.0 + 1e-9);
  a.check("exceptional set / (4^n omega_n (sqrt(n)/2)^n budget)", omega / omega_bound, "<=", 1.25);
  a.check("total constant max/min over R", spread(totals), "<=", 4.0);
  return a;
}

// ------------------------------------------------------------ weaktype-sweep
Artifacts weaktype(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("weaktype");
  // every shell with 2k + n < R^2 must be present
  double top = cfg.R.back() * cfg.R.back();
  int live = std::max(0, static_cast<int>(std::ceil((top - cfg.dim) / 2)) - 1);
  int K = sec.get_int("K", std::max(cfg.K, live));
  int nodes = sec.get_int("nodes", K + 40);
  double max_spread = sec.get_double("max_spread", 2.0);
  sec.reject_unread();
  if (K < 1) throw ConfigError("[weaktype] K: must be >= 1");
  if (nodes < K + 1) throw ConfigError("[weaktype] nodes: need at least K+1");
  double delta = cfg.delta_value();
  Artifacts a;
  a.anchor = "weak-type (p,p) bound for S_R^{delta(p)}(H), uniform in R";
  a.parameters = {{"K", std::to_string(K)}, {"nodes", std::to_string(nodes)}, {"delta", fmt(delta)}};

  auto grid = std::make_shared<const TensorGrid>(gauss_hermite_grid(cfg.dim, nodes));
  auto family = standard_test_family(cfg.dim, K, cfg.seed);
  auto res = weak_type_sweep(cfg.dim, cfg.p, cfg.R, family, delta, grid);
  io::CsvWriter csv("weaktype-sweep", {"member", "R", "ratio"});
  for (std::size_t i = 0; i < res.member_names.size(); ++i)
    for (std::size_t j = 0; j < cfg.R.size(); ++j)
      csv.cell(res.member_names[i]).cell(cfg.R[j]).cell(res.member_ratios[i][j]).end_row();
  for (std::size_t j = 0; j < cfg.R.size(); ++j) csv.cell("family-max").cell(cfg.R[j]).cell(res.sweep.values[j]).end_row();
  a.csv = csv.str();
  a.svg = io::svg_loglog("||S_R f||_{p,inf} / ||f||_p, family max", "R", "ratio", {{"family max", cfg.R, res.sweep.values}});
  a.check("log-log slope", res.slope, "<=", kUniformitySlope);
  a.check("family max max/min over R", res.max_over_min, "<=", max_spread);
  return a;
}

// ------------------------------------------------------------ converge
Artifacts converge(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("converge");
  int band = sec.get_int("band", 12);
  double rmin = sec.get_double("R_min", 2), rmax = sec.get_double("R_max", 40);
  int steps = sec.get_int("steps", 15);
  sec.reject_unread();
  if (band < 0 || !(rmin > 0) || !(rmax > rmin) || steps < 2) throw ConfigError("[converge] invalid parameters");
  double delta = cfg.delta_value();
  Artifacts a;
  a.anchor = "S_R^delta(H) f -> f in measure as R -> infinity";
  a.parameters = {{"band", std::to_string(band)}, {"delta", fmt(delta)}};

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> N01;
  auto c = CoeffRep::zeros(cfg.dim, band);
  for (auto& sh : c.shells)
    for (double& v : sh) v = N01(rng);
  auto grid = std::make_shared<const TensorGrid>(gauss_hermite_grid(cfg.dim, band + 52));
  std::vector<double> Rs;
  for (int i = 0; i < steps; ++i) Rs.push_back(rmin * std::pow(rmax / rmin, double(i) / (steps - 1)));
  auto res = convergence_sweep(c, cfg.p, delta, Rs, grid);
  io::CsvWriter csv("converge", {"R", "error_grid", "error_coefficients"});
  double worst = 0;
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    csv.cell(Rs[i]).cell(res.sweep.values[i]).cell(res.coefficient_route[i]).end_row();
    double ref = res.coefficient_route[i];
    if (ref > 0) worst = std::max(worst, std::abs(res.sweep.values[i] - ref) / ref);
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("||S_R f - f||_{p,inf}", "R", "error",
                         {{"grid difference", Rs, res.sweep.values}, {"coefficient route", Rs, res.coefficient_route}});
  a.check("relative mismatch of the two routes", worst, "<=", 1e-8);
  a.check("monotone past the top eigenvalue", res.decreasing_past_top ? 1.0 : 0.0, "==", 1.0);
  return a;
}

// ------------------------------------------------------------ potential
std::string sanitize(std::string s)
{
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
  return s;
}

Artifacts potential(RunContext& ctx)
{
  auto& cfg = ctx.cfg;
  auto& sec = cfg.section("potential");
  int dim = sec.get_int("dim", std::min(cfg.dim, 2));
  std::string which = sec.get_string("potential", "harmonic");
  std::string scheme_s = sec.get_string("scheme", "sine-dvr");
  double A = sec.get_double("A", dim == 1 ? 12.0 : 9.0);
  double h = sec.get_double("h", dim == 1 ? 0.05 : 0.3);
  int count = sec.get_int("count", dim == 1 ? 20 : 66);
  bool order_check = sec.get_bool("order_check", true);
  int samples = sec.get_int("samples", 41);
  double eps = sec.get_double("epsilon", 0.05);
  sec.reject_unread();
  if (dim != 1 && dim != 2) throw ConfigError("[potential] dim: must be 1 or 2");
  PotentialSpec V = which == "harmonic"    ? harmonic_potential()
                    : which == "perturbed" ? perturbed_harmonic_potential(eps)
                    : which == "linear"    ? linear_potential()
                                           : throw ConfigError("[potential] potential: harmonic, perturbed or linear");
  LaplacianScheme scheme = scheme_s == "sine-dvr"       ? LaplacianScheme::SineDVR
                           : scheme_s == "second-order" ? LaplacianScheme::SecondOrder
                                                        : throw ConfigError("[potential] scheme: sine-dvr or second-order");
  Artifacts a;
  a.anchor = "H_V = -Delta + V with V ~ |x|^2: spectral resolution and ||E[lambda^2, lambda^2+1)||_{1->2} <= C "
             "(1+lambda)^{n(1/p-1/2)-1}";
  a.parameters = {{"dim", std::to_string(dim)}, {"potential", V.name}, {"scheme", to_string(scheme)},
                  {"A", fmt(A)}, {"h", fmt(h)}, {"count", std::to_string(count)}};

  auto vr = validate_potential(V, dim, A, samples);
  for (const auto& f : vr.failures) a.warnings.push_back("potential bounds: " + f);
  a.check("declared potential bounds hold", vr.passed() ? 1.0 : 0.0, "==", 1.0);

  std::string path = (fs::path(cfg.cache) / sanitize("eig-" + V.name + "-" + to_string(scheme) + "-n" +
                                                     std::to_string(dim) + "-A" + fmt(A) + "-h" + fmt(h) + "-c" +
                                                     std::to_string(count) + ".hve"))
                         .string();
  EigenDecomp d;
  if (fs::exists(path)) {
    d = load_eigendecomp(path);
    if (d.dim != dim || std::abs(d.h - h) > 1e-15 || std::abs(d.A - A) > 1e-9)
      throw ConfigError(path + ": cached eigenpairs do not match the configuration");
    note(ctx, "potential: reused " + path);
  } else {
    auto op = build_operator(V, dim, A, h, scheme);
    d = eigensolve(op, count);
    for (const auto& s : d.warnings) a.warnings.push_back(s);
    save_eigendecomp(path, d);
    note(ctx, "potential: wrote " + path);
  }

  io::CsvWriter csv("potential", {"table", "index", "value", "reference", "error"});
  io::PlotSeries ev{"eigenvalue", {}, {}};
  double eig_err = 0;
  std::vector<double> exact;
  for (int k = 0; static_cast<int>(exact.size()) < d.count(); ++k)
    for (int m = 0; m < (dim == 1 ? 1 : k + 1); ++m) exact.push_back(2.0 * k + dim);
  for (int j = 0; j < d.count(); ++j) {
    double ref = which == "harmonic" ? exact[j] : NAN;
    double err = std::abs(d.eigenvalues(j) - ref);
    if (which == "harmonic") eig_err = std::max(eig_err, err);
    csv.cell("eigenvalue").cell(j).cell(d.eigenvalues(j)).cell(ref).cell(err).end_row();
    ev.x.push_back(j + 1);
    ev.y.push_back(d.eigenvalues(j));
  }
  std::vector<io::PlotSeries> plot = {ev};
  if (which == "harmonic") a.check("max eigenvalue error against 2k+n", eig_err, "<=", 1e-3);

  if (dim == 2 && d.count() > 0) {
    std::vector<double> lambdas;
    for (int k = 0; 2.0 * k + 2.5 < d.eigenvalues(d.count() - 1); ++k) lambdas.push_back(std::sqrt(2.0 * k + 1.5));
    auto sweep = band_projector_sweep(d, lambdas);
    Eigen::MatrixXd pts(d.size(), 2);
    auto ax = d.axis();
    for (int i = 0; i < d.m; ++i)
      for (int j = 0; j < d.m; ++j) {
        pts(i * d.m + j, 0) = ax[i];
        pts(i * d.m + j, 1) = ax[j];
      }
    double band_err = 0;
    for (std::size_t i = 0; i < sweep.axis.size(); ++i) {
      double ref = NAN;
      if (which == "harmonic") {
        int k = static_cast<int>(std::lround((sweep.axis[i] * sweep.axis[i] - 1.5) / 2));
        auto diag = projection_kernel_diag(k, pts);
        ref = std::sqrt(*std::max_element(diag.begin(), diag.end()));
        band_err = std::max(band_err, std::abs(sweep.values[i] - ref));
      }
      csv.cell("band").cell(sweep.axis[i]).cell(sweep.values[i]).cell(ref).cell(std::abs(sweep.values[i] - ref)).end_row();
    }
    plot.push_back({"band constant", sweep.axis, sweep.values});
    if (which == "harmonic") a.check("band constant error against the Hermite kernel", band_err, "<=", 1e-2);
    if (!sweep.ratios.empty()) a.check("band ratio max/min", sweep.ratio_spread(), "<=", 3.0);
  }

  // f = phi_0 is an eigenvector of the means
  if (d.count() > 0) {
    double R = std::sqrt(0.5 * d.ceiling);
    std::vector<double> phi0(d.vectors.col(0).data(), d.vectors.col(0).data() + d.size());
    auto out = br_means_V(d, phi0, R, cfg.delta_value());
    double m0 = std::pow(std::max(0.0, 1 - d.eigenvalues(0) / (R * R)), cfg.delta_value());
    double e = 0;
    for (std::size_t i = 0; i < phi0.size(); ++i) e = std::max(e, std::abs(out[i] - m0 * phi0[i]));
    a.check("S_R(H_V) phi_0 = (1 - lambda_0/R^2)^delta phi_0", e, "<=", 1e-10);
  }

  if (order_check) {
    double Ao = 8, ho = 0.2;
    auto orders = eigenvalue_convergence_order(V, 1, Ao, ho, 5, LaplacianScheme::SecondOrder);
    double worst = *std::min_element(orders.begin(), orders.end());
    for (std::size_t j = 0; j < orders.size(); ++j)
      csv.cell("fd_order").cell(j).cell(orders[j]).cell(2.0).cell(std::abs(orders[j] - 2)).end_row();
    a.check("observed order of the second-order scheme", worst, ">=", 1.8);
  }
  a.csv = csv.str();
  a.svg = io::svg_loglog("discrete spectrum of H_V", "index", "value", plot);
  return a;
}

void write_outputs(const std::string& name, const Artifacts& a, RunContext& ctx)
{
  fs::path dir(ctx.cfg.out);
  nlohmann::json j;
  j["format"] = "hermite-riesz v1";
  j["subcommand"] = name;
  j["anchor"] = a.anchor;
  j["pass"] = a.passed();
  j["seed"] = ctx.cfg.seed;
  j["config"] = {{"dim", ctx.cfg.dim},
                 {"p", ctx.cfg.p},
                 {"delta", ctx.cfg.delta_value()},
                 {"K", ctx.cfg.K},
                 {"R", ctx.cfg.R}};
  j["parameters"] = a.parameters;
  j["warnings"] = a.warnings;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : a.checks)
    checks.push_back({{"name", c.name},
                      {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(fmt(c.value))},
                      {"relation", c.relation},
                      {"threshold", c.threshold},
                      {"pass", c.pass}});
  j["checks"] = checks;
  j["artifacts"] = {name + ".csv", name + ".svg"};

  std::vector<std::pair<fs::path, std::string>> files = {
      {dir / (name + ".csv"), a.csv}, {dir / (name + ".svg"), a.svg}, {dir / (name + ".json"), j.dump(2) + "\n"}};
  std::vector<fs::path> written;
  try {
    for (const auto& [path, bytes] : files) {
      io::atomic_write(path.string(), bytes);
      written.push_back(path);
    }
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
}

}  // namespace

const std::map<std::string, Command>& commands()
{
  static const std::map<std::string, Command> m = {
      {"basis-build", basis_build}, {"restriction-sweep", restriction_sweep}, {"apriori", apriori},
      {"decomp-audit", decomp_audit}, {"fs-check", fs_check},                 {"cz-audit", cz_audit},
      {"nk-bound", nk_bound},       {"proof-trace", proof_trace_cmd},       {"weaktype-sweep", weaktype},
      {"converge", converge},       {"potential", potential},
  };
  return m;
}

int run_subcommand(const std::string& name, RunContext& ctx)
{
  auto it = commands().find(name);
  if (it == commands().end()) throw ConfigError("unknown subcommand '" + name + "'");
  // stale outputs from an earlier run must not survive a failure
  for (const char* ext : {".csv", ".svg", ".json"}) {
    std::error_code ec;
    fs::remove(fs::path(ctx.cfg.out) / (name + ext), ec);
  }
  auto a = it->second(ctx);
  write_outputs(name, a, ctx);
  if (!ctx.quiet) {
    for (const auto& c : a.checks)
      std::printf("%s  %s: %s %s %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(), fmt(c.value).c_str(),
                  c.relation.c_str(), fmt(c.threshold).c_str());
    for (const auto& w : a.warnings) std::printf("warning: %s\n", w.c_str());
  }
  return a.passed() ? 0 : 1;
}

}  // namespace hermite_riesz::cli

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "hermite_riesz/error.hpp"
#include "hermite_riesz/output.hpp"

using namespace hermite_riesz;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
  {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& f) const { return (path / f).string(); }
};

cli::ExperimentConfig parse(const TempDir& t, const std::string& text)
{
  io::atomic_write(t.file("c.ini"), text);
  return cli::load_config(t.file("c.ini"));
}

}  // namespace

TEST_CASE("doubles round-trip through their text form")
{
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20000; ++i) {
    std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, 8);
    if (!std::isfinite(v)) continue;
    auto s = io::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(-2.0) == "-2");
  CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("CSV layout")
{
  io::CsvWriter w("demo", {"a", "b", "name"});
  w.cell(1).cell(0.5).cell("plain").end_row();
  w.cell(2).cell(1e-300).cell("x,y \"q\"").end_row();
  CHECK(w.str() == "# hermite-riesz v1 demo\na,b,name\n1,0.5,plain\n2,1e-300,\"x,y \"\"q\"\"\"\n");
  io::CsvWriter bad("demo", {"a"});
  bad.cell(1);
  CHECK_THROWS_AS(bad.cell(2), Error);
  io::CsvWriter shortrow("demo", {"a", "b"});
  shortrow.cell(1);
  CHECK_THROWS_AS(shortrow.end_row(), Error);
}

TEST_CASE("atomic writes leave no temporaries")
{
  TempDir t("hr_test_atomic");
  io::atomic_write(t.file("x.txt"), "one");
  io::atomic_write(t.file("x.txt"), "two");
  CHECK(io::read_file(t.file("x.txt")) == "two");
  int entries = 0;
  for (auto& e : fs::directory_iterator(t.path)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
  CHECK_THROWS_AS(io::read_file(t.file("missing")), ConfigError);
}

TEST_CASE("binary reader rejects damaged input")
{
  io::BinaryWriter w;
  w.magic("TEST");
  w.u32(7);
  w.f64(2.5);
  io::BinaryReader r(w.bytes(), "t");
  r.expect_magic("TEST");
  CHECK(r.u32() == 7);
  CHECK(r.f64() == 2.5);
  CHECK(r.at_end());
  CHECK_THROWS_AS(r.u32(), ConfigError);
  io::BinaryReader m(w.bytes(), "t");
  CHECK_THROWS_AS(m.expect_magic("NOPE"), ConfigError);
}

TEST_CASE("SVG plots")
{
  auto svg = io::svg_loglog("t<1>", "x", "y", {{"s", {1, 10, 100}, {1, 0.1, 0.01}}, {"z", {1, 2}, {0, -1}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("t&lt;1&gt;") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(io::svg_loglog("empty", "x", "y", {}).find("</svg>") != std::string::npos);
}

TEST_CASE("configuration parsing")
{
  TempDir t("hr_test_config");
  auto cfg = parse(t, "[experiment]\ndim = 3\np = 1.2\nK = 12\nR = 2, 3.5, 9\nseed = 18446744073709551615\n");
  CHECK(cfg.dim == 3);
  CHECK(cfg.p == 1.2);
  CHECK(cfg.K == 12);
  CHECK(cfg.R == std::vector<double>{2, 3.5, 9});
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK(cfg.delta_value() == doctest::Approx(3 * (1 / 1.2 - 0.5) - 0.5));

  auto d = parse(t, "[experiment]\ndelta = 0.75\n");
  CHECK(d.delta_value() == 0.75);
  CHECK(d.R == std::vector<double>{4, 8, 16, 32});

  auto s = parse(t, "[restriction]\nk_min = 3\n");
  CHECK(s.section("restriction").get_int("k_min", 0) == 3);
  CHECK(s.section("cz").get_int("cells", 5) == 5);

  CHECK_THROWS_AS(parse(t, "[experiment]\nR =\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\nR = 4, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\nR = 4, -8\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\ndim = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\np = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\nK = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\nK = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[nonsense]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "stray = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse(t, "[experiment]\nseed = -1\n"), ConfigError);

  auto u = parse(t, "[fs]\nM = 4\ntypo = 1\n");
  auto& sec = u.section("fs");
  CHECK(sec.get_int("M", 0) == 4);
  CHECK_THROWS_AS(sec.reject_unread(), ConfigError);
}

TEST_CASE("subcommands write CSV, SVG and a JSON summary")
{
  TempDir t("hr_test_run");
  cli::RunContext ctx;
  ctx.cfg = parse(t, "[experiment]\ndim = 2\nK = 20\n[restriction]\nk_min = 10\nk_max = 40\n");
  ctx.cfg.out = t.file("out");
  ctx.cfg.cache = t.file("cache");
  ctx.quiet = true;
  fs::create_directories(ctx.cfg.out);
  fs::create_directories(ctx.cfg.cache);
  CHECK(cli::run_subcommand("restriction-sweep", ctx) == 0);
  auto csv = io::read_file(t.file("out/restriction-sweep.csv"));
  CHECK(csv.rfind("# hermite-riesz v1 restriction-sweep\n", 0) == 0);
  auto j = nlohmann::json::parse(io::read_file(t.file("out/restriction-sweep.json")));
  CHECK(j["pass"] == true);
  CHECK(j["subcommand"] == "restriction-sweep");
  CHECK_FALSE(j["anchor"].get<std::string>().empty());
  CHECK(fs::exists(t.file("out/restriction-sweep.svg")));

  // same config, same bytes
  CHECK(cli::run_subcommand("restriction-sweep", ctx) == 0);
  CHECK(io::read_file(t.file("out/restriction-sweep.csv")) == csv);

  // every subcommand declares an anchor; cheap ones run here
  for (const auto& [name, cmd] : cli::commands()) CHECK(cli::subcommand_sections().count(name) == 1);
  CHECK(cli::run_subcommand("basis-build", ctx) == 0);
  CHECK(cli::run_subcommand("basis-build", ctx) == 0);

  CHECK_THROWS_AS(cli::run_subcommand("no-such-thing", ctx), ConfigError);
}

TEST_CASE("a failing configuration removes stale outputs")
{
  TempDir t("hr_test_stale");
  cli::RunContext ctx;
  ctx.cfg = parse(t, "[experiment]\nK = 10\n[converge]\nband = 4\n");
  ctx.cfg.out = t.file("out");
  ctx.cfg.cache = t.file("cache");
  ctx.quiet = true;
  fs::create_directories(ctx.cfg.out);
  fs::create_directories(ctx.cfg.cache);
  CHECK(cli::run_subcommand("converge", ctx) == 0);
  CHECK(fs::exists(t.file("out/converge.csv")));
  ctx.cfg = parse(t, "[experiment]\nK = 10\n[converge]\nband = 4\nsteps = 1\n");
  ctx.cfg.out = t.file("out");
  ctx.cfg.cache = t.file("cache");
  CHECK_THROWS_AS(cli::run_subcommand("converge", ctx), ConfigError);
  CHECK_FALSE(fs::exists(t.file("out/converge.csv")));
  CHECK_FALSE(fs::exists(t.file("out/converge.json")));
}

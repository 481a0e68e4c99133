#include <doctest.h>

#include <sys/wait.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rvlbm/config.hpp"
#include "rvlbm/experiments.hpp"

using namespace rvlbm;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_of(const TableResult& t) {
  std::ostringstream out;
  t.write_csv(out);
  return out.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rvlbm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(RVLBM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("key value parsing") {
    std::istringstream in(
        "# comment\n"
        "family = B\n"
        "  alpha=0.5   # trailing\n"
        "\n"
        "experiment.meshes = 32, 64,128\n"
        "family = A\n");
    const auto cfg = KeyValueConfig::parse(in);
    CHECK(cfg.get_string("family", "") == "A");
    CHECK(cfg.get_double("alpha", 0) == 0.5);
    CHECK(cfg.get_double("missing", 7.0) == 7.0);
    CHECK(cfg.get_doubles("experiment.meshes", {}) == std::vector<double>{32, 64, 128});
    CHECK(cfg.get_strings("experiment.meshes", {}).size() == 3);
    CHECK(cfg.has("alpha"));
    CHECK_FALSE(cfg.find("nope").has_value());
  }

  TEST_CASE("malformed input") {
    std::istringstream no_eq("family A\n");
    CHECK_THROWS_AS(KeyValueConfig::parse(no_eq), ConfigError);
    std::istringstream empty_key(" = 3\n");
    CHECK_THROWS_AS(KeyValueConfig::parse(empty_key), ConfigError);
    std::istringstream bad_num("alpha = zero\n");
    const auto cfg = KeyValueConfig::parse(bad_num);
    CHECK_THROWS_AS(cfg.get_double("alpha", 0), ConfigError);
    CHECK_THROWS_AS(cfg.get_long("alpha", 0), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/rvlbm.cfg"), ConfigError);
    CHECK_THROWS_AS(parse_double("1.5x", "v"), ConfigError);
    CHECK(parse_double(" 2.5e-1 ", "v") == 0.25);
    CHECK(split_list("a, b,,c") == std::vector<std::string>{"a", "b", "", "c"});
    std::istringstream gap("meshes = 16,,32\n");
    CHECK_THROWS_AS(KeyValueConfig::parse(gap).get_doubles("meshes", {}), ConfigError);
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("csv layout and sentinels") {
    TableResult t;
    t.title = "demo";
    t.corner = "row";
    t.row_labels = {"r0", "r1"};
    t.col_labels = {"c0", "c1"};
    t.cells = {{TableCell::of(0.42), TableCell::unbounded()}, {TableCell::nan(), TableCell::of(-1)}};
    t.metadata = {{"family", "A"}, {"alpha", "0"}};
    t.runtime_seconds = 3.5;
    const std::string text = csv_of(t);
    CHECK(text.find("# title: demo\n") == 0);
    CHECK(text.find("# family: A\n") != std::string::npos);
    CHECK(text.find("# config_hash: " + t.config_hash() + "\n") != std::string::npos);
    CHECK(text.find("row,c0,c1\nr0,0.42,unbounded\nr1,nan,-1\n") != std::string::npos);
    CHECK(text.find("runtime") == std::string::npos);
    std::ostringstream with;
    t.write_csv(with, true);
    CHECK(with.str().find("# runtime_seconds:") != std::string::npos);

    TableResult u = t;
    u.metadata[1].second = "1";
    CHECK(u.config_hash() != t.config_hash());
    CHECK(t.config_hash().size() == 16);
  }

  TEST_CASE("table rates") {
    CHECK(table_rates(RelaxationType::Trt1, 1, 7) == trt1(1.5, 2.0 - 1.0 / 128));
    CHECK(table_rates(RelaxationType::Trt2, 0, 3) == trt2(1.0, 1.875));
    CHECK(table_rates(RelaxationType::Bgk, 2, 2) == RelaxationVector::bgk(1.75));
  }

  TEST_CASE("parallel_for covers every index once") {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    parallel_for(0, 3, [&](std::size_t) { FAIL("no work expected"); });
    CHECK(default_threads() >= 1);
  }

  TEST_CASE("linear table corner cells and reproducibility") {
    LinearTableSpec spec;
    const auto a = linear_table({0, 7}, {0}, spec, 1);
    REQUIRE(a.cells.size() == 1);
    REQUIRE(a.cells[0].size() == 2);
    CHECK(a.at(0, 0).value == doctest::Approx(0.42));
    CHECK(std::abs(a.at(0, 1).value - 0.08) <= 0.01 + 1e-12);
    CHECK(a.corner == "n\\m");
    CHECK(a.row_labels == std::vector<std::string>{"0"});
    CHECK(a.col_labels == std::vector<std::string>{"0", "7"});
    const auto b = linear_table({0, 7}, {0}, spec, 2);
    CHECK(csv_of(a) == csv_of(b));
    const std::string text = csv_of(a);
    for (const char* key : {"# family: A", "# alpha: 0", "# equilibrium: truncated2", "# relaxation.type: trt1",
                            "# utilde.policy: zero", "# kgrid: 64", "# tol: 0.01", "# version: rvlbm 1.0.0"}) {
      CHECK_MESSAGE(text.find(key) != std::string::npos, key);
    }

    spec.shift = LinearShift::EqualsV;
    spec.kind = EquilibriumKind::Product4;
    CHECK(std::abs(linear_table({7}, {0}, spec, 1).at(0, 0).value - 0.23) <= 0.01 + 1e-12);
  }

  TEST_CASE("failing cells become nan") {
    LinearTableSpec spec;
    spec.scan.kgrid_n = 2;  // rejected by the wavevector scan
    const auto t = linear_table({0}, {0}, spec, 1);
    CHECK(t.at(0, 0).kind == TableCell::Kind::Nan);
  }

  TEST_CASE("alpha sweep shape") {
    const std::vector<AlphaCurve> curves{{7, 7, RelaxationType::Trt1, LinearShift::EqualsV, Family::B},
                                         {0, 3, RelaxationType::Trt1, LinearShift::EqualsV, Family::A}};
    const auto t = alpha_sweep({-1.0, 0.0, 1.0}, curves, {}, 1);
    REQUIRE(t.cells.size() == 3);
    CHECK(t.col_labels.size() == 2);
    CHECK(t.corner == "alpha");
    CHECK(t.at(0, 0).value == doctest::Approx(t.at(1, 0).value));
    CHECK(t.at(2, 0).value == doctest::Approx(t.at(1, 0).value));
    CHECK(t.at(1, 1).value >= t.at(0, 1).value);
    CHECK(t.at(1, 1).value >= t.at(2, 1).value);
  }

  TEST_CASE("Kelvin-Helmholtz helpers") {
    CHECK(shear_speed(0.09, 1.0) == doctest::Approx(0.09 / std::sqrt(3.0)));
    CHECK(lambda_for_unit_shear(0.04) == doctest::Approx(25.0 * std::sqrt(3.0)));
    CHECK(shear_speed(0.04, lambda_for_unit_shear(0.04)) == doctest::Approx(1.0));
    const auto variants = default_kh_variants();
    CHECK(variants.size() == 6);

    KhSettings s;
    const auto header = rate_header({16, 32, 64, 128}, s);
    CHECK(header.at(0, 0).value == doctest::Approx(0.44).epsilon(0.01));
    CHECK(std::round(header.at(1, 0).value * 100) / 100 == doctest::Approx(1.98));
    CHECK(std::round(header.at(1, 3).value * 100) / 100 == doctest::Approx(1.86));

    const auto cfg = kh_scheme(variants[0], 32, s.mu, s.nu, s);
    CHECK(cfg.grid.nx == 32);
    CHECK(cfg.s[3] == doctest::Approx(viscosity_to_rate(s.mu, 1.0, 1.0 / 32)));
    CHECK(cfg.s[4] == doctest::Approx(viscosity_to_rate(s.nu, 1.0, 1.0 / 32)));
  }

  TEST_CASE("Mach search modes agree on a small mesh") {
    KhSettings s;
    s.iterations = 200;
    s.ma_cap = 0.6;
    const auto v = default_kh_variants()[0];
    s.search = SearchMode::Scan;
    const double scan = kh_max_mach(v, 16, s);
    s.search = SearchMode::Bisect;
    const double bisect = kh_max_mach(v, 16, s);
    CHECK(scan > 0.0);
    CHECK(scan == doctest::Approx(bisect));
    CHECK(kh_probe(v, 16, scan, s.nu, s));
  }

  TEST_CASE("vorticity run dumps") {
    const auto dir = scratch("vort");
    KhSettings s;
    s.lambda = lambda_for_unit_shear(0.04);
    const auto v = default_kh_variants()[0];
    const double dt = 1.0 / (16 * s.lambda);
    const auto run = kh_vorticity_run(0.04, 16, v, s, {0.0, 5 * dt}, (dir / "kh").string());
    CHECK(run.outcome.stable());
    REQUIRE(run.files.size() == 2);
    CHECK(std::filesystem::path(run.files[0]).filename() == "kh_t0.csv");
    CHECK(std::filesystem::path(run.files[1]).filename() == "kh_t5.csv");
    std::ifstream in(run.files[1]);
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 256);
    std::filesystem::remove_all(dir);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("stability table and exit codes") {
    const auto dir = scratch("cli");
    CHECK(run_cli("--threads 1 stability table --m 0 --n 0 --out " + (dir / "t.csv").string(), dir / "log") == 0);
    const std::string csv = slurp(dir / "t.csv");
    CHECK(csv.find("n\\m,0\n0,0.42\n") != std::string::npos);

    // Flags and config file agree; flags win.
    {
      std::ofstream cfg(dir / "c.cfg");
      cfg << "# table config\nfamily = A\nalpha = 1\nexperiment.m = 0\nexperiment.n = 0\n";
    }
    CHECK(run_cli("--config " + (dir / "c.cfg").string() + " --out " + (dir / "c.csv").string() + " stability table",
                  dir / "log") == 0);
    CHECK(slurp(dir / "c.csv").find("# alpha: 1\n") != std::string::npos);
    CHECK(run_cli("--config " + (dir / "c.cfg").string() + " --out " + (dir / "d.csv").string() +
                      " stability table --alpha 0",
                  dir / "log") == 0);
    CHECK(slurp(dir / "d.csv").find("# alpha: 0\n") != std::string::npos);

    CHECK(run_cli("stability table --family Z", dir / "log") == 1);
    CHECK(run_cli("stability table --m 0 --n 0 --equilibrium cubic", dir / "log") == 1);
    CHECK(run_cli("--config /nonexistent.cfg stability table", dir / "log") == 1);
    CHECK(run_cli("stability nothing", dir / "log") == 1);
    CHECK(run_cli("kh vorticity --n 16 --mach 1.5 --lambda 1 --times 0,2 --utilde zero --out " + (dir / "b").string(),
                  dir / "log") == 2);
    CHECK(std::filesystem::exists(dir / "b_t0.csv"));
    CHECK(run_cli("--help", dir / "log") == 0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("serial reruns are byte-identical") {
    const auto dir = scratch("rerun");
    const std::string args = "--threads 1 stability alpha-sweep --alphas=-1,0,1 --pairs 7:7 --utilde V --out ";
    REQUIRE(run_cli(args + (dir / "a.csv").string(), dir / "log") == 0);
    REQUIRE(run_cli(args + (dir / "b.csv").string(), dir / "log") == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK_FALSE(slurp(dir / "a.csv").empty());
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("kh subcommands") {
    const auto dir = scratch("khcli");
    CHECK(run_cli("--threads 1 kh scan-ma --meshes 16 --iterations 50 --out " + (dir / "ma.csv").string(),
                  dir / "log") == 0);
    const std::string ma = slurp(dir / "ma.csv");
    CHECK(ma.find("# meshes: 16") != std::string::npos);
    CHECK(run_cli("--threads 1 kh scan-re --meshes 16 --iterations 20 --out " + (dir / "re.csv").string(),
                  dir / "log") == 0);
    CHECK(run_cli("--threads 1 kh scan-utilde --n 16 --scales 0,1 --iterations 20 --out " +
                      (dir / "ut.csv").string(),
                  dir / "log") == 0);
    CHECK(run_cli("kh vorticity --n 16 --times 0 --out " + (dir / "v").string(), dir / "log") == 0);
    CHECK(std::filesystem::exists(dir / "v_t0.csv"));
    CHECK(run_cli("kh vorticity --n 16 --times=-1 --out " + (dir / "w").string(), dir / "log") == 1);
    std::filesystem::remove_all(dir);
  }
}

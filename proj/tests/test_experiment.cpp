#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "curveflow/experiment.hpp"
#include "curveflow/geometry.hpp"

using namespace curveflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "curveflow-experiment-tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv_rows(const fs::path& path, std::string* header = nullptr) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

TEST_CASE("initial curve matches its closed form") {
    const int n = 50;
    const PolygonalCurve curve = initial_curve(n);
    CHECK(curve.size() == n);
    // parameter t = 1 lands on the last stored vertex
    CHECK(curve.vertex(n - 1).x() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(curve.vertex(n - 1).y() == doctest::Approx(0.54 * std::sin(1.8)).epsilon(1e-12));
    CHECK(length(curve) == doctest::Approx(5.6095300128).epsilon(1e-6));
    CHECK(enclosed_area(curve) == doctest::Approx(1.0659591515).epsilon(1e-6));
    CHECK(is_simple(curve.vertices()));
    CHECK_THROWS_AS(initial_curve(2), std::invalid_argument);
}

TEST_CASE("config entries parse and validate") {
    ExperimentConfig cfg;
    apply_config_entry(cfg, "flow", "heleshaw");
    apply_config_entry(cfg, "scheme", "rk4");
    apply_config_entry(cfg, "N", "33");
    apply_config_entry(cfg, "tau", "0.02");
    apply_config_entry(cfg, "omega-rule", "125");
    apply_config_entry(cfg, "sigma", "2.5");
    apply_config_entry(cfg, "rho", "0.8");
    apply_config_entry(cfg, "tol", "1e-9");
    apply_config_entry(cfg, "t-end", "0.4");
    apply_config_entry(cfg, "dt", "0.001");
    apply_config_entry(cfg, "snapshots", "7");
    apply_config_entry(cfg, "out", "somewhere");
    apply_config_entry(cfg, "svg", "true");
    apply_config_entry(cfg, "seed", "11");
    CHECK(cfg.flow == "heleshaw");
    CHECK(cfg.scheme == "rk4");
    CHECK(cfg.N == 33);
    CHECK(cfg.tau == 0.02);
    CHECK(cfg.sigma == 2.5);
    CHECK(cfg.rho == 0.8);
    CHECK(cfg.tol == 1e-9);
    CHECK(cfg.t_end == 0.4);
    REQUIRE(cfg.dt.has_value());
    CHECK(*cfg.dt == 0.001);
    CHECK(cfg.snapshots == 7);
    CHECK(cfg.out == "somewhere");
    CHECK(cfg.svg);
    CHECK(cfg.seed == 11);

    CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "zap", "1"), "unknown config key: zap", ConfigError);
    CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "tau", "abc"), "invalid value for tau: abc",
                         ConfigError);
}

TEST_CASE("config files parse with comments and blank lines") {
    const fs::path dir = scratch_dir();
    const fs::path file = dir / "good.cfg";
    {
        std::ofstream out(file);
        out << "# full line comment\n";
        out << "flow = apmcf\n";
        out << "\n";
        out << "N = 16   # trailing comment\n";
        out << "t-end = 0.25\n";
    }
    const ExperimentConfig cfg = load_config_file(file.string());
    CHECK(cfg.flow == "apmcf");
    CHECK(cfg.N == 16);
    CHECK(cfg.t_end == 0.25);

    const fs::path bad = dir / "bad.cfg";
    {
        std::ofstream out(bad);
        out << "flow apmcf\n";
    }
    CHECK_THROWS_AS(load_config_file(bad.string()), ConfigError);
    CHECK_THROWS_AS(load_config_file((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("flow and relaxation factories") {
    ExperimentConfig cfg;
    cfg.flow = "mcf";
    CHECK(std::holds_alternative<Mcf>(make_flow(cfg)));
    cfg.flow = "apmcf";
    CHECK(std::holds_alternative<Apmcf>(make_flow(cfg)));
    cfg.flow = "heleshaw";
    cfg.sigma = 3.0;
    cfg.rho = 1.5;
    const FlowModel hs = make_flow(cfg);
    REQUIRE(std::holds_alternative<HeleShaw>(hs));
    CHECK(std::get<HeleShaw>(hs).sigma == 3.0);
    CHECK(std::get<HeleShaw>(hs).placement.rho == 1.5);
    cfg.sigma = -1.0;
    CHECK_THROWS_WITH_AS(make_flow(cfg), "sigma must be positive", ConfigError);
    cfg.flow = "blub";
    CHECK_THROWS_WITH_AS(make_flow(cfg), "unknown flow: blub", ConfigError);

    ExperimentConfig rule;
    rule.omega_rule = "auto";
    CHECK(make_omega(rule)(50, 0.01) == doctest::Approx(10.0 * 50 / 0.01));
    rule.omega_rule = "123.5";
    CHECK(make_omega(rule)(50, 0.01) == 123.5);
    rule.omega_rule = "-2";
    CHECK_THROWS_AS(make_omega(rule), ConfigError);
    rule.omega_rule = "xyz";
    CHECK_THROWS_AS(make_omega(rule), ConfigError);
}

TEST_CASE("invalid configurations are refused with exit code 4") {
    ExperimentConfig cfg;
    cfg.N = 2;
    CHECK(run(cfg) == 4);

    ExperimentConfig noDt;
    noDt.scheme = "rk4";
    CHECK(run(noDt) == 4);

    ExperimentConfig badScheme;
    badScheme.scheme = "leapfrog";
    CHECK(run(badScheme) == 4);

    ExperimentConfig badOut;
    badOut.N = 8;
    badOut.t_end = 0.01;
    badOut.out = "/dev/null/nested";
    CHECK(run(badOut) == 4);
}

TEST_CASE("implicit run writes the full artifact set") {
    const fs::path dir = scratch_dir() / "run-apmcf";
    fs::remove_all(dir);
    ExperimentConfig cfg;
    cfg.flow = "apmcf";
    cfg.N = 12;
    cfg.t_end = 0.03;
    cfg.snapshots = 3;
    cfg.out = dir.string();
    REQUIRE(run(cfg) == 0);

    CHECK(fs::exists(dir / "config.txt"));
    CHECK(fs::exists(dir / "snapshots.csv"));
    for (const char* name : {"snapshot_000.csv", "snapshot_001.csv", "snapshot_002.csv"})
        CHECK(fs::exists(dir / name));
    CHECK_FALSE(fs::exists(dir / "snapshot_003.csv"));
    CHECK_FALSE(fs::exists(dir / "error.json"));

    std::string header;
    const auto rows = read_csv_rows(dir / "series.csv", &header);
    CHECK(header == "t,dt,length,area,newton_iters,residual,uniformity");
    REQUIRE(rows.size() >= 2);
    CHECK(rows.front()[0] == 0.0);
    CHECK(rows.back()[0] == doctest::Approx(0.03).epsilon(1e-9));
    for (size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k][0] > rows[k - 1][0]);
        CHECK(rows[k][2] < rows[k - 1][2]);  // length column decreases
    }

    // resolved config echoes the effective values
    const std::string config = slurp(dir / "config.txt");
    CHECK(config.find("flow = apmcf") != std::string::npos);
    CHECK(config.find("N = 12") != std::string::npos);
    CHECK(config.find("dt = adaptive") != std::string::npos);

    // a snapshot is a bare x,y table with one row per vertex
    std::ifstream snap(dir / "snapshot_000.csv");
    std::string line;
    int count = 0;
    while (std::getline(snap, line))
        if (!line.empty()) ++count;
    CHECK(count == 12);
}

TEST_CASE("runs are deterministic") {
    const fs::path a = scratch_dir() / "det-a";
    const fs::path b = scratch_dir() / "det-b";
    fs::remove_all(a);
    fs::remove_all(b);
    ExperimentConfig cfg;
    cfg.flow = "mcf";
    cfg.N = 10;
    cfg.t_end = 0.02;
    cfg.snapshots = 2;
    cfg.out = a.string();
    REQUIRE(run(cfg) == 0);
    cfg.out = b.string();
    REQUIRE(run(cfg) == 0);
    CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
    CHECK(slurp(a / "snapshot_001.csv") == slurp(b / "snapshot_001.csv"));
}

TEST_CASE("svg artifacts are emitted on request") {
    const fs::path dir = scratch_dir() / "run-svg";
    fs::remove_all(dir);
    ExperimentConfig cfg;
    cfg.flow = "mcf";
    cfg.N = 10;
    cfg.t_end = 0.02;
    cfg.snapshots = 2;
    cfg.svg = true;
    cfg.out = dir.string();
    REQUIRE(run(cfg) == 0);
    for (const char* name : {"curves.svg", "length_area.svg", "timestep.svg"}) {
        CHECK(fs::exists(dir / name));
        CHECK(slurp(dir / name).find("<svg") != std::string::npos);
    }
}

TEST_CASE("explicit reference scheme reports blow-up with exit code 3") {
    const fs::path dir = scratch_dir() / "run-blowup";
    fs::remove_all(dir);
    ExperimentConfig cfg;
    cfg.flow = "mcf";
    cfg.scheme = "rk4";
    cfg.N = 50;
    cfg.dt = 0.01;
    cfg.t_end = 0.1;
    cfg.snapshots = 0;
    cfg.out = dir.string();
    CHECK(run(cfg) == 3);
    CHECK(fs::exists(dir / "blowup.csv"));
    CHECK(fs::exists(dir / "series.csv"));
    const std::string err = slurp(dir / "error.json");
    CHECK(err.find("\"exit\": 3") != std::string::npos);
    CHECK(err.find("explicit blow-up") != std::string::npos);
}

TEST_CASE("rejected implicit steps surface as exit code 2") {
    const fs::path dir = scratch_dir() / "run-rejected";
    fs::remove_all(dir);
    ExperimentConfig cfg;
    cfg.flow = "mcf";
    cfg.N = 12;
    cfg.dt = 10.0;  // uniform override disables retries
    cfg.t_end = 10.0;
    cfg.snapshots = 0;
    cfg.out = dir.string();
    CHECK(run(cfg) == 2);
    const std::string err = slurp(dir / "error.json");
    CHECK(err.find("\"exit\": 2") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "curveflow-cli-tests";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + CURVEFLOW_BIN + " " + args +
                            " > /dev/null 2> /dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double last_series_time(const fs::path& out_dir) {
    std::ifstream in(out_dir / "series.csv");
    REQUIRE(in.good());
    std::string line, last;
    std::getline(in, line);  // header
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    REQUIRE(!last.empty());
    return std::stod(last.substr(0, last.find(',')));
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("bad flags and values exit with the config error code") {
    CHECK(run_cli("--flow blub --t-end 0.01") == 4);
    CHECK(run_cli("--no-such-flag") == 4);
    CHECK(run_cli((scratch_dir() / "missing.cfg").string()) == 4);
}

TEST_CASE("flag-driven run produces the artifact set") {
    const fs::path out = scratch_dir() / "flags-run";
    fs::remove_all(out);
    CHECK(run_cli("--flow apmcf --N 12 --t-end 0.02 --snapshots 3 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "series.csv"));
    CHECK(fs::exists(out / "snapshot_002.csv"));
    CHECK_FALSE(fs::exists(out / "snapshot_003.csv"));
    CHECK(last_series_time(out) == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("flags override config file values") {
    const fs::path dir = scratch_dir();
    const fs::path out = dir / "override-run";
    fs::remove_all(out);
    const fs::path cfg = dir / "override.cfg";
    write_file(cfg, "flow = mcf\nN = 10\nt-end = 0.5\nsnapshots = 2\n");
    CHECK(run_cli(cfg.string() + " --t-end 0.015 --out " + out.string()) == 0);
    CHECK(last_series_time(out) == doctest::Approx(0.015).epsilon(1e-9));
    const std::string resolved = slurp(out / "config.txt");
    CHECK(resolved.find("t-end = 0.014999999999999999") != std::string::npos);
    CHECK(resolved.find("flow = mcf") != std::string::npos);
}

TEST_CASE("uniform step override that cannot converge exits with code 2") {
    const fs::path out = scratch_dir() / "rejected-run";
    fs::remove_all(out);
    CHECK(run_cli("--flow mcf --N 12 --dt 10 --t-end 10 --snapshots 0 --out " + out.string()) == 2);
    CHECK(fs::exists(out / "error.json"));
    CHECK(slurp(out / "error.json").find("\"exit\": 2") != std::string::npos);
}

TEST_CASE("explicit scheme blow-up exits with code 3 and dumps the candidate") {
    const fs::path out = scratch_dir() / "blowup-run";
    fs::remove_all(out);
    CHECK(run_cli("--flow mcf --scheme rk4 --N 50 --dt 0.01 --t-end 0.1 --snapshots 0 --out " +
                  out.string()) == 3);
    CHECK(fs::exists(out / "blowup.csv"));
    CHECK(slurp(out / "error.json").find("\"exit\": 3") != std::string::npos);
}

TEST_CASE("sweep runs every config and keeps outputs disjoint") {
    const fs::path dir = scratch_dir();
    const fs::path out_a = dir / "sweep-a";
    const fs::path out_b = dir / "sweep-b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    const fs::path cfg_a = dir / "sweep-a.cfg";
    const fs::path cfg_b = dir / "sweep-b.cfg";
    write_file(cfg_a, "flow = mcf\nN = 10\nt-end = 0.01\nout = " + out_a.string() + "\n");
    write_file(cfg_b, "flow = apmcf\nN = 10\nt-end = 0.01\nout = " + out_b.string() + "\n");
    const fs::path list = dir / "sweep.txt";
    write_file(list, "# two short runs\n" + cfg_a.string() + "\n" + cfg_b.string() + "\n");

    CHECK(run_cli("--sweep " + list.string() + " --N 8") == 0);
    CHECK(fs::exists(out_a / "series.csv"));
    CHECK(fs::exists(out_b / "series.csv"));
    // the shared flag override reached both runs
    CHECK(slurp(out_a / "config.txt").find("N = 8") != std::string::npos);
    CHECK(slurp(out_b / "config.txt").find("N = 8") != std::string::npos);

    // identical output directories are refused up front
    const fs::path clash = dir / "clash.txt";
    write_file(clash, cfg_a.string() + "\n" + cfg_a.string() + "\n");
    CHECK(run_cli("--sweep " + clash.string()) == 4);

    // sweep and a positional config are mutually exclusive
    CHECK(run_cli(cfg_a.string() + " --sweep " + list.string()) == 4);
}

TEST_CASE("verbose logging leaves the exit code untouched") {
    const fs::path out = scratch_dir() / "log-run";
    fs::remove_all(out);
    CHECK(run_cli("--flow mcf --N 10 --t-end 0.01 --out " + out.string(),
                  "CURVEFLOW_LOG=debug") == 0);
}

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curveflow/experiment.hpp"

namespace {

struct FlagValues {
    std::string flow, scheme, n, tau, omega_rule, sigma, tol, t_end, dt, snapshots, out;
    bool svg = false;
};

// flag overrides applied on top of any config file (flags win)
void apply_flags(const CLI::App& app, const FlagValues& f, curveflow::ExperimentConfig& cfg,
                 bool allow_out) {
    using curveflow::apply_config_entry;
    if (app.count("--flow")) apply_config_entry(cfg, "flow", f.flow);
    if (app.count("--scheme")) apply_config_entry(cfg, "scheme", f.scheme);
    if (app.count("--N")) apply_config_entry(cfg, "N", f.n);
    if (app.count("--tau")) apply_config_entry(cfg, "tau", f.tau);
    if (app.count("--omega-rule")) apply_config_entry(cfg, "omega-rule", f.omega_rule);
    if (app.count("--sigma")) apply_config_entry(cfg, "sigma", f.sigma);
    if (app.count("--tol")) apply_config_entry(cfg, "tol", f.tol);
    if (app.count("--t-end")) apply_config_entry(cfg, "t-end", f.t_end);
    if (app.count("--dt")) apply_config_entry(cfg, "dt", f.dt);
    if (app.count("--snapshots")) apply_config_entry(cfg, "snapshots", f.snapshots);
    if (app.count("--out") && allow_out) apply_config_entry(cfg, "out", f.out);
    if (app.count("--svg")) apply_config_entry(cfg, "svg", "true");
}

int run_sweep(const CLI::App& app, const FlagValues& flags, const std::string& sweep_path) {
    std::ifstream in(sweep_path);
    if (!in) {
        std::fprintf(stderr, "config error: cannot open sweep file: %s\n", sweep_path.c_str());
        return 4;
    }
    std::vector<curveflow::ExperimentConfig> configs;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto a = line.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t\r\n");
        const std::string path = line.substr(a, b - a + 1);
        try {
            curveflow::ExperimentConfig cfg = curveflow::load_config_file(path);
            apply_flags(app, flags, cfg, /*allow_out=*/false);
            configs.push_back(std::move(cfg));
        } catch (const curveflow::ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 4;
        }
    }
    std::set<std::string> outs;
    for (const auto& cfg : configs) {
        const std::string norm = std::filesystem::path(cfg.out).lexically_normal().string();
        if (!outs.insert(norm).second) {
            std::fprintf(stderr, "config error: sweep output directories must be disjoint: %s\n",
                         norm.c_str());
            return 4;
        }
    }
    std::vector<std::future<int>> jobs;
    jobs.reserve(configs.size());
    for (const auto& cfg : configs)
        jobs.push_back(std::async(std::launch::async, [cfg] { return curveflow::run(cfg); }));
    int worst = 0;
    for (auto& job : jobs) worst = std::max(worst, job.get());
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polygonal curve evolution driver"};
    app.get_formatter()->column_width(26);

    std::string config_path, sweep_path;
    FlagValues f;
    app.add_option("config", config_path, "config file with key = value lines");
    app.add_option("--flow", f.flow, "mcf | apmcf | heleshaw");
    app.add_option("--scheme", f.scheme, "implicit | rk4 | midpoint-srk");
    app.add_option("--N", f.n, "number of vertices");
    app.add_option("--tau", f.tau, "time step cap");
    app.add_option("--omega-rule", f.omega_rule, "\"auto\" (10N/dt) or a constant");
    app.add_option("--sigma", f.sigma, "Hele-Shaw surface tension");
    app.add_option("--tol", f.tol, "nonlinear solver tolerance");
    app.add_option("--t-end", f.t_end, "final time");
    app.add_option("--dt", f.dt, "uniform time step override");
    app.add_option("--snapshots", f.snapshots, "number of curve snapshots");
    app.add_option("--out", f.out, "output directory");
    app.add_flag("--svg", f.svg, "emit SVG plots");
    app.add_option("--sweep", sweep_path, "file listing config paths to run in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    if (!sweep_path.empty()) {
        if (!config_path.empty()) {
            std::fprintf(stderr, "config error: --sweep excludes a positional config file\n");
            return 4;
        }
        return run_sweep(app, f, sweep_path);
    }

    curveflow::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = curveflow::load_config_file(config_path);
        apply_flags(app, f, cfg, /*allow_out=*/true);
    } catch (const curveflow::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 4;
    }
    return curveflow::run(cfg);
}

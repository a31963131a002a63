#include "curveflow/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "curveflow/log.hpp"
#include "curveflow/semidiscrete.hpp"
#include "curveflow/svg.hpp"
#include "curveflow/symplectic.hpp"
#include "curveflow/timeseries.hpp"

namespace curveflow {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid value for " + key + ": " + value);
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid value for " + key + ": " + value);
    }
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "flow") {
        cfg.flow = value;
    } else if (key == "scheme") {
        cfg.scheme = value;
    } else if (key == "N") {
        cfg.N = static_cast<int>(parse_long(key, value));
    } else if (key == "tau") {
        cfg.tau = parse_double(key, value);
    } else if (key == "omega-rule") {
        cfg.omega_rule = value;
    } else if (key == "sigma") {
        cfg.sigma = parse_double(key, value);
    } else if (key == "rho") {
        cfg.rho = parse_double(key, value);
    } else if (key == "tol") {
        cfg.tol = parse_double(key, value);
    } else if (key == "t-end") {
        cfg.t_end = parse_double(key, value);
    } else if (key == "dt") {
        cfg.dt = parse_double(key, value);
    } else if (key == "snapshots") {
        cfg.snapshots = static_cast<int>(parse_long(key, value));
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "svg") {
        cfg.svg = (value == "true" || value == "1" || value == "on");
    } else if (key == "seed") {
        cfg.seed = static_cast<unsigned long>(parse_long(key, value));
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

FlowModel make_flow(const ExperimentConfig& cfg) {
    if (cfg.flow == "mcf") return Mcf{};
    if (cfg.flow == "apmcf") return Apmcf{};
    if (cfg.flow == "heleshaw") {
        if (!(cfg.sigma > 0.0)) throw ConfigError("sigma must be positive");
        return HeleShaw{cfg.sigma, SingularPointRule{cfg.rho}};
    }
    throw ConfigError("unknown flow: " + cfg.flow);
}

OmegaRule make_omega(const ExperimentConfig& cfg) {
    if (cfg.omega_rule == "auto") return OmegaRule{true, 0.0};
    OmegaRule rule{false, parse_double("omega-rule", cfg.omega_rule)};
    if (!(rule.constant >= 0.0)) throw ConfigError("omega-rule must be \"auto\" or a constant >= 0");
    return rule;
}

PolygonalCurve initial_curve(int N) {
    if (N < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    constexpr double pi = std::numbers::pi;
    Points X(N, 2);
    for (int i = 1; i <= N; ++i) {
        const double t = static_cast<double>(i) / N;
        const double a1 = 1.8 * std::cos(2.0 * pi * t);
        const double a2 = 0.2 + std::sin(pi * t) * std::sin(6.0 * pi * t) * std::sin(2.0 * a1);
        const double a3 = 0.5 * std::sin(2.0 * pi * t) + std::sin(a1) + a2 * std::sin(2.0 * pi * t);
        X(i - 1, 0) = 0.5 * a1;
        X(i - 1, 1) = 0.54 * a3;
    }
    return PolygonalCurve(X);
}

PolygonalCurve redistribute_uniform(const PolygonalCurve& curve, double omega, double tol_u,
                                    double dt) {
    const EdgeVelocityFn zero_velocity = [](const MidpointFrame& f) {
        return Eigen::VectorXd::Zero(f.size()).eval();
    };
    Points X = curve.vertices();
    const int n = static_cast<int>(X.rows());
    for (int step = 0; step < 2000; ++step) {
        const double L = polygon_length(X);
        const Eigen::VectorXd r = edge_lengths(X);
        const double dev = (r.array() - L / n).abs().maxCoeff();
        if (dev <= tol_u * L) return PolygonalCurve(X);
        double omega_step = std::min(omega, (5e-4 / (dev / L)) / dt);
        bool accepted = false;
        for (int halving = 0; halving < 20; ++halving) {
            try {
                X = newton_step_solve(X, dt, zero_velocity, omega_step).X;
                accepted = true;
                break;
            } catch (const std::exception&) {
                omega_step *= 0.5;
            }
        }
        if (!accepted) throw std::runtime_error("redistribution failed: step rejected");
    }
    throw std::runtime_error("redistribution failed: no convergence after 2000 steps");
}

namespace {

struct SnapshotSink {
    fs::path dir;
    std::vector<double> targets;
    size_t next = 0;
    std::vector<std::pair<double, Points>> taken;
    std::ofstream index;
    double slack = 1e-9;

    SnapshotSink(const fs::path& out_dir, int count, double t_end) : dir(out_dir) {
        if (count == 1) {
            targets.push_back(t_end);
        } else {
            for (int k = 0; k < count; ++k)
                targets.push_back(t_end * static_cast<double>(k) / (count - 1));
        }
        if (count > 0) {
            index.open(dir / "snapshots.csv");
            index << "snapshot,t\n";
        }
        slack = 1e-9 * std::max(1.0, t_end);
    }

    void offer(double t, const Points& X) {
        while (next < targets.size() && t >= targets[next] - slack) {
            char name[32];
            std::snprintf(name, sizeof name, "snapshot_%03zu.csv", next);
            write_points_csv((dir / name).string(), X);
            index << name << ',' << format_g17(t) << '\n';
            taken.emplace_back(t, X);
            ++next;
        }
    }
};

void write_resolved_config(const fs::path& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    out << "flow = " << cfg.flow << "\n";
    out << "scheme = " << cfg.scheme << "\n";
    out << "N = " << cfg.N << "\n";
    out << "tau = " << format_g17(cfg.tau) << "\n";
    out << "omega-rule = " << cfg.omega_rule << "\n";
    out << "sigma = " << format_g17(cfg.sigma) << "\n";
    out << "rho = " << format_g17(cfg.rho) << "\n";
    out << "tol = " << format_g17(cfg.tol) << "\n";
    out << "t-end = " << format_g17(cfg.t_end) << "\n";
    out << "dt = " << (cfg.dt ? format_g17(*cfg.dt) : std::string("adaptive")) << "\n";
    out << "snapshots = " << cfg.snapshots << "\n";
    out << "out = " << cfg.out << "\n";
    out << "svg = " << (cfg.svg ? "true" : "false") << "\n";
    out << "seed = " << cfg.seed << "\n";
}

void write_error_record(const fs::path& dir, int exit_code, const std::string& message) {
    nlohmann::json j;
    j["exit"] = exit_code;
    j["error"] = message;
    std::ofstream out(dir / "error.json");
    out << j.dump(2) << "\n";
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.N < 3) throw ConfigError("N must be at least 3");
    if (!(cfg.tau > 0.0)) throw ConfigError("tau must be positive");
    if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(cfg.t_end > 0.0)) throw ConfigError("t-end must be positive");
    if (cfg.snapshots < 0) throw ConfigError("snapshots must be nonnegative");
    if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (cfg.scheme != "implicit" && cfg.scheme != "rk4" && cfg.scheme != "midpoint-srk")
        throw ConfigError("unknown scheme: " + cfg.scheme);
    if (cfg.scheme != "implicit" && !cfg.dt)
        throw ConfigError("scheme " + cfg.scheme + " requires dt");
    make_flow(cfg);
    make_omega(cfg);
}

void check_simplicity(double t, const Points& X) {
    if (log_level() >= 1 && !is_simple(X))
        log_info("curve self-intersects at t = " + format_g17(t));
}

void emit_svg(const fs::path& dir, const TimeSeries& series, const SnapshotSink& snaps) {
    svg_curves((dir / "curves.svg").string(), snaps.taken);
    std::vector<double> t, L, A, dt;
    for (size_t i = 0; i < series.rows.size(); ++i) {
        t.push_back(series.rows[i].t);
        L.push_back(series.rows[i].length);
        A.push_back(series.rows[i].area);
        if (i > 0) dt.push_back(series.rows[i].dt);
    }
    svg_chart((dir / "length_area.svg").string(), "length and enclosed area", t,
              {{"length", L}, {"area", A}});
    if (!dt.empty())
        svg_chart((dir / "timestep.svg").string(), "time step size",
                  std::vector<double>(t.begin() + 1, t.end()), {{"dt", dt}}, true);
}

}  // namespace

int run(const ExperimentConfig& cfg) {
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 4;
    }

    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::fprintf(stderr, "config error: cannot create output directory %s\n", cfg.out.c_str());
        return 4;
    }
    write_resolved_config(dir / "config.txt", cfg);

    const FlowModel model = make_flow(cfg);
    const OmegaRule omega = make_omega(cfg);
    TimeSeries series;
    SnapshotSink snaps(dir, cfg.snapshots, cfg.t_end);
    int exit_code = 0;
    std::string error_message;

    try {
        log_info("redistributing initial curve, N = " + std::to_string(cfg.N));
        const PolygonalCurve start =
            redistribute_uniform(initial_curve(cfg.N), omega(cfg.N, cfg.tau), 1e-10, cfg.tau);

        if (cfg.scheme == "implicit") {
            EvolveParams params;
            params.tau = cfg.tau;
            params.omega = omega;
            params.tol = cfg.tol;
            params.t_end = cfg.t_end;
            params.fixed_dt = cfg.dt;
            params.observer = [&](double t, const Points& X) {
                snaps.offer(t, X);
                check_simplicity(t, X);
            };
            EvolveResult result = evolve(start, model, params);
            series = std::move(result.series);
        } else if (cfg.scheme == "rk4") {
            const double dt = *cfg.dt;
            PolygonalCurve current = start;
            double t = 0.0;
            series.rows.push_back(make_record(0.0, 0.0, current.vertices(), 0, 0.0));
            snaps.offer(0.0, current.vertices());
            const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
            while (cfg.t_end - t > t_eps) {
                const double step = std::min(dt, cfg.t_end - t);
                const double L_prev = polygon_length(current.vertices());
                Points candidate = current.vertices();
                bool exploded = false;
                std::string cause;
                try {
                    current = rk4_step(current, model, omega(cfg.N, step), step, &candidate);
                } catch (const std::exception& e) {
                    exploded = true;
                    cause = e.what();
                }
                if (!exploded) {
                    const double L = polygon_length(current.vertices());
                    const double coord = current.vertices().cwiseAbs().maxCoeff();
                    if (!current.vertices().allFinite() || L > 1.1 * L_prev || coord > 5.0) {
                        exploded = true;
                        candidate = current.vertices();
                        cause = "explicit blow-up: length or coordinate growth";
                    }
                }
                if (exploded) {
                    write_points_csv((dir / "blowup.csv").string(), candidate);
                    if (cause.rfind("explicit blow-up", 0) != 0) cause = "explicit blow-up: " + cause;
                    throw std::runtime_error(cause);
                }
                t += step;
                series.rows.push_back(make_record(t, step, current.vertices(), 0, 0.0));
                snaps.offer(t, current.vertices());
                check_simplicity(t, current.vertices());
            }
        } else {  // midpoint-srk
            const double dt = *cfg.dt;
            const ButcherTableau tableau = midpoint_tableau();
            PolygonalCurve current = start;
            double t = 0.0;
            series.rows.push_back(make_record(0.0, 0.0, current.vertices(), 0, 0.0));
            snaps.offer(0.0, current.vertices());
            const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
            while (cfg.t_end - t > t_eps) {
                const double step = std::min(dt, cfg.t_end - t);
                SrkStats stats;
                current = srk_step(current, step, tableau, model, omega(cfg.N, step), cfg.tol, &stats);
                t += step;
                series.rows.push_back(
                    make_record(t, step, current.vertices(), stats.newton_iters, stats.residual_norm));
                snaps.offer(t, current.vertices());
                check_simplicity(t, current.vertices());
            }
        }
    } catch (const std::exception& e) {
        error_message = e.what();
        exit_code = error_message.rfind("explicit blow-up", 0) == 0 ? 3 : 2;
    }

    write_csv((dir / "series.csv").string(), series);
    if (cfg.svg) emit_svg(dir, series, snaps);
    if (exit_code != 0) {
        write_error_record(dir, exit_code, error_message);
        std::fprintf(stderr, "error: %s\n", error_message.c_str());
    }
    return exit_code;
}

}  // namespace curveflow

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "majorant/dyadic.hpp"
#include "majorant/envelopes.hpp"
#include "majorant/experiments.hpp"
#include "majorant/grid.hpp"
#include "majorant/kernels.hpp"

namespace fs = std::filesystem;
using majorant::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoEvidence = 2;

json g_config;  // file config; flags override on top

template <class T>
T cfg(const std::string& section, const std::string& key, T fallback) {
    if (g_config.contains(section) && g_config[section].contains(key)) return g_config[section][key].get<T>();
    return fallback;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

void write_report(const fs::path& dir, const std::string& name, const json& data,
                  const std::map<std::string, std::string>& attachments) {
    fs::create_directories(dir);
    std::ofstream os(dir / (name + "_report.json"));
    os << data.dump(2) << "\n";
    for (const auto& [file, content] : attachments) write_text(dir / file, content);
}

json grid_config_echo(const majorant::DiskGrid& g) {
    return json{{"drho", g.drho}, {"n_rho", g.n_rho}, {"n_theta", g.n_theta}, {"r_max", g.r_max()}};
}

majorant::GridFunction load_grid_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open grid file " + path);
    return majorant::load_grid_csv(is);
}

majorant::ZeroSet load_zeros_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open zeros file " + path);
    majorant::ZeroSet zs;
    zs.domain = majorant::Domain::disk;
    double re, im, mass;
    while (is >> re >> im >> mass) zs.zeros.push_back({{re, im}, mass});
    if (zs.zeros.empty()) throw std::runtime_error("zeros file is empty");
    return zs;
}

std::string reduction_json(const majorant::ReductionReport& rep) {
    json j{{"status", majorant::to_string(rep.status)},
           {"iterations", rep.iterations},
           {"final_max_rel_change", rep.final_max_rel_change},
           {"trace", rep.trace}};
    return j.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic/superharmonic majorant toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = ".";
    int threads = 0;
    app.add_option("--config", config_path, "JSON config file (flags override)");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (default: all cores)");

    // dyadic-build
    auto* dyadic_cmd = app.add_subcommand("dyadic-build", "build a dominating measure from dyadic data");
    std::string dyadic_input;
    dyadic_cmd->add_option("--input", dyadic_input, "DyadicData text file")->required();

    // envelope
    auto* env_cmd = app.add_subcommand("envelope", "log-Lipschitz upper envelope of a grid function");
    std::string env_grid_file, env_out = "envelope.csv";
    double env_c = 2.0;
    env_cmd->add_option("--grid", env_grid_file, "grid CSV")->required();
    auto* env_c_opt = env_cmd->add_option("--c", env_c, "Lipschitz constant");
    env_cmd->add_option("--out", env_out, "output CSV name");

    // reduce
    auto* red_cmd = app.add_subcommand("reduce", "Koosis iteration of the hyperbolic sup-mean");
    std::string red_grid_file;
    std::vector<double> red_radii;
    double red_tol = 1e-4, red_cap = 1e6;
    int red_max_iter = 500;
    red_cmd->add_option("--grid", red_grid_file, "grid CSV")->required();
    auto* red_radii_opt = red_cmd->add_option("--radii", red_radii, "averaging radii");
    auto* red_tol_opt = red_cmd->add_option("--tol", red_tol, "relative convergence tolerance");
    auto* red_cap_opt = red_cmd->add_option("--cap", red_cap, "divergence cap (relative to phi(0))");
    auto* red_iter_opt = red_cmd->add_option("--max-iter", red_max_iter, "iteration budget");

    // test-majorant
    auto* tm_cmd = app.add_subcommand("test-majorant", "harmonic-majorant existence test");
    std::string tm_grid_file, tm_zeros_file;
    double tm_c = 2.0, tm_delta = 0.25, tm_drho = 0.1, tm_cap = 1e6, tm_tol = 1e-4;
    int tm_nrho = 80, tm_ntheta = 256, tm_max_iter = 500;
    tm_cmd->add_option("--grid", tm_grid_file, "grid CSV with phi values");
    tm_cmd->add_option("--zeros", tm_zeros_file, "zero-set file: lines 're im mass'");
    tm_cmd->add_option("--c", tm_c, "envelope constant (>= 2 recommended)");
    tm_cmd->add_option("--delta", tm_delta, "near/far split for the witness builder");
    tm_cmd->add_option("--drho", tm_drho, "grid radial step");
    tm_cmd->add_option("--n-rho", tm_nrho, "grid ring count");
    tm_cmd->add_option("--n-theta", tm_ntheta, "grid angle count");
    tm_cmd->add_option("--cap", tm_cap, "divergence cap");
    tm_cmd->add_option("--tol", tm_tol, "convergence tolerance");
    tm_cmd->add_option("--max-iter", tm_max_iter, "iteration budget");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "reproduce a counterexample experiment");
    std::string exp_name;
    exp_cmd->add_option("name", exp_name, "rnotlip | sharpmaxf | anyrate")->required();
    double exp_gamma = 1.0, exp_delta = -1.0, exp_eps = 0.01, exp_xmin = -1.0, exp_s = 1.0;
    auto* gamma_opt = exp_cmd->add_option("--gamma", exp_gamma, "envelope constant (rnotlip)");
    auto* delta_opt = exp_cmd->add_option("--delta", exp_delta, "hyperbolic spacing / disc radius");
    auto* eps_opt = exp_cmd->add_option("--eps", exp_eps, "circle shrink (rnotlip)");
    auto* xmin_opt = exp_cmd->add_option("--x-min", exp_xmin, "curve truncation");
    auto* s_opt = exp_cmd->add_option("--s-exponent", exp_s, "rate s(t) = t^-p");
    double exp_drho = -1.0;
    int exp_nrho = -1, exp_ntheta = -1;
    exp_cmd->add_option("--drho", exp_drho, "grid radial step (rnotlip)");
    exp_cmd->add_option("--n-rho", exp_nrho, "grid ring count (rnotlip)");
    exp_cmd->add_option("--n-theta", exp_ntheta, "grid angle count (rnotlip)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitError;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::runtime_error("cannot open config " + config_path);
            is >> g_config;
        }
        if (threads > 0) setenv("MAJORANT_THREADS", std::to_string(threads).c_str(), 1);
        fs::path out(out_dir);

        if (*dyadic_cmd) {
            std::ifstream is(dyadic_input);
            if (!is) throw std::runtime_error("cannot open " + dyadic_input);
            majorant::DyadicData data = majorant::load_dyadic_data(is);
            majorant::DyadicDP dp = majorant::packing_dp(data);
            majorant::CircleMeasure mu = majorant::build_dominating_measure(data);
            majorant::BoundaryDensity f = majorant::direct_density(data);

            bool ok = true;
            double worst_margin = 1e300;
            for (int n = 0; n <= data.depth; ++n)
                for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k) {
                    double need = majorant::arc_length(n) * data.at(n, k);
                    double have = mu.node_mass({n, k});
                    worst_margin = std::min(worst_margin, have - need);
                    if (have < need - 1e-9) ok = false;
                }
            double mass_err = std::abs(mu.total() - dp.root());

            fs::create_directories(out);
            {
                std::ofstream ms(out / "measure.csv");
                majorant::save_circle_measure(ms, mu);
            }
            {
                std::ofstream ds(out / "density.csv");
                ds << "theta,value\n";
                ds.precision(17);
                for (size_t i = 0; i < f.breakpoints.size(); ++i)
                    ds << f.breakpoints[i] << "," << f.values[static_cast<Eigen::Index>(i)] << "\n";
            }
            json rep{{"command", "dyadic-build"},
                     {"input", dyadic_input},
                     {"depth", data.depth},
                     {"packing_condition_S", dp.root()},
                     {"total_mass", mu.total()},
                     {"mass_conservation_error", mass_err},
                     {"domination_worst_margin", worst_margin},
                     {"density_integral", f.integral()},
                     {"audit", ok && mass_err <= 1e-9 ? "PASS" : "FAIL"}};
            write_report(out, "dyadic_build", rep, {});
            std::cout << "audit " << rep["audit"].get<std::string>() << ", S = " << dp.root() << "\n";
            return ok && mass_err <= 1e-9 ? kExitOk : kExitError;
        }

        if (*env_cmd) {
            double C = env_c_opt->count() ? env_c : cfg("envelope", "c", env_c);
            majorant::GridFunction phi = load_grid_file(env_grid_file);
            majorant::GridFunction env = majorant::log_lipschitz_envelope(phi, C);
            fs::create_directories(out);
            std::ofstream os(out / env_out);
            majorant::save_grid_csv(os, env);
            json rep{{"command", "envelope"}, {"c", C}, {"grid", grid_config_echo(phi.grid)},
                     {"output", env_out}};
            write_report(out, "envelope", rep, {});
            return kExitOk;
        }

        if (*red_cmd) {
            majorant::GridFunction phi = load_grid_file(red_grid_file);
            majorant::ReduceOptions ropt;
            if (red_radii_opt->count())
                ropt.radii = red_radii;
            else if (g_config.contains("reduce") && g_config["reduce"].contains("radii"))
                ropt.radii = g_config["reduce"]["radii"].get<std::vector<double>>();
            ropt.tol = red_tol_opt->count() ? red_tol : cfg("reduce", "tol", red_tol);
            ropt.cap = red_cap_opt->count() ? red_cap : cfg("reduce", "cap", red_cap);
            ropt.max_iter = red_iter_opt->count() ? red_max_iter : cfg("reduce", "max_iter", red_max_iter);
            majorant::ReductionReport rep = majorant::reduce(phi, ropt);
            fs::create_directories(out);
            {
                std::ofstream os(out / "reduced.csv");
                majorant::save_grid_csv(os, rep.result);
            }
            json j{{"command", "reduce"},
                   {"grid", grid_config_echo(phi.grid)},
                   {"radii", ropt.radii},
                   {"tol", ropt.tol},
                   {"cap", ropt.cap},
                   {"max_iter", ropt.max_iter},
                   {"status", majorant::to_string(rep.status)},
                   {"iterations", rep.iterations},
                   {"final_max_rel_change", rep.final_max_rel_change},
                   {"trace", rep.trace}};
            write_report(out, "reduce", j, {});
            std::cout << "status " << majorant::to_string(rep.status) << " after " << rep.iterations
                      << " iterations\n";
            return kExitOk;
        }

        if (*tm_cmd) {
            majorant::GridFunction phi;
            std::optional<majorant::ZeroSet> zeros;
            majorant::ReduceOptions ropt;
            ropt.tol = tm_tol;
            ropt.cap = tm_cap;
            ropt.max_iter = tm_max_iter;
            if (!tm_grid_file.empty()) {
                phi = load_grid_file(tm_grid_file);
            } else if (!tm_zeros_file.empty()) {
                zeros = load_zeros_file(tm_zeros_file);
                majorant::DiskGrid g{tm_drho, tm_nrho, tm_ntheta};
                majorant::CappedBlaschkePhi capped(*zeros, tm_delta);
                phi = majorant::sample_on_grid(g, [&](majorant::Complex z) { return capped.evaluate(z); });
            } else {
                throw std::runtime_error("test-majorant: provide --grid or --zeros");
            }
            majorant::MajorantTestResult res =
                majorant::harmonic_majorant_test(phi, tm_c, ropt, zeros ? &*zeros : nullptr, tm_delta);
            fs::create_directories(out);
            {
                std::ofstream os(out / "reduced.csv");
                majorant::save_grid_csv(os, res.reduction.result);
            }
            if (res.witness) {
                std::ofstream os(out / "witness.txt");
                majorant::save_descriptor(os, *res.witness);
            }
            json j{{"command", "test-majorant"},
                   {"c", tm_c},
                   {"delta", tm_delta},
                   {"grid", grid_config_echo(phi.grid)},
                   {"verdict", majorant::to_string(res.verdict)},
                   {"reduction", json::parse(reduction_json(res.reduction))}};
            if (res.witness)
                j["witness_constants"] = {{"c_delta", res.witness_report.c_delta},
                                          {"c_alpha", res.witness_report.c_alpha},
                                          {"lemma1_constant", res.witness_report.lemma1_constant},
                                          {"c1", res.witness_report.c1},
                                          {"r2", res.witness_report.r2},
                                          {"slack", res.witness_report.slack}};
            write_report(out, "test_majorant", j, {});
            std::cout << "verdict " << majorant::to_string(res.verdict) << "\n";
            if (res.verdict == majorant::MajorantTestResult::Verdict::no_evidence) return kExitNoEvidence;
            return kExitOk;
        }

        if (*exp_cmd) {
            majorant::ExperimentReport rep;
            if (exp_name == "rnotlip") {
                majorant::RnotlipOptions opt;
                if (gamma_opt->count()) opt.gamma = exp_gamma;
                if (delta_opt->count()) opt.delta = exp_delta;
                if (eps_opt->count()) opt.eps = exp_eps;
                if (exp_drho > 0) opt.grid.drho = exp_drho;
                if (exp_nrho > 0) opt.grid.n_rho = exp_nrho;
                if (exp_ntheta > 0) opt.grid.n_theta = exp_ntheta;
                majorant::RnotlipResult res = majorant::run_rnotlip(opt);
                rep = res.report;
                std::cout << "gradient " << res.gradient_estimate << " (target " << res.target << ")\n";
            } else if (exp_name == "sharpmaxf") {
                majorant::SharpmaxfOptions opt;
                if (s_opt->count()) opt.s.exponent = exp_s;
                if (delta_opt->count()) opt.delta = exp_delta;
                if (xmin_opt->count()) opt.x_min = exp_xmin;
                rep = majorant::run_sharpmaxf(opt);
            } else if (exp_name == "anyrate") {
                majorant::AnyrateOptions opt;
                if (s_opt->count()) opt.s.exponent = exp_s;
                if (delta_opt->count()) opt.delta = exp_delta;
                if (xmin_opt->count()) opt.x_min = exp_xmin;
                rep = majorant::run_anyrate(opt);
            } else {
                throw std::runtime_error("unknown experiment " + exp_name);
            }
            write_report(out, rep.name, rep.data, rep.attachments);
            std::cout << rep.name << ": " << rep.verdict << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

// isingbath_cli.cpp — reproduce the figure scenarios, sweeps, and oracle checks

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "isingbath/chain_oracle.hpp"
#include "isingbath/experiments.hpp"
#include "isingbath/fock_oracle.hpp"

namespace ib = isingbath;
namespace ex = isingbath::experiments;

namespace {

struct CommonOptions {
    std::string config;
    std::string out_dir;
    int threads = 0;
    std::string convention;
    std::string occupation;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "flat key = value configuration file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads for sweep points");
    cmd->add_option("--convention", opts.convention, "coupling prefactor: paper | derived")
        ->check(CLI::IsMember({"paper", "derived"}));
    cmd->add_option("--occupation", opts.occupation, "thermal weight sign: plus | minus")
        ->check(CLI::IsMember({"plus", "minus"}));
}

ex::ExperimentConfig load_config(const CommonOptions& opts, ex::Scenario scenario) {
    ex::ExperimentConfig cfg = opts.config.empty()
                                   ? ex::ExperimentConfig::defaults_for(scenario)
                                   : ex::ExperimentConfig::from_file(opts.config, scenario);
    if (cfg.scenario != scenario) {
        throw std::runtime_error("config file selects a different scenario than the subcommand");
    }
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.threads > 0) cfg.threads = opts.threads;
    if (opts.convention == "paper") cfg.chain.coupling_norm = ib::CouplingNorm::Paper;
    if (opts.convention == "derived") cfg.chain.coupling_norm = ib::CouplingNorm::Derived;
    if (opts.occupation == "plus") cfg.occupation = ib::OccupationSign::Plus;
    if (opts.occupation == "minus") cfg.occupation = ib::OccupationSign::Minus;
    return cfg;
}

int run_figure(const CommonOptions& opts, ex::Scenario scenario) {
    const ex::ExperimentConfig cfg = load_config(opts, scenario);
    const ex::SweepResult result = ex::run_scenario(cfg);
    std::printf("%s: %zu record(s) written to %s\n", ex::to_string(result.scenario),
                result.records.size(), result.out_dir.c_str());
    for (const ex::SweepRecord& r : result.records) {
        if (result.scenario == ex::Scenario::Fig2InitialStateSweep) continue;
        std::printf("  %-18s max C = %.6f", r.label.c_str(), r.max_concurrence);
        if (r.onset) std::printf("  onset t0 = %.6g", *r.onset);
        if (r.period) std::printf("  period = %.6g", *r.period);
        std::printf("\n");
    }
    if (result.scenario == ex::Scenario::Fig2InitialStateSweep) {
        double best = 0.0;
        for (const ex::SweepRecord& r : result.records) best = std::max(best, r.max_concurrence);
        std::printf("  grid %zu point(s), global max C = %.6f\n", result.records.size(), best);
    }
    if (result.onset_fit) {
        std::printf("  log t0 ~ %.4f * l + %.4f  (R^2 = %.4f)\n", result.onset_fit->slope,
                    result.onset_fit->intercept, result.onset_fit->r_squared);
    }
    std::printf("  state checks: hermiticity %.2e, trace %.2e, min eig %.2e, diag drift %.2e\n",
                result.worst_state.hermiticity_error, result.worst_state.trace_error,
                result.worst_state.min_eigenvalue, result.pointer_diag_drift);
    return 0;
}

int run_nodes(const CommonOptions& opts) {
    ex::ExperimentConfig cfg = load_config(opts, ex::Scenario::Custom);
    const std::vector<int> ls = cfg.l_list.empty() ? std::vector<int>{cfg.chain.l} : cfg.l_list;
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    for (int l : ls) {
        ib::ChainSpec spec = cfg.chain;
        spec.l = l;
        const ib::DfsFeasibilityReport report = ib::dfs_feasibility(spec);
        std::printf("l = %d\n%s", l, report.summary().c_str());
        std::ofstream out(cfg.out_dir + "/nodes_l" + std::to_string(l) + ".csv");
        ib::write_csv(report, out);
    }
    return 0;
}

int run_converge(const CommonOptions& opts) {
    ex::ExperimentConfig cfg = load_config(opts, ex::Scenario::Fig1SameSite);
    const ex::ConvergenceReport report = ex::convergence_check(cfg, cfg.N_list);
    std::printf("convergence window t in [0, %g]\n", report.window);
    for (const ex::ConvergenceEntry& e : report.entries) {
        std::printf("  N=%d vs N=%d: max |dC| = %.3e (recurrence estimate for N=%d: %g%s)\n",
                    e.N_small, e.N_large, e.max_abs_diff, e.N_small, e.recurrence_small,
                    e.window_exceeds_recurrence ? ", window exceeds recurrence" : "");
    }
    std::printf("%s\n", report.passed ? "converged within 1e-3" : "NOT converged");
    if (!report.notes.empty()) std::printf("%s\n", report.notes.c_str());
    return report.passed ? 0 : 1;
}

struct OracleOptions {
    std::string mode = "both";
    double J_fock = 0.1, gamma_fock = 0.05, T_fock = 0.0;
    int l = 1, N_small = 2, n_max = 4;
    double t_max_fock = 50.0;
    std::size_t n_times_fock = 201;
    double tolerance = 1e-3;
    double J_chain = 0.05, gamma_chain = 0.02, T_chain = 1e-5;
    int n_sites = 8;
    double t_max_chain = 1200.0;
    std::size_t n_times_chain = 2401;
    double peak_tolerance = 0.15;
    double occupation_cap = 0.05;
};

void write_states_csv(const std::string& path, const std::vector<double>& times,
                      const std::vector<ib::DefectState>& states) {
    std::ofstream out(path);
    ib::write_state_csv_header(out);
    for (std::size_t k = 0; k < times.size(); ++k) {
        ib::append_state_csv_row(out, times[k], states[k]);
    }
}

int run_oracle(const CommonOptions& common, const OracleOptions& opts) {
    ex::ExperimentConfig base = load_config(common, ex::Scenario::Custom);
    std::error_code ec;
    std::filesystem::create_directories(base.out_dir, ec);
    int status = 0;

    if (opts.mode == "fock" || opts.mode == "both") {
        ib::ChainSpec spec = base.chain;
        spec.N = opts.N_small;
        spec.J = opts.J_fock;
        spec.gamma = opts.gamma_fock;
        spec.T = opts.T_fock;
        spec.l = opts.l;
        ib::oracle::FockBathConfig cfg;
        cfg.N_small = opts.N_small;
        cfg.n_max = opts.n_max;
        cfg.T = opts.T_fock;
        cfg.t_grid = ex::uniform_times(opts.t_max_fock, opts.n_times_fock);

        const ib::DefectState initial = ib::product_state(0.0, 0.0);
        const auto exact = ib::oracle::exact_boson_evolution(cfg, spec, initial);

        const ib::BathModes modes = ib::build_bath_modes(spec);
        const auto coeffs_plus =
            ib::dephasing_coefficients(modes, cfg.t_grid, ib::OccupationSign::Plus);
        const auto coeffs_minus =
            ib::dephasing_coefficients(modes, cfg.t_grid, ib::OccupationSign::Minus);
        double dev_plus = 0.0, dev_minus_fro = 0.0;
        std::vector<ib::DefectState> analytic;
        analytic.reserve(cfg.t_grid.size());
        for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
            const ib::DefectState plus =
                ib::to_basis(ib::evolve(initial, coeffs_plus, k), ib::Basis::StandardZ);
            const ib::DefectState minus =
                ib::to_basis(ib::evolve(initial, coeffs_minus, k), ib::Basis::StandardZ);
            analytic.push_back(plus);
            dev_plus = std::max(dev_plus,
                                (plus.rho - exact.states[k].rho).cwiseAbs().maxCoeff());
            dev_minus_fro =
                std::max(dev_minus_fro, (minus.rho - exact.states[k].rho).norm());
        }
        write_states_csv(base.out_dir + "/fock_exact.csv", cfg.t_grid, exact.states);
        write_states_csv(base.out_dir + "/fock_analytic.csv", cfg.t_grid, analytic);
        std::printf("fock oracle (N_small=%d, n_max=%d, dim=%zu, %s propagator):\n",
                    opts.N_small, opts.n_max, exact.dimension,
                    exact.used_dense_propagator ? "dense" : "chebyshev");
        std::printf("  max elementwise |analytic(2n+1) - exact| = %.3e (tolerance %.1e)\n",
                    dev_plus, opts.tolerance);
        std::printf("  max Frobenius  |analytic(2n-1) - exact| = %.3e (audit variant)\n",
                    dev_minus_fro);
        std::printf("  norm drift %.2e, energy drift %.2e\n", exact.norm_drift,
                    exact.energy_drift);
        if (dev_plus > opts.tolerance) {
            std::fprintf(stderr, "fock oracle deviation exceeds tolerance\n");
            status = 1;
        }
    }

    if (opts.mode == "chain" || opts.mode == "both") {
        ib::oracle::SpinChainConfig cfg;
        cfg.n_sites = opts.n_sites;
        cfg.J = opts.J_chain;
        cfg.gamma = opts.gamma_chain;
        cfg.T = opts.T_chain;
        cfg.l = opts.l;
        cfg.t_grid = ex::uniform_times(opts.t_max_chain, opts.n_times_chain);
        const ib::DefectState initial = ib::product_state(0.0, 0.0);
        const auto exact = ib::oracle::exact_spin_chain_evolution(cfg, initial);

        ib::ChainSpec spec = base.chain;
        spec.N = opts.n_sites / 2;
        spec.J = opts.J_chain;
        spec.gamma = opts.gamma_chain;
        spec.T = opts.T_chain;
        spec.l = opts.l;
        spec.placement = ib::Placement::DistantSites;
        // The direct substitution prefactor is the one that reproduces the
        // microscopic chain; the sqrt(2)-larger variant halves the time axis.
        spec.coupling_norm = ib::CouplingNorm::Derived;
        const ib::BathModes modes = ib::build_bath_modes(spec);
        ex::SeriesStats stats;
        const std::vector<double> bosonized = ex::concurrence_series(
            modes, initial, cfg.t_grid, base.occupation, base.threads, &stats);
        std::vector<double> exact_c(cfg.t_grid.size());
        for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
            exact_c[k] = ib::concurrence(exact.states[k]).value;
        }
        const auto peak_exact = ex::first_peak_time(cfg.t_grid, exact_c);
        const auto peak_bosonized = ex::first_peak_time(cfg.t_grid, bosonized);
        double occ = 0.0;
        for (double o : exact.site_occupation_max) occ = std::max(occ, o);
        std::printf("spin-chain oracle (n_sites=%d, dim=%zu):\n", opts.n_sites, exact.dimension);
        std::printf("  max per-site magnetization deviation = %.4f (cap %.2f)\n", occ,
                    opts.occupation_cap);
        {
            std::ofstream out(base.out_dir + "/chain_concurrence.csv");
            out << "t,exact,bosonized\n";
            char buf[128];
            for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", cfg.t_grid[k], exact_c[k],
                              bosonized[k]);
                out << buf;
            }
        }
        if (peak_exact && peak_bosonized) {
            const double rel = std::abs(*peak_exact - *peak_bosonized) / *peak_exact;
            std::printf("  first concurrence peak: exact %.4g, bosonized %.4g (rel diff %.2f%%)\n",
                        *peak_exact, *peak_bosonized, 100.0 * rel);
            if (rel > opts.peak_tolerance) {
                std::fprintf(stderr, "peak-time disagreement exceeds tolerance\n");
                status = 1;
            }
        } else {
            std::fprintf(stderr, "no concurrence peak found inside the window\n");
            status = 1;
        }
        if (occ > opts.occupation_cap) {
            std::fprintf(stderr, "magnetization deviation too large for the bosonic picture\n");
            status = 1;
        }
    }
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dephasing and entanglement of two defect spins coupled to a bosonized chain"};
    app.require_subcommand(1);

    CommonOptions common;
    OracleOptions oracle_opts;
    std::map<std::string, ex::Scenario> figures = {
        {"fig1", ex::Scenario::Fig1SameSite},
        {"fig2", ex::Scenario::Fig2InitialStateSweep},
        {"fig3", ex::Scenario::Fig3DistanceSweep},
        {"fig4", ex::Scenario::Fig4Spectral},
        {"sweep", ex::Scenario::Custom},
    };
    std::map<CLI::App*, ex::Scenario> dispatch;
    for (const auto& [name, scenario] : figures) {
        const char* description =
            scenario == ex::Scenario::Custom ? "custom sweep over l/gamma/J lists"
                                             : "reproduce the corresponding figure scenario";
        CLI::App* cmd = app.add_subcommand(name, description);
        add_common(cmd, common);
        dispatch[cmd] = scenario;
    }
    CLI::App* nodes = app.add_subcommand("nodes", "spectral-density zeros and DFS feasibility");
    add_common(nodes, common);
    CLI::App* converge = app.add_subcommand("converge", "finite-size convergence check");
    add_common(converge, common);
    CLI::App* oracle = app.add_subcommand("oracle", "brute-force verification runs");
    add_common(oracle, common);
    oracle->add_option("--mode", oracle_opts.mode, "fock | chain | both")
        ->check(CLI::IsMember({"fock", "chain", "both"}));
    oracle->add_option("--n-small", oracle_opts.N_small, "half chain size of the Fock oracle");
    oracle->add_option("--n-max", oracle_opts.n_max, "Fock cutoff per mode");
    oracle->add_option("--n-sites", oracle_opts.n_sites, "spin-chain oracle sites");
    oracle->add_option("--l", oracle_opts.l, "defect attachment half-distance");
    oracle->add_option("--j-fock", oracle_opts.J_fock, "J for the Fock oracle");
    oracle->add_option("--gamma-fock", oracle_opts.gamma_fock, "gamma for the Fock oracle");
    oracle->add_option("--t-fock", oracle_opts.T_fock, "temperature for the Fock oracle");
    oracle->add_option("--j-chain", oracle_opts.J_chain, "J for the spin-chain oracle");
    oracle->add_option("--gamma-chain", oracle_opts.gamma_chain, "gamma for the spin-chain oracle");
    oracle->add_option("--t-chain", oracle_opts.T_chain, "temperature for the spin-chain oracle");
    oracle->add_option("--t-max-fock", oracle_opts.t_max_fock, "Fock oracle window");
    oracle->add_option("--t-max-chain", oracle_opts.t_max_chain, "spin-chain oracle window");
    oracle->add_option("--tolerance", oracle_opts.tolerance, "element-wise agreement tolerance");
    oracle->add_option("--peak-tolerance", oracle_opts.peak_tolerance,
                       "relative first-peak tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& [cmd, scenario] : dispatch) {
            if (cmd->parsed()) return run_figure(common, scenario);
        }
        if (nodes->parsed()) return run_nodes(common);
        if (converge->parsed()) return run_converge(common);
        if (oracle->parsed()) return run_oracle(common, oracle_opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

// experiments.hpp — figure scenarios, parameter sweeps, and derived quantities

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isingbath/entanglement.hpp"
#include "isingbath/numerics.hpp"
#include "isingbath/spectral.hpp"

namespace isingbath::experiments {

enum class Scenario {
    Fig1SameSite,
    Fig2InitialStateSweep,
    Fig3DistanceSweep,
    Fig4Spectral,
    Custom,
};

// Flat configuration shared by the CLI and the scenario runner. Every field
// maps one-to-one onto a `key = value` line of the config file format.
struct ExperimentConfig {
    Scenario scenario = Scenario::Custom;
    ChainSpec chain;
    OccupationSign occupation = OccupationSign::Plus;

    std::vector<double> gamma_list;  // fig1/custom sweeps
    std::vector<double> J_list;      // fig1/custom sweeps
    std::vector<int> l_list;         // fig3/fig4/custom sweeps
    std::vector<double> alpha_list;  // fig2 grid axis
    double alpha_A = 0.0;            // initial product state angles
    double alpha_B = 0.0;

    double t_max = 0.0;  // 0 selects an automatic window of ~2.3 periods
    std::size_t n_times = 4096;
    double onset_epsilon = 1e-3;
    double onset_dt = 0.1;
    double onset_t_cap = 16000.0;
    double broadening = 0.005;
    std::size_t n_omegas = 8001;
    std::vector<int> N_list = {500, 1000};  // convergence-check chain sizes
    std::string out_dir = "out";
    int threads = 1;

    void validate() const;
    static ExperimentConfig defaults_for(Scenario scenario);
    static ExperimentConfig from_file(const std::string& path,
                                      Scenario fallback_scenario = Scenario::Custom);
};

struct SweepRecord {
    std::string label;
    int N = 0, l = 0;
    double J = 0.0, gamma = 0.0;
    Placement placement = Placement::DistantSites;
    double alpha_A = 0.0, alpha_B = 0.0;
    std::string series_file;  // relative to out_dir; empty if no series written
    double max_concurrence = 0.0;
    std::optional<double> onset;   // empty = no onset inside the scanned window
    std::optional<double> period;  // empty = no significant spectral peak
};

struct SweepResult {
    Scenario scenario = Scenario::Custom;
    std::string out_dir;
    std::vector<SweepRecord> records;
    std::optional<LinearFit> onset_fit;  // fig3: log(t0) against l
    StateCheck worst_state;              // worst CPTP diagnostics over all snapshots
    double pointer_diag_drift = 0.0;     // max |rho_ii(t) - rho_ii(0)| in pointer basis
};

// Runs the configured scenario, writes per-record CSV series, a summary CSV
// and a gnuplot script into cfg.out_dir. Identical configs produce
// byte-identical outputs. Throws if any evolved state violates the density
// matrix invariants beyond loose guards.
SweepResult run_scenario(const ExperimentConfig& cfg);

// First time C(t) crosses epsilon, linearly interpolated between samples.
std::optional<double> onset_time(std::span<const double> times, std::span<const double> series,
                                 double epsilon);

// Period of the largest nonzero-frequency DFT peak, parabolic-refined.
// Requires a uniform grid; the window should contain at least two periods.
std::optional<double> dominant_period(std::span<const double> times,
                                      std::span<const double> series);

// Time of the first local maximum above floor_fraction * max(series),
// parabolic-refined. Used to compare oscillation onsets between models.
std::optional<double> first_peak_time(std::span<const double> times,
                                      std::span<const double> series,
                                      double floor_fraction = 0.1);

// Slow concurrence period implied by the linear growth of the phases:
// pi / (kappa_S + kappa_A) at a shared site, pi / |kappa_S - kappa_A| for
// distant sites, with kappa = sum g^2 / (2 w^2). Empty if the drift vanishes.
std::optional<double> predicted_period(const BathModes& modes);

// Crude recurrence-time estimate 2N / v_max from the maximal group velocity
// of the dispersion; windows beyond it are contaminated by finite-size echos.
double recurrence_estimate(const BathModes& modes);

struct SeriesStats {
    StateCheck worst;
    double pointer_diag_drift = 0.0;
};

// Bath -> dephasing -> defect evolution -> concurrence for one initial state,
// evaluated in parallel over the time grid.
std::vector<double> concurrence_series(const BathModes& modes, const DefectState& initial,
                                       const std::vector<double>& times,
                                       OccupationSign occupation, int threads,
                                       SeriesStats* stats = nullptr);

// Dephasing coefficients evaluated across a thread pool in contiguous chunks;
// identical values to the serial routine.
DephasingCoefficients coefficients_parallel(const BathModes& modes,
                                            const std::vector<double>& times,
                                            OccupationSign occupation, int threads);

std::vector<double> uniform_times(double t_max, std::size_t n);

struct ConvergenceEntry {
    int N_small = 0, N_large = 0;
    double max_abs_diff = 0.0;
    double recurrence_small = 0.0;
    bool window_exceeds_recurrence = false;
};

struct ConvergenceReport {
    double window = 0.0;
    double tolerance = 1e-3;
    std::vector<ConvergenceEntry> entries;
    bool passed = false;
    std::string notes;
};

// Reruns the configured scenario's concurrence series at each chain size in
// N_list (ascending) and compares consecutive sizes on a shared time grid.
ConvergenceReport convergence_check(const ExperimentConfig& cfg, const std::vector<int>& N_list);

Scenario scenario_from_string(const std::string& name);
const char* to_string(Scenario scenario) noexcept;

} // namespace isingbath::experiments

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odvs/scenario.hpp"

namespace odvs {

struct SeriesRow {
    double t = 0.0;
    double vg = 0.0;
    double v_poc = 0.0;
    double id_cmd = 0.0;
    double iq_cmd = 0.0;
    double phi_deg = 0.0;
    std::string mode;  // normal | angle | iq | droop | analytic
    bool frozen = false;
    double vdc = 0.0;
    double vdc_filt = 0.0;
    double f_pll = 0.0;
    double p_ac = 0.0;
    double p_pv = 0.0;
    bool sync_ok = true;
};

// Band (pu) around the final voltage used for the convergence iteration count.
inline constexpr double kConvergenceBandPu = 0.01;

struct RunMetrics {
    double v_final = 0.0;
    // Seeker iterations executed before the observed voltage settles into
    // +-kConvergenceBandPu of its final value.
    int iterations_to_converge = 0;
    std::optional<double> mode_switch_time;
    int mode_switch_count = 0;
    bool los_detected = false;       // frequency deviation ever reached the band
    double max_f_deviation_hz = 0.0;
    double los_longest_s = 0.0;      // longest contiguous out-of-band interval
    double final_phi_deg = 0.0;
    bool ended_frozen = false;
    bool final_feasible = false;
    double v_star_analytic = 0.0;    // solve() on the post-fault grid
    double runtime_seconds = 0.0;
};

struct RunResult {
    std::vector<SeriesRow> series;
    RunMetrics metrics;
};

RunResult run_simulation(const Scenario& scenario);

// CSV time series plus a flat key=value metrics file in out_dir.
void write_outputs(const std::vector<SeriesRow>& series, const RunMetrics& metrics,
                   const std::filesystem::path& out_dir);

extern const char* kCsvHeader;

std::string metrics_to_text(const RunMetrics& metrics);

// Open-loop seeker convergence over randomized grids: p-series schedules must
// reach the analytic optimizer, the summable control schedule is expected to
// stall at least once.
struct ConvergenceReport {
    int n = 0;
    int iters = 0;
    int pass_p1 = 0;
    int pass_p05 = 0;
    int stalls_summable = 0;
    double worst_err_p1 = 0.0;   // fraction of the search range
    double worst_err_p05 = 0.0;
};

ConvergenceReport run_convergence_suite(int n_scenarios, unsigned long long seed,
                                        int n_iters = 500);

std::string format_report(const ConvergenceReport& report);

}  // namespace odvs

#pragma once

#include <optional>

#include "odvs/grid.hpp"

namespace odvs {

// Which capability limits bind at the voltage-support optimum as the
// available power shrinks.
enum class OptimumStage {
    FullCurrent,         // current limit binding, injection along the impedance angle
    CurrentPowerCorner,  // current and power limits both binding
    PowerLimited,        // power limit binding
};

const char* to_string(OptimumStage stage);

struct OdvsSolution {
    OptimumStage stage = OptimumStage::FullCurrent;
    CurrentPair optimum;
    double v_star = 0.0;
};

// Power threshold pb (full current affordable iff p_max >= pb) and current
// threshold ib (power-limited point inside the current circle iff i_max >= ib).
struct Thresholds {
    double pb = 0.0;
    double ib = 0.0;
};

// Full current at the impedance angle: (r/z, -x/z) * i_max.
CurrentPair full_current_optimum(const GridParams& grid, double i_max);

// Root of the power residual along the current circle between -90 deg and the
// impedance angle, by bisection. Empty when the residual has no sign change
// there (the stage classification was wrong).
std::optional<CurrentPair> corner_optimum(const GridParams& grid, double i_max, double p_max,
                                          double kappa);

CurrentPair power_limited_optimum(const GridParams& grid, double p_max, double kappa);

Thresholds thresholds(const GridParams& grid, double i_max, double p_max, double kappa);

// Model-based solution of the voltage-support optimum. The corner stage falls
// back to the last synchronization-feasible point on the power boundary when
// the raw corner would lose synchronism, so the returned point is always
// feasible.
OdvsSolution solve(const GridParams& grid, const Limits& limits);

// Exhaustive scan of the feasible quadrant at the given current resolution.
// Independent check for solve(); empty when no grid point is feasible.
std::optional<OdvsSolution> brute_force_oracle(const GridParams& grid, const Limits& limits,
                                               double resolution);

}  // namespace odvs

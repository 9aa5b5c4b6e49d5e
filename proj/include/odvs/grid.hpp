#pragma once

#include <optional>

namespace odvs {

// Positive-sequence Thevenin equivalent of the grid seen from the point of
// connection, per unit on the machine base.
struct GridParams {
    double vg = 1.0;  // source voltage magnitude (pu)
    double r = 0.0;   // resistance (pu)
    double x = 0.0;   // reactance (pu)

    double z() const;

    // Builds the equivalent from impedance magnitude and R/X ratio.
    static GridParams from_impedance(double vg, double z, double r_over_x);
};

// Positive-sequence current command (pu). Negative iq injects reactive
// current that supports the voltage (fourth-quadrant operation during dips).
struct CurrentPair {
    double id = 0.0;
    double iq = 0.0;

    double magnitude() const;
};

// Inverter capability: current limit, available active power, and the power
// convention factor kappa (1 for per-unit quantities, 3/2 for SI peak-phase).
struct Limits {
    double i_max = 1.5;
    double p_max = 1.0;
    double kappa = 1.0;
};

struct ConstraintResiduals {
    double gc;  // current magnitude
    double gp;  // maximum active power
    double gs;  // synchronization stability
};

// PoC voltage magnitude. Empty when the injection admits no synchronized
// operating point (the synchronization constraint is violated).
std::optional<double> poc_voltage(const GridParams& grid, const CurrentPair& i);

// Voltage with the radicand clamped at zero; what a magnitude measurement
// reads while synchronism is lost.
double poc_voltage_clamped(const GridParams& grid, const CurrentPair& i);

std::optional<double> active_power(const GridParams& grid, const CurrentPair& i, double kappa);

// Residual form of the three constraints; each <= 0 means satisfied.
// gp is +inf when the voltage has no synchronized solution.
ConstraintResiduals constraint_residuals(const GridParams& grid, const Limits& limits,
                                         const CurrentPair& i);

bool is_feasible(const GridParams& grid, const Limits& limits, const CurrentPair& i,
                 double tol = 1e-9);

}  // namespace odvs

#pragma once

#include <optional>

#include "odvs/grid.hpp"

namespace odvs {

struct Bounds1D {
    double lo = 0.0;
    double hi = 0.0;

    double range() const { return hi - lo; }
    bool contains(double v) const { return v >= lo && v <= hi; }
};

// atan2(-x, r) in degrees; the power factor angle of the full-current optimum.
double impedance_angle_deg(const GridParams& grid);

// Voltage along the maximum-current circle as a function of the power factor
// angle (degrees).
std::optional<double> v_on_circle(const GridParams& grid, double i_max, double phi_deg);

// Search window for the angle: the synchronization window about the impedance
// angle intersected with [-90, 0] deg, with the upper end shrunk so the whole
// arc from the lower end stays inside the power limit (0.1 deg scan).
// Empty when no synchronized angle exists.
std::optional<Bounds1D> angle_bounds(const GridParams& grid, double i_max, double p_max,
                                     double kappa);

// Active current that balances the available power at the given reactive
// current: smallest nonnegative root of kappa*V(id, iq)*id = p_max on the
// high-voltage branch, to 1e-10. Empty when the power cannot be reached.
std::optional<double> id_on_power_boundary(const GridParams& grid, double p_max, double kappa,
                                           double iq);

// Voltage along the maximum-power boundary as a function of reactive current.
std::optional<double> v_on_power_boundary(const GridParams& grid, double p_max, double kappa,
                                          double iq);

// Search window for the reactive current along the power boundary. hi is the
// closed-form intersection with the zero-reactive-drop line; lo is the first
// current- or synchronization-limit hit walking downward (1e-3 pu scan plus
// bisection). Empty when the boundary has no feasible fourth-quadrant segment.
std::optional<Bounds1D> iq_bounds(const GridParams& grid, double i_max, double p_max,
                                  double kappa);

// Closed-form cross-checks for the window ends.
double iq_upper_closed_form(const GridParams& grid, double p_max, double kappa);
std::optional<double> iq_lower_cc_root(const GridParams& grid, double i_max, double p_max,
                                       double kappa);
bool cc_determines_iq_lower(const GridParams& grid, double i_max, double p_max, double kappa);
double iq_lower_ssc_closed_form(const GridParams& grid, double p_max, double kappa);

}  // namespace odvs

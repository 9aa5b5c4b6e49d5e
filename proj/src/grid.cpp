#include "odvs/grid.hpp"

#include <cmath>
#include <limits>

namespace odvs {

double GridParams::z() const { return std::hypot(r, x); }

GridParams GridParams::from_impedance(double vg, double z, double r_over_x) {
    const double denom = std::sqrt(1.0 + r_over_x * r_over_x);
    return GridParams{vg, z * r_over_x / denom, z / denom};
}

double CurrentPair::magnitude() const { return std::hypot(id, iq); }

std::optional<double> poc_voltage(const GridParams& g, const CurrentPair& i) {
    const double drop = g.r * i.iq + g.x * i.id;
    const double radicand = g.vg * g.vg - drop * drop;
    if (radicand < 0.0) return std::nullopt;
    return std::sqrt(radicand) + g.r * i.id - g.x * i.iq;
}

double poc_voltage_clamped(const GridParams& g, const CurrentPair& i) {
    const double drop = g.r * i.iq + g.x * i.id;
    const double radicand = std::max(0.0, g.vg * g.vg - drop * drop);
    return std::sqrt(radicand) + g.r * i.id - g.x * i.iq;
}

std::optional<double> active_power(const GridParams& g, const CurrentPair& i, double kappa) {
    const auto v = poc_voltage(g, i);
    if (!v) return std::nullopt;
    return kappa * *v * i.id;
}

ConstraintResiduals constraint_residuals(const GridParams& g, const Limits& lim,
                                         const CurrentPair& i) {
    ConstraintResiduals res{};
    res.gc = i.id * i.id + i.iq * i.iq - lim.i_max * lim.i_max;
    const auto p = active_power(g, i, lim.kappa);
    res.gp = p ? *p - lim.p_max : std::numeric_limits<double>::infinity();
    res.gs = std::abs(g.r * i.iq + g.x * i.id) - g.vg;
    return res;
}

bool is_feasible(const GridParams& g, const Limits& lim, const CurrentPair& i, double tol) {
    const auto res = constraint_residuals(g, lim, i);
    return res.gc <= tol && res.gp <= tol && res.gs <= tol;
}

}  // namespace odvs

#include "odvs/reduction.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace odvs {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double circle_gp(const GridParams& g, double i_max, double p_max, double kappa, double phi_deg) {
    const double phi = phi_deg / kDeg;
    const CurrentPair i{i_max * std::cos(phi), i_max * std::sin(phi)};
    return kappa * poc_voltage_clamped(g, i) * i.id - p_max;
}

}  // namespace

double impedance_angle_deg(const GridParams& g) { return std::atan2(-g.x, g.r) * kDeg; }

std::optional<double> v_on_circle(const GridParams& g, double i_max, double phi_deg) {
    const double phi = phi_deg / kDeg;
    return poc_voltage(g, {i_max * std::cos(phi), i_max * std::sin(phi)});
}

std::optional<Bounds1D> angle_bounds(const GridParams& g, double i_max, double p_max,
                                     double kappa) {
    if (!(g.vg > 0.0) || !(g.z() > 0.0) || !(i_max > 0.0)) return std::nullopt;
    const double phi_star = impedance_angle_deg(g);
    const double gamma = std::asin(std::min(1.0, g.vg / (g.z() * i_max))) * kDeg;
    double lo = std::max(phi_star - gamma, -90.0);
    double hi = std::min(phi_star + gamma, 0.0);
    if (lo > hi) return std::nullopt;
    // pull the window ends onto the numerically synchronized side
    for (int i = 0; i < 32 && !v_on_circle(g, i_max, lo) && lo < hi; ++i) lo += 1e-9;
    for (int i = 0; i < 32 && !v_on_circle(g, i_max, hi) && hi > lo; ++i) hi -= 1e-9;
    if (lo > hi || !v_on_circle(g, i_max, lo)) return std::nullopt;
    if (circle_gp(g, i_max, p_max, kappa, lo) > 0.0) return std::nullopt;
    // shrink the upper end to the last angle reachable from lo without
    // exceeding the power limit
    const double step = 0.1;
    double reach = lo;
    for (double phi = lo + step; reach < hi; phi += step) {
        if (phi > hi) phi = hi;
        if (circle_gp(g, i_max, p_max, kappa, phi) > 0.0) break;
        reach = phi;
    }
    return Bounds1D{lo, reach};
}

std::optional<double> id_on_power_boundary(const GridParams& g, double p_max, double kappa,
                                           double iq) {
    if (iq > 1e-12 || p_max < 0.0) return std::nullopt;
    if (p_max == 0.0) return 0.0;
    // id interval where a synchronized voltage exists: |r*iq + x*id| <= vg
    double dom_lo = 0.0;
    double dom_hi;
    if (g.x > 1e-12) {
        dom_lo = std::max(0.0, (-g.vg - g.r * iq) / g.x);
        dom_hi = (g.vg - g.r * iq) / g.x;
    } else {
        if (std::abs(g.r * iq) > g.vg) return std::nullopt;
        dom_hi = std::max(1.0, 1e3 * (1.0 + p_max) / std::max(g.vg, 1e-9));
    }
    if (dom_hi <= dom_lo) return std::nullopt;
    const auto residual = [&](double id) -> double {
        const auto p = active_power(g, {id, iq}, kappa);
        return p ? *p - p_max : std::numeric_limits<double>::quiet_NaN();
    };
    const int n = 256;
    double lo = dom_lo;
    double f_lo = residual(dom_lo);
    for (int j = 0; std::isnan(f_lo) && j < 8; ++j) {  // numeric dust at the domain edge
        lo = dom_lo + (dom_hi - dom_lo) * 1e-12 * std::pow(10.0, j);
        f_lo = residual(lo);
    }
    if (std::isnan(f_lo)) return std::nullopt;
    if (f_lo >= 0.0) {
        // the whole synchronized branch already carries at least p_max; the
        // boundary is unreachable from below at this reactive current
        return std::nullopt;
    }
    std::optional<double> hi;
    for (int j = 1; j <= n; ++j) {
        const double id = lo + (dom_hi - lo) * j / n;
        const double f = residual(id);
        if (std::isnan(f)) break;
        if (f >= 0.0) {
            hi = id;
            break;
        }
        lo = id;
    }
    if (!hi) return std::nullopt;
    double a = lo, b = *hi;
    while (b - a > 1e-10) {
        const double mid = 0.5 * (a + b);
        const double f = residual(mid);
        if (std::isnan(f) || f >= 0.0) {
            b = mid;
        } else {
            a = mid;
        }
    }
    return 0.5 * (a + b);
}

std::optional<double> v_on_power_boundary(const GridParams& g, double p_max, double kappa,
                                          double iq) {
    const auto id = id_on_power_boundary(g, p_max, kappa, iq);
    if (!id) return std::nullopt;
    return poc_voltage(g, {*id, iq});
}

std::optional<Bounds1D> iq_bounds(const GridParams& g, double i_max, double p_max, double kappa) {
    if (!(g.r > 0.0) || !(g.z() > 0.0) || !(i_max > 0.0)) return std::nullopt;
    double hi = iq_upper_closed_form(g, p_max, kappa);
    const double imax2 = i_max * i_max;
    const auto feasible = [&](double iq) -> bool {
        const auto id = id_on_power_boundary(g, p_max, kappa, iq);
        if (!id) return false;
        if (*id * *id + iq * iq > imax2) return false;
        return std::abs(g.r * iq + g.x * *id) <= g.vg;
    };
    for (int i = 0; i < 32 && !feasible(hi) && hi < 0.0; ++i) hi = std::min(0.0, hi + 1e-9);
    if (!feasible(hi)) return std::nullopt;
    const double step = 1e-3;
    const double floor_iq = -(i_max + 2.0 * step);
    double good = hi;
    double bad = floor_iq;
    bool hit = false;
    for (double iq = hi - step; iq > floor_iq; iq -= step) {
        if (!feasible(iq)) {
            bad = iq;
            hit = true;
            break;
        }
        good = iq;
    }
    if (!hit) return Bounds1D{good, hi};  // unreachable: the current circle must bind
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (bad + good);
        if (feasible(mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    return Bounds1D{good, hi};
}

double iq_upper_closed_form(const GridParams& g, double p_max, double kappa) {
    const double z2 = g.z() * g.z();
    return g.x / (2.0 * z2) * (g.vg - std::sqrt(g.vg * g.vg + 4.0 * z2 * p_max / (kappa * g.r)));
}

std::optional<double> iq_lower_cc_root(const GridParams& g, double i_max, double p_max,
                                       double kappa) {
    const auto residual = [&](double iq) {
        const double id = std::sqrt(std::max(0.0, i_max * i_max - iq * iq));
        return kappa * poc_voltage_clamped(g, {id, iq}) * id - p_max;
    };
    if (residual(0.0) < 0.0) return std::nullopt;  // circle never reaches the power limit
    double lo = -i_max, hi = 0.0;
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool cc_determines_iq_lower(const GridParams& g, double i_max, double p_max, double kappa) {
    const double z2 = g.z() * g.z();
    const double r2 = g.r * g.r;
    const double x2 = g.x * g.x;
    const double rhs = (r2 + z2) / (2.0 * r2 * z2) * g.vg * g.vg + p_max / (kappa * g.r) +
                       x2 * g.vg / (2.0 * r2 * z2) *
                           std::sqrt(g.vg * g.vg + 4.0 * z2 * g.r * p_max / (kappa * x2));
    return i_max * i_max >= rhs;
}

double iq_lower_ssc_closed_form(const GridParams& g, double p_max, double kappa) {
    const double z2 = g.z() * g.z();
    const double x2 = g.x * g.x;
    return -(g.r * g.r + z2) / (2.0 * g.r * z2) * g.vg -
           x2 / (2.0 * g.r * z2) *
               std::sqrt(g.vg * g.vg + 4.0 * z2 * g.r * p_max / (kappa * x2));
}

}  // namespace odvs

#include "odvs/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "odvs/reduction.hpp"

namespace odvs {

namespace {

double circle_power(const GridParams& g, double i_max, double kappa, double phi_rad) {
    const CurrentPair i{i_max * std::cos(phi_rad), i_max * std::sin(phi_rad)};
    return kappa * poc_voltage_clamped(g, i) * i.id;
}

}  // namespace

const char* to_string(OptimumStage stage) {
    switch (stage) {
        case OptimumStage::FullCurrent: return "full_current";
        case OptimumStage::CurrentPowerCorner: return "current_power_corner";
        case OptimumStage::PowerLimited: return "power_limited";
    }
    return "?";
}

CurrentPair full_current_optimum(const GridParams& g, double i_max) {
    const double z = g.z();
    return {g.r / z * i_max, -g.x / z * i_max};
}

std::optional<CurrentPair> corner_optimum(const GridParams& g, double i_max, double p_max,
                                          double kappa) {
    const double phi_star = std::atan2(-g.x, g.r);
    double lo = -std::numbers::pi / 2.0;
    double hi = phi_star;
    const double f_lo = circle_power(g, i_max, kappa, lo) - p_max;
    const double f_hi = circle_power(g, i_max, kappa, hi) - p_max;
    if (f_lo > 1e-12 || f_hi < -1e-12) return std::nullopt;
    // power rises monotonically from the -90 deg end toward the impedance
    // angle on the sampled grids; keep the power-feasible side on the left
    for (int iter = 0; iter < 100 && hi - lo > 1e-15; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (circle_power(g, i_max, kappa, mid) - p_max <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double phi = 0.5 * (lo + hi);
    return CurrentPair{i_max * std::cos(phi), i_max * std::sin(phi)};
}

CurrentPair power_limited_optimum(const GridParams& g, double p_max, double kappa) {
    const double z = g.z();
    const double s = std::sqrt(g.vg * g.vg + 4.0 * g.r * p_max / kappa);
    return {-(g.vg - s) / (2.0 * z), -g.x / (2.0 * g.r * z) * (g.vg + s)};
}

Thresholds thresholds(const GridParams& g, double i_max, double p_max, double kappa) {
    Thresholds th{};
    th.pb = kappa * (g.r / g.z() * g.vg * i_max + g.r * i_max * i_max);
    th.ib = power_limited_optimum(g, p_max, kappa).magnitude();
    return th;
}

OdvsSolution solve(const GridParams& g, const Limits& lim) {
    if (!(g.z() > 0.0) || !(g.r > 0.0)) {
        throw std::invalid_argument("solve: needs a resistive-inductive grid (r > 0, z > 0)");
    }
    const Thresholds th = thresholds(g, lim.i_max, lim.p_max, lim.kappa);
    OdvsSolution sol{};
    if (lim.p_max >= th.pb) {
        sol.stage = OptimumStage::FullCurrent;
        sol.optimum = full_current_optimum(g, lim.i_max);
    } else if (lim.i_max >= th.ib) {
        sol.stage = OptimumStage::PowerLimited;
        sol.optimum = power_limited_optimum(g, lim.p_max, lim.kappa);
    } else {
        sol.stage = OptimumStage::CurrentPowerCorner;
        const auto corner = corner_optimum(g, lim.i_max, lim.p_max, lim.kappa);
        if (!corner) {
            throw std::runtime_error("solve: power residual has no root on the admissible arc");
        }
        sol.optimum = *corner;
        const double gs = std::abs(g.r * sol.optimum.iq + g.x * sol.optimum.id) - g.vg;
        if (gs > 0.0) {
            // the corner lies beyond the synchronization boundary; the optimum
            // moves to the last feasible point walking down the power boundary
            const auto bounds = iq_bounds(g, lim.i_max, lim.p_max, lim.kappa);
            if (!bounds) {
                throw std::runtime_error("solve: no feasible power-boundary segment");
            }
            const auto id = id_on_power_boundary(g, lim.p_max, lim.kappa, bounds->lo);
            if (!id) {
                throw std::runtime_error("solve: power boundary lost at its lower end");
            }
            sol.optimum = {*id, bounds->lo};
        }
    }
    sol.v_star = poc_voltage_clamped(g, sol.optimum);
    return sol;
}

std::optional<OdvsSolution> brute_force_oracle(const GridParams& g, const Limits& lim,
                                               double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("brute_force_oracle: resolution <= 0");
    const double imax2 = lim.i_max * lim.i_max;
    const int n = static_cast<int>(std::floor(lim.i_max / resolution)) + 1;
    double best_v = -std::numeric_limits<double>::infinity();
    CurrentPair best{};
    for (int a = 0; a < n; ++a) {
        const double id = a * resolution;
        const double id2 = id * id;
        if (id2 > imax2) break;
        for (int b = 0; b < n; ++b) {
            const double iq = -(b * resolution);
            if (id2 + iq * iq > imax2) break;
            const double drop = g.r * iq + g.x * id;
            if (drop < -g.vg) break;  // only gets more negative as iq falls
            if (drop > g.vg) continue;
            const double v = std::sqrt(g.vg * g.vg - drop * drop) + g.r * id - g.x * iq;
            if (lim.kappa * v * id - lim.p_max > 1e-12) continue;
            if (v > best_v) {
                best_v = v;
                best = {id, iq};
            }
        }
    }
    if (!std::isfinite(best_v)) return std::nullopt;
    const Thresholds th = thresholds(g, lim.i_max, lim.p_max, lim.kappa);
    OdvsSolution sol{};
    sol.stage = lim.p_max >= th.pb    ? OptimumStage::FullCurrent
                : lim.i_max >= th.ib ? OptimumStage::PowerLimited
                                     : OptimumStage::CurrentPowerCorner;
    sol.optimum = best;
    sol.v_star = best_v;
    return sol;
}

}  // namespace odvs

#include "odvs/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace odvs {

namespace {

Bounds1D seek_bounds(SeekMode mode, double i_max) {
    // physical stand-ins for the model-unavailable search windows: the angle
    // stays in the fourth quadrant, the reactive current inside the circle
    return mode == SeekMode::Angle ? Bounds1D{-90.0, 0.0} : Bounds1D{-i_max, 0.0};
}

}  // namespace

const char* to_string(SeekMode mode) {
    return mode == SeekMode::Angle ? "angle" : "iq";
}

double frozen_angle_deg() { return -45.0; }

double frozen_iq(double i_max) { return -i_max / 4.0; }

ControllerState make_dvs_controller(const ControllerParams& p, double vdc_ref) {
    ControllerState c{};
    c.mode = SeekMode::Angle;
    c.seeker = SeekerState{p.x0_angle_deg, p.d0, 0, 0.0};
    c.vdc_ref = vdc_ref;
    return c;
}

ControllerState model_free_step(const ControllerState& ctrl, const Measurements& meas,
                                const Limits& lim, const ControllerParams& p) {
    ControllerState c = ctrl;

    if (p.freezing_enabled) {
        const double dev = std::abs(meas.f_pll - p.f_nominal_hz);
        if (!c.frozen) {
            if (dev >= p.delta_f_hz) {
                c.frozen = true;
                c.in_band_ticks = 0;
                // park the iterate on the frozen setpoint so the seek resumes
                // from a synchronizable point
                c.seeker.x = c.mode == SeekMode::Angle ? frozen_angle_deg() : frozen_iq(lim.i_max);
                if (c.seeker.k == 0) c.seeker.k = 1;
            }
        } else if (dev < p.delta_f_hz) {
            if (++c.in_band_ticks >= p.unfreeze_debounce) {
                c.frozen = false;
                c.in_band_ticks = 0;
            }
        } else {
            c.in_band_ticks = 0;
        }
    }

    if (c.mode == SeekMode::Angle && meas.vdc_filt <= p.rho * c.vdc_ref) {
        // one-way switch: the dc source cannot afford the full-current stage
        c.mode = SeekMode::ReactiveCurrent;
        c.seeker = SeekerState{p.x0_iq, p.d0, 0, 0.0};
        // hand the dc loop an integrator matching the power currently exported
        const double v = std::max(meas.v_poc, 1e-6);
        c.pi_integrator = std::clamp(meas.p_ac / (lim.kappa * v), 0.0, lim.i_max);
        return c;  // the reseeded seeker warms up on the next tick
    }

    if (c.frozen) {
        c.seeker.v_prev = meas.v_poc;  // keep the comparison fresh while parked
    } else if (c.seeker.k == 0) {
        c.seeker.v_prev = meas.v_poc;  // warm-up read, no move
        c.seeker.k = 1;
    } else {
        const StepSchedule& sched =
            c.mode == SeekMode::Angle ? p.angle_schedule : p.iq_schedule;
        c.seeker = po_step(c.seeker, meas.v_poc, sched, seek_bounds(c.mode, lim.i_max));
    }
    return c;
}

CurrentPair model_free_command(ControllerState& c, const Measurements& meas, const Limits& lim,
                               const ControllerParams& p, double dt) {
    if (c.mode == SeekMode::Angle) {
        const double phi_deg = c.frozen ? frozen_angle_deg() : c.seeker.x;
        const double phi = phi_deg * std::numbers::pi / 180.0;
        return {lim.i_max * std::cos(phi), lim.i_max * std::sin(phi)};
    }
    const double iq = c.frozen ? frozen_iq(lim.i_max) : c.seeker.x;
    const double id_cap = std::sqrt(std::max(0.0, lim.i_max * lim.i_max - iq * iq));
    const double id =
        dc_voltage_pi(c.pi_integrator, meas.vdc, c.vdc_ref, p.pi_kp, p.pi_ki, dt, 0.0, id_cap);
    return {id, iq};
}

CurrentPair model_based_step(const GridParams& grid, const Limits& lim) {
    return solve(grid, lim).optimum;
}

CurrentPair droop_step(ControllerState& c, const Measurements& meas, const Limits& lim,
                       const ControllerParams& p, double dt) {
    const double v = meas.v_poc;
    double iq;
    if (v <= 0.5) {
        iq = -lim.i_max;
    } else if (v < 0.9) {
        iq = (0.9 - v) / (0.5 - 0.9) * lim.i_max;
    } else {
        iq = 0.0;
    }
    const double id_cap = std::sqrt(std::max(0.0, lim.i_max * lim.i_max - iq * iq));
    const double id =
        dc_voltage_pi(c.pi_integrator, meas.vdc, c.vdc_ref, p.pi_kp, p.pi_ki, dt, 0.0, id_cap);
    return {id, iq};
}

double dc_voltage_pi(double& integrator, double vdc, double vdc_ref, double kp, double ki,
                     double dt, double out_lo, double out_hi) {
    const double err = vdc - vdc_ref;
    integrator += ki * err * dt;
    double u = kp * err + integrator;
    if (u > out_hi) {
        integrator = out_hi - kp * err;
        u = out_hi;
    } else if (u < out_lo) {
        integrator = out_lo - kp * err;
        u = out_lo;
    }
    return u;
}

}  // namespace odvs

#pragma once

#include "odvs/analytic.hpp"
#include "odvs/plant.hpp"
#include "odvs/seeker.hpp"

namespace odvs {

// Which variable the model-free controller perturbs: the power factor angle
// on the current boundary, or the reactive current on the power boundary.
enum class SeekMode { Angle, ReactiveCurrent };

const char* to_string(SeekMode mode);

struct ControllerParams {
    double rho = 0.95;           // dc-voltage mode-switch threshold fraction
    double delta_f_hz = 0.3;     // freezing band about the nominal frequency
    double f_nominal_hz = 60.0;
    double v_trigger = 0.9;      // voltage-support trigger level (pu)
    double pi_kp = 20.0;
    double pi_ki = 800.0;        // 1/s
    double x0_angle_deg = -45.0;
    double x0_iq = -0.75;        // pu
    int d0 = -1;
    StepSchedule angle_schedule{15.0, 1.0};
    StepSchedule iq_schedule{0.2, 1.0};
    bool freezing_enabled = true;
    int unfreeze_debounce = 2;   // consecutive in-band samples before unfreezing
};

struct ControllerState {
    SeekMode mode = SeekMode::Angle;
    bool frozen = false;
    int in_band_ticks = 0;
    SeekerState seeker;
    double pi_integrator = 0.0;
    double vdc_ref = 1.0;  // dc reference held from immediately before the dip
};

// Fixed outputs while the seeker is frozen.
double frozen_angle_deg();
double frozen_iq(double i_max);

ControllerState make_dvs_controller(const ControllerParams& params, double vdc_ref);

// One optimum-seeking tick: freezing hysteresis on the frequency deviation,
// the one-way angle-to-reactive-current mode switch on dc-voltage sag, then
// one perturb-and-observe step (or a warm-up read).
ControllerState model_free_step(const ControllerState& ctrl, const Measurements& meas,
                                const Limits& limits, const ControllerParams& params);

// Command synthesis at plant rate. Angle mode is a feedforward full-current
// injection; reactive-current mode closes the dc voltage loop on id, clamped
// so the current magnitude never exceeds the limit.
CurrentPair model_free_command(ControllerState& ctrl, const Measurements& meas,
                               const Limits& limits, const ControllerParams& params, double dt);

// Benchmark controller with the true grid parameters.
CurrentPair model_based_step(const GridParams& grid, const Limits& limits);

// Piecewise-linear reactive droop with reactive priority; id from the dc PI.
CurrentPair droop_step(ControllerState& ctrl, const Measurements& meas, const Limits& limits,
                       const ControllerParams& params, double dt);

// PI on (vdc - vdc_ref) with output clamping and integrator back-calculation.
double dc_voltage_pi(double& integrator, double vdc, double vdc_ref, double kp, double ki,
                     double dt, double out_lo, double out_hi);

}  // namespace odvs

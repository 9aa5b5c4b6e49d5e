#pragma once

#include "odvs/grid.hpp"

namespace odvs {

// Parametric PV array surrogate: current-source ramp below the MPP voltage,
// parabolic rolloff between MPP and open circuit.
struct PvCurve {
    double p_stc = 1.0;  // MPP power at 1000 W/m^2 (pu)
    double v_mpp = 1.0;  // MPP dc voltage (pu of the dc base)
    double v_oc = 1.19;  // open-circuit dc voltage (pu)
};

double pv_power(const PvCurve& curve, double vdc, double irradiance);

struct PlantConstants {
    PvCurve pv;
    double kappa = 1.0;
    double tau_dc = 0.05;     // dc-link inertia constant (s)
    double tau_f = 0.01;      // dc measurement lag (s)
    double tau_pll = 0.05;    // frequency relaxation after resync (s)
    double k_los = 120.0;     // drift per unit of normalized violation (Hz/s)
    double f_nominal = 60.0;  // Hz
};

struct PlantState {
    GridParams grid;
    double vdc = 1.0;
    double vdc_filt = 1.0;
    double f_pll = 60.0;
    double irradiance = 1000.0;  // W/m^2
    double t = 0.0;              // s
};

struct Measurements {
    double v_poc = 0.0;
    double vdc = 0.0;
    double vdc_filt = 0.0;
    double f_pll = 0.0;
    double p_ac = 0.0;
    double p_pv = 0.0;
    bool sync_ok = true;
};

struct PlantStepResult {
    PlantState state;
    Measurements meas;
};

// One quasi-static step: PoC voltage from the applied command (radicand
// clamped at zero while synchronism is lost, ac power conservatively zero),
// explicit-Euler energy balance on vdc^2, first-order dc measurement lag,
// and the loss-of-synchronism frequency surrogate.
PlantStepResult plant_step(const PlantState& state, const CurrentPair& command,
                           const PlantConstants& constants, double dt);

// Replaces the Thevenin equivalent; all other state is continuous.
PlantState apply_dip(const PlantState& state, const GridParams& new_grid);

}  // namespace odvs

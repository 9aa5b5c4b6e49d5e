#include "odvs/plant.hpp"

#include <algorithm>
#include <cmath>

namespace odvs {

double pv_power(const PvCurve& c, double vdc, double irradiance) {
    const double p_mpp = c.p_stc * irradiance / 1000.0;
    if (vdc <= c.v_mpp) return p_mpp * (vdc / c.v_mpp);
    if (vdc >= c.v_oc) return 0.0;
    const double u = (vdc - c.v_mpp) / (c.v_oc - c.v_mpp);
    return p_mpp * (1.0 - u * u);
}

PlantStepResult plant_step(const PlantState& s, const CurrentPair& cmd,
                           const PlantConstants& c, double dt) {
    const double drop = s.grid.r * cmd.iq + s.grid.x * cmd.id;
    const bool sync = std::abs(drop) <= s.grid.vg;
    const double v_poc = poc_voltage_clamped(s.grid, cmd);
    const double p_pv = pv_power(c.pv, s.vdc, s.irradiance);
    const double p_ac = sync ? c.kappa * v_poc * cmd.id : 0.0;

    PlantState n = s;
    const double vdc2 = s.vdc * s.vdc + dt / c.tau_dc * (p_pv - p_ac);
    n.vdc = std::sqrt(std::max(vdc2, 1e-12));
    n.vdc_filt = s.vdc_filt + dt / c.tau_f * (n.vdc - s.vdc_filt);
    if (sync) {
        n.f_pll = s.f_pll + dt / c.tau_pll * (c.f_nominal - s.f_pll);
    } else {
        n.f_pll = s.f_pll + dt * c.k_los * (std::abs(drop) - s.grid.vg) / s.grid.z();
    }
    n.t = s.t + dt;

    return {n, Measurements{v_poc, n.vdc, n.vdc_filt, n.f_pll, p_ac, p_pv, sync}};
}

PlantState apply_dip(const PlantState& s, const GridParams& new_grid) {
    PlantState n = s;
    n.grid = new_grid;
    return n;
}

}  // namespace odvs

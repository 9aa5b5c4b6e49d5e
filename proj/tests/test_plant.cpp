#include <cmath>
#include <random>

#include "doctest.h"
#include "odvs/plant.hpp"

using namespace odvs;
using doctest::Approx;

namespace {

PlantConstants default_constants() {
    PlantConstants c;
    c.kappa = 1.0;
    return c;
}

}  // namespace

TEST_CASE("pv curve") {
    const PvCurve pv;
    CHECK(pv_power(pv, 1.0, 1000.0) == Approx(1.0));
    CHECK(pv_power(pv, 1.19, 700.0) == Approx(0.0));
    CHECK(pv_power(pv, 1.3, 1000.0) == Approx(0.0));
    CHECK(pv_power(pv, 0.5, 1000.0) == Approx(0.5));
    // self-protection equilibrium for a 0.7379 pu export at full sun
    CHECK(pv_power(pv, 1.0972718, 1000.0) == Approx(0.7379).epsilon(1e-4));
}

TEST_CASE("dc link explicit-Euler update") {
    PlantConstants c = default_constants();
    c.tau_dc = 0.05;
    PlantState s{GridParams::from_impedance(0.4, 0.1, 2.0), 1.0, 1.0, 60.0, 400.0, 0.0};
    // p_pv = 0.4 at the MPP voltage; command exporting 0.738 discharges the link
    const CurrentPair cmd{1.3416407865, -0.6708203932};
    const auto r = plant_step(s, cmd, c, 1e-3);
    CHECK(r.meas.p_pv == Approx(0.4));
    CHECK(r.meas.p_ac == Approx(0.7379024).epsilon(1e-6));
    CHECK(r.state.vdc == Approx(0.99662).epsilon(1e-5));
}

TEST_CASE("dc energy bookkeeping is exact over random sequences") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u_i(0.0, 1.5), u_q(-1.5, 0.0), u_g(0.0, 1000.0);
    PlantConstants c = default_constants();
    PlantState s{GridParams::from_impedance(0.4, 0.1, 2.0), 1.0, 1.0, 60.0, 800.0, 0.0};
    const double dt = 1e-3;
    for (int n = 0; n < 500; ++n) {
        s.irradiance = u_g(rng);
        const CurrentPair cmd{u_i(rng), u_q(rng)};
        const auto r = plant_step(s, cmd, c, dt);
        const double lhs = (r.state.vdc * r.state.vdc - s.vdc * s.vdc) * c.tau_dc / dt;
        CHECK(lhs == Approx(r.meas.p_pv - r.meas.p_ac).epsilon(1e-10).scale(1.0));
        s = r.state;
    }
}

TEST_CASE("power balance leaves the dc voltage unchanged") {
    PlantConstants c = default_constants();
    PlantState s{GridParams::from_impedance(1.0, 0.05, 2.0), 1.0, 1.0, 60.0, 1000.0, 0.0};
    // pick the irradiance that makes the source match this command exactly
    const CurrentPair cmd{0.8, -0.2};
    const double p_ac = poc_voltage_clamped(s.grid, cmd) * cmd.id;
    s.irradiance = 1000.0 * p_ac;  // p_pv = p_ac at the MPP voltage
    const auto r = plant_step(s, cmd, c, 1e-3);
    CHECK(r.state.vdc == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dc voltage rises to the self-protection equilibrium") {
    PlantConstants c = default_constants();
    PlantState s{GridParams::from_impedance(0.4, 0.1, 2.0), 1.0, 1.0, 60.0, 1000.0, 0.0};
    const CurrentPair cmd{1.3416407865, -0.6708203932};  // exports 0.7379 pu
    for (int n = 0; n < 3000; ++n) s = plant_step(s, cmd, c, 1e-3).state;
    CHECK(s.vdc == Approx(1.0972718).epsilon(1e-4));  // about 554 V on a 505 V base
}

TEST_CASE("persistent overload drags the filtered dc voltage below the switch level") {
    PlantConstants c = default_constants();
    PlantState s{GridParams::from_impedance(0.4, 0.1, 2.0), 1.0, 1.0, 60.0, 400.0, 0.0};
    const CurrentPair cmd{1.3416407865, -0.6708203932};  // demands 0.7379 > 0.4 available
    bool crossed = false;
    for (int n = 0; n < 2000 && !crossed; ++n) {
        const auto r = plant_step(s, cmd, c, 1e-3);
        s = r.state;
        crossed = r.meas.vdc_filt <= 0.95;
    }
    CHECK(crossed);
}

TEST_CASE("loss of synchronism drives the frequency surrogate") {
    PlantConstants c = default_constants();
    PlantState s{GridParams::from_impedance(0.05, 0.1, 2.0), 1.0, 1.0, 60.0, 100.0, 0.0};
    const auto r = plant_step(s, {1.5, 0.0}, c, 1e-3);
    CHECK(!r.meas.sync_ok);
    CHECK(r.meas.p_ac == Approx(0.0));
    CHECK(r.state.f_pll > 60.0);

    // after the violation clears, the frequency relaxes toward nominal
    PlantState d = r.state;
    const double dev0 = d.f_pll - 60.0;
    for (int n = 0; n < static_cast<int>(5.0 * c.tau_pll / 1e-3); ++n) {
        d = plant_step(d, {0.0, 0.0}, c, 1e-3).state;
    }
    CHECK(std::abs(d.f_pll - 60.0) < 0.01 * dev0);
}

TEST_CASE("apply_dip swaps the grid and keeps the rest of the state") {
    PlantState s{GridParams::from_impedance(1.0, 0.05, 2.0), 1.02, 1.01, 60.1, 800.0, 1.5};
    const GridParams post = GridParams::from_impedance(0.4, 0.1, 2.0);
    const PlantState after = apply_dip(s, post);
    CHECK(after.grid.vg == Approx(0.4));
    CHECK(after.grid.z() == Approx(0.1));
    CHECK(after.vdc == s.vdc);
    CHECK(after.vdc_filt == s.vdc_filt);
    CHECK(after.f_pll == s.f_pll);
    CHECK(after.t == s.t);

    const PlantState same = apply_dip(s, s.grid);
    CHECK(same.grid.vg == s.grid.vg);
    CHECK(same.vdc == s.vdc);
}

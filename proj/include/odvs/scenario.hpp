#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "odvs/plant.hpp"
#include "odvs/strategies.hpp"

namespace odvs {

enum class Strategy { ModelFree, ModelBased, Droop };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a closed-loop run needs. Defaults describe the common test rig:
// 250 kW machine base, pre-fault short-circuit ratio 20, post-fault 10,
// R/X = 2, 1.5 pu current limit, 30 Hz seeker sampling.
struct Scenario {
    std::string name = "custom";
    Strategy strategy = Strategy::ModelFree;
    unsigned long long seed = 1;

    GridParams grid_prefault = GridParams::from_impedance(1.0, 0.05, 2.0);
    GridParams grid_postfault = GridParams::from_impedance(0.4, 0.1, 2.0);

    double i_max = 1.5;
    double kappa = 1.0;

    PvCurve pv;
    double irradiance = 1000.0;  // W/m^2

    double dt = 1e-3;          // plant step (s)
    double t_prefault = 0.2;   // settle time before the dip (s)
    double t_end = 3.0;        // simulated time after the dip (s)
    double os_rate_hz = 30.0;  // seeker sampling rate

    ControllerParams controller;
    PlantConstants plant;  // pv/kappa/f_nominal synced by finalize()

    double vdc_base_volts = 505.0;  // dc base used only for SI reporting

    // MPP of the PV curve at the scenario irradiance; the effective available
    // power for analytic comparisons.
    double effective_p_max() const;
    Limits limits() const;
    // Plant steps per seeker tick (the tick period snaps to a multiple of dt).
    int os_steps_per_tick() const;

    // Copies the shared fields into the nested plant constants and validates.
    void finalize();
};

bool is_preset_name(const std::string& name);
Scenario preset_scenario(const std::string& name);  // caseA .. caseD

// Strict parser: unknown or malformed keys are errors with line context.
Scenario load_scenario(const std::filesystem::path& path);
Scenario load_scenario_or_preset(const std::string& name_or_path);

// Canonical file form of a scenario (the format load_scenario accepts).
std::string scenario_to_toml(const Scenario& sc);

}  // namespace odvs

#include "odvs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace odvs {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Strips an end-of-line comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

struct GridSpec {
    double vg = 1.0;
    double z = 0.1;
    double r_over_x = 2.0;
    GridParams build() const { return GridParams::from_impedance(vg, z, r_over_x); }
};

// Mutable view of a scenario while keys are applied.
struct Draft {
    Scenario sc;
    GridSpec pre{1.0, 0.05, 2.0};
    GridSpec post{0.4, 0.1, 2.0};
};

using Setter = std::function<void(Draft&, const std::string&, int line)>;

[[noreturn]] void fail(int line, const std::string& what) {
    throw ScenarioError("line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& raw, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) fail(line, "malformed number '" + raw + "'");
        return v;
    } catch (const ScenarioError&) {
        throw;
    } catch (...) {
        fail(line, "malformed number '" + raw + "'");
    }
}

bool parse_bool(const std::string& raw, int line) {
    if (raw == "true") return true;
    if (raw == "false") return false;
    fail(line, "expected true/false, got '" + raw + "'");
}

std::string parse_string(const std::string& raw, int line) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') {
        fail(line, "expected a quoted string, got '" + raw + "'");
    }
    return raw.substr(1, raw.size() - 2);
}

Setter num(double Scenario::* field) {
    return [field](Draft& d, const std::string& raw, int line) {
        d.sc.*field = parse_number(raw, line);
    };
}

Setter num_at(std::function<double&(Draft&)> ref) {
    return [ref](Draft& d, const std::string& raw, int line) { ref(d) = parse_number(raw, line); };
}

const std::map<std::string, Setter>& key_table() {
    static const std::map<std::string, Setter> table = {
        {"strategy",
         [](Draft& d, const std::string& raw, int line) {
             try {
                 d.sc.strategy = strategy_from_string(parse_string(raw, line));
             } catch (const std::invalid_argument& e) {
                 fail(line, e.what());
             }
         }},
        {"freezing_enabled",
         [](Draft& d, const std::string& raw, int line) {
             d.sc.controller.freezing_enabled = parse_bool(raw, line);
         }},
        {"seed",
         [](Draft& d, const std::string& raw, int line) {
             const double v = parse_number(raw, line);
             if (v < 0 || v != std::floor(v)) fail(line, "seed must be a nonnegative integer");
             d.sc.seed = static_cast<unsigned long long>(v);
         }},
        {"grid.prefault.vg", num_at([](Draft& d) -> double& { return d.pre.vg; })},
        {"grid.prefault.z", num_at([](Draft& d) -> double& { return d.pre.z; })},
        {"grid.prefault.r_over_x", num_at([](Draft& d) -> double& { return d.pre.r_over_x; })},
        {"grid.postfault.vg", num_at([](Draft& d) -> double& { return d.post.vg; })},
        {"grid.postfault.z", num_at([](Draft& d) -> double& { return d.post.z; })},
        {"grid.postfault.r_over_x", num_at([](Draft& d) -> double& { return d.post.r_over_x; })},
        {"limits.i_max", num(&Scenario::i_max)},
        {"limits.kappa", num(&Scenario::kappa)},
        {"pv.p_stc", num_at([](Draft& d) -> double& { return d.sc.pv.p_stc; })},
        {"pv.v_mpp", num_at([](Draft& d) -> double& { return d.sc.pv.v_mpp; })},
        {"pv.v_oc", num_at([](Draft& d) -> double& { return d.sc.pv.v_oc; })},
        {"pv.irradiance", num(&Scenario::irradiance)},
        {"timing.dt", num(&Scenario::dt)},
        {"timing.t_prefault", num(&Scenario::t_prefault)},
        {"timing.t_end", num(&Scenario::t_end)},
        {"timing.os_rate_hz", num(&Scenario::os_rate_hz)},
        {"controller.rho", num_at([](Draft& d) -> double& { return d.sc.controller.rho; })},
        {"controller.delta_f_hz",
         num_at([](Draft& d) -> double& { return d.sc.controller.delta_f_hz; })},
        {"controller.f_nominal_hz",
         num_at([](Draft& d) -> double& { return d.sc.controller.f_nominal_hz; })},
        {"controller.v_trigger",
         num_at([](Draft& d) -> double& { return d.sc.controller.v_trigger; })},
        {"controller.pi_kp", num_at([](Draft& d) -> double& { return d.sc.controller.pi_kp; })},
        {"controller.pi_ki", num_at([](Draft& d) -> double& { return d.sc.controller.pi_ki; })},
        {"controller.x0_angle_deg",
         num_at([](Draft& d) -> double& { return d.sc.controller.x0_angle_deg; })},
        {"controller.x0_iq", num_at([](Draft& d) -> double& { return d.sc.controller.x0_iq; })},
        {"controller.d0",
         [](Draft& d, const std::string& raw, int line) {
             const double v = parse_number(raw, line);
             if (v != 1.0 && v != -1.0) fail(line, "d0 must be -1 or 1");
             d.sc.controller.d0 = static_cast<int>(v);
         }},
        {"controller.lambda_angle",
         num_at([](Draft& d) -> double& { return d.sc.controller.angle_schedule.lambda; })},
        {"controller.lambda_iq",
         num_at([](Draft& d) -> double& { return d.sc.controller.iq_schedule.lambda; })},
        {"controller.p_exponent",
         [](Draft& d, const std::string& raw, int line) {
             const double v = parse_number(raw, line);
             d.sc.controller.angle_schedule.p = v;
             d.sc.controller.iq_schedule.p = v;
         }},
        {"controller.unfreeze_debounce",
         [](Draft& d, const std::string& raw, int line) {
             const double v = parse_number(raw, line);
             if (v < 1 || v != std::floor(v)) fail(line, "unfreeze_debounce must be a positive integer");
             d.sc.controller.unfreeze_debounce = static_cast<int>(v);
         }},
        {"plant.tau_dc", num_at([](Draft& d) -> double& { return d.sc.plant.tau_dc; })},
        {"plant.tau_f", num_at([](Draft& d) -> double& { return d.sc.plant.tau_f; })},
        {"plant.tau_pll", num_at([](Draft& d) -> double& { return d.sc.plant.tau_pll; })},
        {"plant.k_los", num_at([](Draft& d) -> double& { return d.sc.plant.k_los; })},
        {"plant.vdc_base_volts", num(&Scenario::vdc_base_volts)},
    };
    return table;
}

}  // namespace

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::ModelFree: return "model_free";
        case Strategy::ModelBased: return "model_based";
        case Strategy::Droop: return "droop";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "model_free") return Strategy::ModelFree;
    if (s == "model_based") return Strategy::ModelBased;
    if (s == "droop") return Strategy::Droop;
    throw std::invalid_argument("unknown strategy '" + s + "'");
}

double Scenario::effective_p_max() const { return pv.p_stc * irradiance / 1000.0; }

Limits Scenario::limits() const { return Limits{i_max, effective_p_max(), kappa}; }

int Scenario::os_steps_per_tick() const {
    return std::max(1, static_cast<int>(std::lround(1.0 / (os_rate_hz * dt))));
}

void Scenario::finalize() {
    plant.kappa = kappa;
    plant.f_nominal = controller.f_nominal_hz;
    if (!(dt > 0.0)) throw ScenarioError("timing.dt must be positive");
    if (!(t_end > 0.0)) throw ScenarioError("timing.t_end must be positive");
    if (t_prefault < 0.0) throw ScenarioError("timing.t_prefault must be nonnegative");
    if (!(os_rate_hz > 0.0)) throw ScenarioError("timing.os_rate_hz must be positive");
    if (!(i_max > 0.0)) throw ScenarioError("limits.i_max must be positive");
    if (kappa != 1.0 && kappa != 1.5) throw ScenarioError("limits.kappa must be 1 or 1.5");
    if (!(pv.v_mpp > 0.0) || !(pv.v_oc > pv.v_mpp)) {
        throw ScenarioError("pv curve requires 0 < v_mpp < v_oc");
    }
    if (irradiance < 0.0) throw ScenarioError("pv.irradiance must be nonnegative");
    if (grid_postfault.z() <= 0.0 || grid_prefault.z() <= 0.0) {
        throw ScenarioError("grid impedance must be positive");
    }
    if (grid_postfault.vg < 0.0 || grid_prefault.vg < 0.0) {
        throw ScenarioError("grid voltage must be nonnegative");
    }
}

bool is_preset_name(const std::string& name) {
    return name == "caseA" || name == "caseB" || name == "caseC" || name == "caseD";
}

Scenario preset_scenario(const std::string& name) {
    Scenario sc;
    sc.name = name;
    if (name == "caseA") {
        sc.grid_postfault = GridParams::from_impedance(0.4, 0.1, 2.0);
        sc.irradiance = 1000.0;
    } else if (name == "caseB") {
        sc.grid_postfault = GridParams::from_impedance(0.4, 0.1, 2.0);
        sc.irradiance = 400.0;
    } else if (name == "caseC") {
        sc.grid_postfault = GridParams::from_impedance(0.1, 0.1, 2.0);
        sc.irradiance = 100.0;
        sc.pv.p_stc = 0.9;  // weak-sun MPP so the available power is 0.09 pu
    } else if (name == "caseD") {
        sc.grid_postfault = GridParams::from_impedance(0.05, 0.1, 2.0);
        sc.irradiance = 100.0;
        sc.pv.p_stc = 0.9;
    } else {
        throw ScenarioError("unknown preset '" + name + "'");
    }
    sc.finalize();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());

    Draft draft;
    draft.sc.name = path.stem().string();

    std::string line;
    std::string prefix;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail(line_no, "unterminated table header");
            prefix = trim(body.substr(1, body.size() - 2));
            if (prefix.empty()) fail(line_no, "empty table header");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        const auto& table = key_table();
        const auto it = table.find(full);
        if (it == table.end()) fail(line_no, "unknown key '" + full + "'");
        it->second(draft, value, line_no);
    }

    draft.sc.grid_prefault = draft.pre.build();
    draft.sc.grid_postfault = draft.post.build();
    draft.sc.finalize();
    return draft.sc;
}

Scenario load_scenario_or_preset(const std::string& name_or_path) {
    if (is_preset_name(name_or_path)) return preset_scenario(name_or_path);
    return load_scenario(name_or_path);
}

std::string scenario_to_toml(const Scenario& sc) {
    std::ostringstream os;
    os.precision(17);
    const auto grid_block = [&](const char* table, const GridParams& g) {
        os << "[grid." << table << "]\n";
        os << "vg = " << g.vg << "\n";
        os << "z = " << g.z() << "\n";
        os << "r_over_x = " << (g.x > 0.0 ? g.r / g.x : 0.0) << "\n\n";
    };
    os << "strategy = \"" << to_string(sc.strategy) << "\"\n";
    os << "freezing_enabled = " << (sc.controller.freezing_enabled ? "true" : "false") << "\n";
    os << "seed = " << sc.seed << "\n\n";
    grid_block("prefault", sc.grid_prefault);
    grid_block("postfault", sc.grid_postfault);
    os << "[limits]\n";
    os << "i_max = " << sc.i_max << "\n";
    os << "kappa = " << sc.kappa << "\n\n";
    os << "[pv]\n";
    os << "p_stc = " << sc.pv.p_stc << "\n";
    os << "v_mpp = " << sc.pv.v_mpp << "\n";
    os << "v_oc = " << sc.pv.v_oc << "\n";
    os << "irradiance = " << sc.irradiance << "\n\n";
    os << "[timing]\n";
    os << "dt = " << sc.dt << "\n";
    os << "t_prefault = " << sc.t_prefault << "\n";
    os << "t_end = " << sc.t_end << "\n";
    os << "os_rate_hz = " << sc.os_rate_hz << "\n\n";
    os << "[controller]\n";
    os << "rho = " << sc.controller.rho << "\n";
    os << "delta_f_hz = " << sc.controller.delta_f_hz << "\n";
    os << "f_nominal_hz = " << sc.controller.f_nominal_hz << "\n";
    os << "v_trigger = " << sc.controller.v_trigger << "\n";
    os << "pi_kp = " << sc.controller.pi_kp << "\n";
    os << "pi_ki = " << sc.controller.pi_ki << "\n";
    os << "x0_angle_deg = " << sc.controller.x0_angle_deg << "\n";
    os << "x0_iq = " << sc.controller.x0_iq << "\n";
    os << "d0 = " << sc.controller.d0 << "\n";
    os << "lambda_angle = " << sc.controller.angle_schedule.lambda << "\n";
    os << "lambda_iq = " << sc.controller.iq_schedule.lambda << "\n";
    os << "p_exponent = " << sc.controller.angle_schedule.p << "\n";
    os << "unfreeze_debounce = " << sc.controller.unfreeze_debounce << "\n\n";
    os << "[plant]\n";
    os << "tau_dc = " << sc.plant.tau_dc << "\n";
    os << "tau_f = " << sc.plant.tau_f << "\n";
    os << "tau_pll = " << sc.plant.tau_pll << "\n";
    os << "k_los = " << sc.plant.k_los << "\n";
    os << "vdc_base_volts = " << sc.vdc_base_volts << "\n";
    return os.str();
}

}  // namespace odvs

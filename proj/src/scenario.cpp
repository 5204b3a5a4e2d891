#include "smrac/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace smrac {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(where, "unknown field '" + it.key() + "'");
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

Vector as_vector(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected a numeric array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[i] = as_number(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

Matrix as_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a nested numeric array");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) fail(where, "expected a nested numeric array");
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) fail(where, "ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = as_number(j[r][c], where + "[" + std::to_string(r) + "]");
    }
    return m;
}

std::vector<double> as_gain_list(const json& j, std::size_t M, const std::string& where) {
    std::vector<double> g;
    if (j.is_number()) {
        g.assign(M, j.get<double>());
    } else if (j.is_array()) {
        if (j.size() != M) fail(where, "expected a scalar or a list of M values");
        for (const auto& v : j) g.push_back(as_number(v, where));
    } else {
        fail(where, "expected a scalar or a list of M values");
    }
    for (double v : g)
        if (!(v > 0.0)) fail(where, "gains must be > 0");
    return g;
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) arr.push_back(v[i]);
    return arr;
}

} // namespace

SimulationConfig parse_scenario_text(const std::string& text, const std::string& source_name,
                                     bool validate) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(source_name + ":" + std::to_string(line_of_byte(text, e.byte)),
             std::string("parse error: ") + e.what());
    }
    if (!root.is_object()) fail(source_name, "scenario must be an object");
    require_keys(root,
                 {"reference_model", "subsystems", "schedule", "gains", "initial_conditions",
                  "signal", "simulation"},
                 source_name);

    SimulationConfig cfg;

    if (!root.contains("reference_model")) fail(source_name, "missing [reference_model]");
    {
        const json& rm = root["reference_model"];
        require_keys(rm, {"A", "B"}, "reference_model");
        if (!rm.contains("A") || !rm.contains("B")) fail("reference_model", "needs A and B");
        cfg.ref.A_m = as_matrix(rm["A"], "reference_model.A");
        cfg.ref.B_m = as_matrix(rm["B"], "reference_model.B");
    }

    if (!root.contains("subsystems") || !root["subsystems"].is_array() ||
        root["subsystems"].empty())
        fail(source_name, "missing non-empty [[subsystems]]");
    int index = 1;
    for (const auto& s : root["subsystems"]) {
        const std::string where = "subsystems[" + std::to_string(index - 1) + "]";
        require_keys(s, {"A", "B"}, where);
        if (!s.contains("A") || !s.contains("B")) fail(where, "needs A and B");
        SubsystemParams sub;
        sub.index = index++;
        sub.A = as_matrix(s["A"], where + ".A");
        sub.B = as_matrix(s["B"], where + ".B");
        cfg.subsystems.push_back(std::move(sub));
    }
    const std::size_t M = cfg.subsystems.size();

    if (!root.contains("simulation")) fail(source_name, "missing [simulation]");
    {
        const json& sim = root["simulation"];
        require_keys(sim, {"h", "t_end", "epsilon_iie", "mode", "inactive_target", "decimate"},
                     "simulation");
        if (sim.contains("h")) cfg.step_h = as_number(sim["h"], "simulation.h");
        if (sim.contains("t_end")) cfg.t_end = as_number(sim["t_end"], "simulation.t_end");
        if (sim.contains("epsilon_iie"))
            cfg.epsilon_iie = as_number(sim["epsilon_iie"], "simulation.epsilon_iie");
        if (cfg.epsilon_iie < 0.0) fail("simulation.epsilon_iie", "must be >= 0");
        if (sim.contains("mode")) {
            const std::string mode = sim["mode"].get<std::string>();
            if (mode == "memory") cfg.mode = EstimatorMode::memory;
            else if (mode == "baseline") cfg.mode = EstimatorMode::baseline;
            else fail("simulation.mode", "expected 'memory' or 'baseline'");
        }
        if (sim.contains("inactive_target")) {
            const std::string tgt = sim["inactive_target"].get<std::string>();
            if (tgt == "u_ei") cfg.inactive_target = InactiveTarget::u_ei;
            else if (tgt == "e_df") cfg.inactive_target = InactiveTarget::e_df;
            else fail("simulation.inactive_target", "expected 'u_ei' or 'e_df'");
        }
        if (sim.contains("decimate"))
            cfg.trace_decimate = static_cast<int>(as_number(sim["decimate"], "simulation.decimate"));
    }

    if (!root.contains("schedule")) fail(source_name, "missing [schedule]");
    {
        const json& sch = root["schedule"];
        require_keys(sch, {"t0", "interval", "instants", "sequence"}, "schedule");
        cfg.schedule.t0 = sch.contains("t0") ? as_number(sch["t0"], "schedule.t0") : 0.0;
        if (!sch.contains("sequence") || !sch["sequence"].is_array() || sch["sequence"].empty())
            fail("schedule.sequence", "expected a non-empty id list");
        std::vector<int> seq;
        for (const auto& v : sch["sequence"])
            seq.push_back(static_cast<int>(as_number(v, "schedule.sequence")));

        if (sch.contains("instants") == sch.contains("interval"))
            fail("schedule", "provide exactly one of 'interval' or 'instants'");
        if (sch.contains("instants")) {
            for (const auto& v : sch["instants"])
                cfg.schedule.instants.push_back(as_number(v, "schedule.instants"));
            if (seq.size() != cfg.schedule.instants.size() + 1)
                fail("schedule.sequence",
                     "with explicit instants the sequence needs instants+1 entries");
            cfg.schedule.ids = seq;
        } else {
            const double interval = as_number(sch["interval"], "schedule.interval");
            if (!(interval > 0.0)) fail("schedule.interval", "must be > 0");
            cfg.schedule.ids.push_back(seq[0]);
            std::size_t k = 1;
            for (double tk = cfg.schedule.t0 + interval; tk < cfg.t_end - 1e-12 * std::max(1.0, cfg.t_end);
                 tk = cfg.schedule.t0 + interval * static_cast<double>(k + 1), ++k) {
                cfg.schedule.instants.push_back(tk);
                cfg.schedule.ids.push_back(seq[k % seq.size()]);
            }
        }
    }

    if (root.contains("gains")) {
        const json& g = root["gains"];
        require_keys(g, {"k_f", "k_s", "k_l", "k_ll", "k_sw", "gamma", "eta_fraction"}, "gains");
        if (g.contains("k_f")) cfg.k_f = as_number(g["k_f"], "gains.k_f");
        if (g.contains("k_s")) cfg.k_s = as_number(g["k_s"], "gains.k_s");
        if (!(cfg.k_f > 0.0) || !(cfg.k_s > 0.0)) fail("gains", "k_f and k_s must be > 0");
        if (g.contains("k_l")) cfg.k_l = as_gain_list(g["k_l"], M, "gains.k_l");
        if (g.contains("k_ll")) cfg.k_ll = as_gain_list(g["k_ll"], M, "gains.k_ll");
        if (g.contains("k_sw")) cfg.k_sw = as_gain_list(g["k_sw"], M, "gains.k_sw");
        if (g.contains("gamma")) cfg.gamma_scale = as_gain_list(g["gamma"], M, "gains.gamma");
        if (g.contains("eta_fraction")) {
            cfg.eta_fraction = as_number(g["eta_fraction"], "gains.eta_fraction");
            if (!(cfg.eta_fraction > 0.0) || cfg.eta_fraction > 1.0)
                fail("gains.eta_fraction", "must lie in (0, 1]");
        }
    }

    if (root.contains("initial_conditions")) {
        const json& ic = root["initial_conditions"];
        require_keys(ic, {"x0", "xm0", "phi_hat0"}, "initial_conditions");
        if (ic.contains("x0")) cfg.x0 = as_vector(ic["x0"], "initial_conditions.x0");
        if (ic.contains("xm0")) cfg.xm0 = as_vector(ic["xm0"], "initial_conditions.xm0");
        if (ic.contains("phi_hat0")) {
            if (!ic["phi_hat0"].is_array() || ic["phi_hat0"].size() != M)
                fail("initial_conditions.phi_hat0", "expected M vectors");
            for (const auto& v : ic["phi_hat0"])
                cfg.phi_hat0.push_back(as_vector(v, "initial_conditions.phi_hat0"));
        }
    }

    if (root.contains("signal")) {
        const json& sig = root["signal"];
        require_keys(sig, {"rbar", "delta_amplitude", "delta_decay", "delta_frequencies"},
                     "signal");
        if (sig.contains("rbar")) cfg.signal.rbar = as_vector(sig["rbar"], "signal.rbar");
        if (sig.contains("delta_amplitude"))
            cfg.signal.delta_amplitude = as_number(sig["delta_amplitude"], "signal.delta_amplitude");
        if (sig.contains("delta_decay"))
            cfg.signal.delta_decay = as_number(sig["delta_decay"], "signal.delta_decay");
        if (sig.contains("delta_frequencies")) {
            cfg.signal.delta_frequencies.clear();
            for (const auto& v : sig["delta_frequencies"])
                cfg.signal.delta_frequencies.push_back(as_number(v, "signal.delta_frequencies"));
        }
    }

    // Fill defaults the engine would otherwise derive, so round-trips are exact.
    normalize_config(cfg);

    if (validate) SimulationEngine::validate_config(cfg);
    return cfg;
}

SimulationConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

std::string scenario_to_text(const SimulationConfig& input) {
    SimulationConfig cfg = input;
    normalize_config(cfg);
    json root;
    root["reference_model"] = {{"A", matrix_to_json(cfg.ref.A_m)},
                               {"B", matrix_to_json(cfg.ref.B_m)}};
    json subs = json::array();
    for (const auto& s : cfg.subsystems)
        subs.push_back({{"A", matrix_to_json(s.A)}, {"B", matrix_to_json(s.B)}});
    root["subsystems"] = std::move(subs);

    json sch;
    sch["t0"] = cfg.schedule.t0;
    sch["instants"] = cfg.schedule.instants;
    sch["sequence"] = cfg.schedule.ids;
    root["schedule"] = std::move(sch);

    root["gains"] = {{"k_f", cfg.k_f},       {"k_s", cfg.k_s},
                     {"k_l", cfg.k_l},       {"k_ll", cfg.k_ll},
                     {"k_sw", cfg.k_sw},     {"gamma", cfg.gamma_scale},
                     {"eta_fraction", cfg.eta_fraction}};

    json phi0 = json::array();
    for (const auto& p : cfg.phi_hat0) phi0.push_back(vector_to_json(p));
    root["initial_conditions"] = {{"x0", vector_to_json(cfg.x0)},
                                  {"xm0", vector_to_json(cfg.xm0)},
                                  {"phi_hat0", std::move(phi0)}};

    root["signal"] = {{"rbar", vector_to_json(cfg.signal.rbar)},
                      {"delta_amplitude", cfg.signal.delta_amplitude},
                      {"delta_decay", cfg.signal.delta_decay},
                      {"delta_frequencies", cfg.signal.delta_frequencies}};

    root["simulation"] = {
        {"h", cfg.step_h},
        {"t_end", cfg.t_end},
        {"epsilon_iie", cfg.epsilon_iie},
        {"mode", cfg.mode == EstimatorMode::memory ? "memory" : "baseline"},
        {"inactive_target", cfg.inactive_target == InactiveTarget::u_ei ? "u_ei" : "e_df"},
        {"decimate", cfg.trace_decimate}};

    return root.dump(2) + "\n";
}

} // namespace smrac

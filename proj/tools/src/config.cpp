#include "dtdob_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dtdob::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError("'" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    expect_object(j, path);
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + join(path, k) + "'");
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError("missing key '" + join(path, key) + "'");
    return j.at(key);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError("'" + where + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + where + "' must be finite");
    return x;
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError("'" + where + "' must be an integer");
    return v.get<int>();
}

std::vector<double> as_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError("'" + where + "' must be an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::pair<double, double> as_range(const json& v, const std::string& where) {
    const auto r = as_vector(v, where);
    if (r.size() != 2 || r[0] > r[1]) throw ConfigError("'" + where + "' must be [lo, hi] with lo <= hi");
    return {r[0], r[1]};
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError("'" + where + "' must be a string");
    return v.get<std::string>();
}

DiscretizationMethod as_method(const json& v, const std::string& where) {
    const std::string s = as_string(v, where);
    try {
        return parse_method(s);
    } catch (const std::exception&) {
        throw ConfigError("'" + where + "' has unknown method '" + s + "'");
    }
}

std::vector<double> log_range(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw ConfigError("'" + where + "' must be [lo, hi, count]");
    const double lo = as_number(v[0], where + "[0]");
    const double hi = as_number(v[1], where + "[1]");
    const int n = as_int(v[2], where + "[2]");
    if (!(lo > 0.0) || hi < lo || n < 1) throw ConfigError("'" + where + "' needs 0 < lo <= hi and count >= 1");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return out;
}

std::vector<double> grid_spec(const json& j, const std::string& list_key, const std::string& path) {
    const bool has_list = j.contains(list_key), has_range = j.contains("log_range");
    if (has_list == has_range) throw ConfigError("'" + path + "' needs exactly one of '" + list_key + "' or 'log_range'");
    return has_list ? as_vector(j.at(list_key), join(path, list_key)) : log_range(j.at("log_range"), join(path, "log_range"));
}

RationalTransfer parse_transfer(const json& j, const std::string& path, std::optional<std::array<double, 3>>* params) {
    expect_object(j, path);
    if (j.contains("num") || j.contains("den")) {
        check_keys(j, {"num", "den"}, path);
        const auto num = as_vector(require(j, "num", path), join(path, "num"));
        const auto den = as_vector(require(j, "den", path), join(path, "den"));
        const Polynomial d(den);
        if (d.is_zero()) throw ConfigError("'" + join(path, "den") + "' is the zero polynomial");
        return RationalTransfer(Polynomial(num), d);
    }
    check_keys(j, {"M1", "M2", "K"}, path);
    const double M1 = as_number(require(j, "M1", path), join(path, "M1"));
    const double M2 = as_number(require(j, "M2", path), join(path, "M2"));
    const double K = as_number(require(j, "K", path), join(path, "K"));
    if (!(M1 > 0.0 && M2 > 0.0 && K > 0.0)) throw ConfigError("'" + path + "' parameters must be positive");
    if (params) *params = std::array<double, 3>{M1, M2, K};
    return two_mass_spring_member(M1, M2, K);
}

void parse_family(const json& j, ToolConfig& cfg) {
    const std::string path = "plant_family";
    expect_object(j, path);
    const std::string type = as_string(require(j, "type", path), join(path, "type"));
    if (type == "two_mass_spring") {
        check_keys(j, {"type", "M1", "M2", "K", "grid_points"}, path);
        const auto m1 = as_range(require(j, "M1", path), join(path, "M1"));
        const auto m2 = as_range(require(j, "M2", path), join(path, "M2"));
        const auto k = as_range(require(j, "K", path), join(path, "K"));
        const int gp = j.contains("grid_points") ? as_int(j.at("grid_points"), join(path, "grid_points")) : 21;
        if (!(m1.first > 0.0 && m2.first > 0.0 && k.first > 0.0) || gp < 1)
            throw ConfigError("'" + path + "' needs positive parameter bounds and grid_points >= 1");
        cfg.family = two_mass_spring_family(m1, m2, k, gp);
        cfg.parameter_box = std::array<double, 6>{m1.first, m1.second, m2.first, m2.second, k.first, k.second};
    } else if (type == "intervals") {
        check_keys(j, {"type", "n", "nu", "g", "alpha_lo", "alpha_hi", "beta_lo", "beta_hi"}, path);
        UncertainPlantFamily f;
        f.n = as_int(require(j, "n", path), join(path, "n"));
        f.nu = as_int(require(j, "nu", path), join(path, "nu"));
        const auto g = as_range(require(j, "g", path), join(path, "g"));
        f.g_lo = g.first;
        f.g_hi = g.second;
        f.alpha_lo = as_vector(require(j, "alpha_lo", path), join(path, "alpha_lo"));
        f.alpha_hi = as_vector(require(j, "alpha_hi", path), join(path, "alpha_hi"));
        f.beta_lo = j.contains("beta_lo") ? as_vector(j.at("beta_lo"), join(path, "beta_lo")) : std::vector<double>{};
        f.beta_hi = j.contains("beta_hi") ? as_vector(j.at("beta_hi"), join(path, "beta_hi")) : std::vector<double>{};
        try {
            f.validate();
        } catch (const std::exception& e) {
            throw ConfigError("'" + path + "': " + e.what());
        }
        cfg.family = f;
    } else {
        throw ConfigError("'" + join(path, "type") + "' must be 'intervals' or 'two_mass_spring'");
    }
}

void parse_q(const json& j, ToolConfig& cfg) {
    const std::string path = "q_filter";
    expect_object(j, path);
    const std::string type = as_string(require(j, "type", path), join(path, "type"));
    QSpec& q = cfg.q;
    if (type == "none") {
        check_keys(j, {"type"}, path);
        q.kind = QSpec::Kind::None;
    } else if (type == "explicit") {
        check_keys(j, {"type", "a", "c"}, path);
        q.kind = QSpec::Kind::Explicit;
        q.a = as_vector(require(j, "a", path), join(path, "a"));
        q.c = as_vector(require(j, "c", path), join(path, "c"));
    } else if (type == "first_order") {
        check_keys(j, {"type", "a0"}, path);
        q.kind = QSpec::Kind::Explicit;
        const double a0 = as_number(require(j, "a0", path), join(path, "a0"));
        q.a = {a0};
        q.c = {a0};
    } else if (type == "direct") {
        check_keys(j, {"type", "nq", "safety"}, path);
        q.kind = QSpec::Kind::Direct;
        q.nq = as_int(require(j, "nq", path), join(path, "nq"));
        if (j.contains("safety")) q.safety = as_number(j.at("safety"), join(path, "safety"));
    } else if (type == "indirect") {
        check_keys(j, {"type", "ct_a", "ct_c", "psi", "tau"}, path);
        q.kind = QSpec::Kind::Indirect;
        q.ct_a = as_vector(require(j, "ct_a", path), join(path, "ct_a"));
        q.ct_c = as_vector(require(j, "ct_c", path), join(path, "ct_c"));
        const bool has_psi = j.contains("psi"), has_tau = j.contains("tau");
        if (has_psi == has_tau) throw ConfigError("'" + path + "' needs exactly one of 'psi' or 'tau'");
        if (has_psi)
            q.psi = as_number(j.at("psi"), join(path, "psi"));
        else
            q.tau = as_number(j.at("tau"), join(path, "tau"));
    } else {
        throw ConfigError("'" + join(path, "type") + "' must be one of none, explicit, first_order, direct, indirect");
    }
}

SignalSpec parse_signal(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError("'" + path + "' must be an array of signal terms");
    SignalSpec s;
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const json& t = j[i];
        check_keys(t, {"type", "amplitude", "omega", "phase", "t0"}, p);
        const std::string type = as_string(require(t, "type", p), join(p, "type"));
        SignalSpec::Term term;
        term.amplitude = as_number(require(t, "amplitude", p), join(p, "amplitude"));
        if (type == "constant") {
            term.kind = SignalSpec::Kind::Constant;
            if (t.contains("omega") || t.contains("phase") || t.contains("t0"))
                throw ConfigError("'" + p + "' constant term takes only 'amplitude'");
        } else if (type == "step") {
            term.kind = SignalSpec::Kind::Step;
            if (t.contains("omega") || t.contains("phase")) throw ConfigError("'" + p + "' step term takes 'amplitude' and 't0'");
            if (t.contains("t0")) term.t0 = as_number(t.at("t0"), join(p, "t0"));
        } else if (type == "sine") {
            term.kind = SignalSpec::Kind::Sine;
            if (t.contains("t0")) throw ConfigError("'" + p + "' sine term takes 'amplitude', 'omega' and 'phase'");
            term.omega = as_number(require(t, "omega", p), join(p, "omega"));
            if (t.contains("phase")) term.phase = as_number(t.at("phase"), join(p, "phase"));
        } else {
            throw ConfigError("'" + join(p, "type") + "' must be constant, step or sine");
        }
        s.terms.push_back(term);
    }
    return s;
}

void parse_simulation(const json& j, ToolConfig& cfg) {
    const std::string path = "simulation";
    check_keys(j, {"horizon", "substeps", "blowup", "record_ct", "reference", "disturbance"}, path);
    SimSpec& s = cfg.simulation;
    if (j.contains("horizon")) s.horizon = as_number(j.at("horizon"), join(path, "horizon"));
    if (j.contains("substeps")) s.substeps = as_int(j.at("substeps"), join(path, "substeps"));
    if (j.contains("blowup")) s.blowup = as_number(j.at("blowup"), join(path, "blowup"));
    if (j.contains("record_ct")) {
        if (!j.at("record_ct").is_boolean()) throw ConfigError("'simulation.record_ct' must be a boolean");
        s.record_ct = j.at("record_ct").get<bool>();
    }
    if (j.contains("reference")) s.reference = parse_signal(j.at("reference"), join(path, "reference"));
    if (j.contains("disturbance")) s.disturbance = parse_signal(j.at("disturbance"), join(path, "disturbance"));
    if (s.horizon < 0.0) throw ConfigError("'simulation.horizon' must be non-negative");
    if (s.substeps < 1) throw ConfigError("'simulation.substeps' must be at least 1");
    if (!(s.blowup > 0.0)) throw ConfigError("'simulation.blowup' must be positive");
}

}  // namespace

ToolConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }
    check_keys(j,
               {"description", "plant_family", "nominal", "controller", "nominal_method", "controller_method", "q_filter",
                "delta", "plant", "method", "simulation", "contour", "freq", "analysis"},
               "");
    ToolConfig cfg;
    if (j.contains("delta")) {
        cfg.delta = as_number(j.at("delta"), "delta");
        if (!(*cfg.delta > 0.0)) throw ConfigError("'delta' must be positive");
    }
    if (j.contains("description") && !j.at("description").is_string())
        throw ConfigError("'description' must be a string");
    if (j.contains("plant_family")) parse_family(j.at("plant_family"), cfg);
    if (j.contains("nominal")) cfg.nominal = parse_transfer(j.at("nominal"), "nominal", nullptr);
    if (j.contains("controller")) cfg.controller = parse_transfer(j.at("controller"), "controller", nullptr);
    if (j.contains("nominal_method")) cfg.nominal_method = as_method(j.at("nominal_method"), "nominal_method");
    if (j.contains("controller_method")) cfg.controller_method = as_method(j.at("controller_method"), "controller_method");
    if (j.contains("method")) cfg.method = as_method(j.at("method"), "method");
    if (j.contains("q_filter")) parse_q(j.at("q_filter"), cfg);
    if (j.contains("plant")) cfg.plant = parse_transfer(j.at("plant"), "plant", &cfg.plant_parameters);
    if (j.contains("simulation")) parse_simulation(j.at("simulation"), cfg);
    if (j.contains("contour")) {
        check_keys(j.at("contour"), {"deltas", "log_range"}, "contour");
        cfg.contour_deltas = grid_spec(j.at("contour"), "deltas", "contour");
        for (double d : cfg.contour_deltas)
            if (!(d > 0.0)) throw ConfigError("'contour' sampling periods must be positive");
    }
    if (j.contains("freq")) {
        const json& f = j.at("freq");
        check_keys(f, {"omegas", "log_range", "transfers"}, "freq");
        if (f.contains("omegas") || f.contains("log_range")) cfg.omegas = grid_spec(f, "omegas", "freq");
        if (f.contains("transfers")) {
            const json& t = f.at("transfers");
            if (!t.is_array()) throw ConfigError("'freq.transfers' must be an array of strings");
            cfg.freq_transfers.clear();
            for (size_t i = 0; i < t.size(); ++i) {
                const std::string name = as_string(t[i], "freq.transfers[" + std::to_string(i) + "]");
                if (name != "q" && name != "sensitivity" && name != "nominal" && name != "controller" && name != "plant")
                    throw ConfigError("'freq.transfers[" + std::to_string(i) + "]' has unknown transfer '" + name + "'");
                cfg.freq_transfers.push_back(name);
            }
        }
    }
    if (j.contains("analysis")) {
        check_keys(j.at("analysis"), {"grid_points"}, "analysis");
        if (j.at("analysis").contains("grid_points"))
            cfg.grid_points = as_int(j.at("analysis").at("grid_points"), "analysis.grid_points");
        if (cfg.grid_points < 2) throw ConfigError("'analysis.grid_points' must be at least 2");
    }
    return cfg;
}

ToolConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace dtdob::cli

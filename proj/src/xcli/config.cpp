#include "critsense/xcli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace critsense {

using nlohmann::json;

#ifndef CRITSENSE_VERSION
#define CRITSENSE_VERSION "0.0.0"
#endif

std::string code_version() { return CRITSENSE_VERSION; }

namespace {

constexpr int kMaxLadderRungs = 7;
constexpr int kMaxMixedL = 12;

const std::set<std::string> kProbes{"critical", "critical_fm", "critical_afm", "ghz", "spin_coherent", "oat"};

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(where + it.key(), "unknown key");
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& field, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(field, "has the wrong type");
    }
}

double get_real(const json& j, const std::string& key, const std::string& field, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        throw ConfigError(field, "must be a number or \"inf\"");
    }
    if (!v.is_number()) throw ConfigError(field, "must be a number");
    return v.get<double>();
}

std::vector<double> get_reals(const json& j, const std::string& key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw ConfigError(key, "must be an array");
    const json& a = j.at(key);
    for (std::size_t i = 0; i < a.size(); ++i) {
        json wrap = {{"v", a[i]}};
        out.push_back(get_real(wrap, "v", key + "[" + std::to_string(i) + "]", 0.0));
    }
    return out;
}

std::vector<int> get_ints(const json& j, const std::string& key) {
    std::vector<int> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw ConfigError(key, "must be an array");
    for (std::size_t i = 0; i < j.at(key).size(); ++i) {
        const json& v = j.at(key)[i];
        if (!v.is_number_integer()) throw ConfigError(key + "[" + std::to_string(i) + "]", "must be an integer");
        out.push_back(v.get<int>());
    }
    return out;
}

json model_json(const ModelSpec& m) {
    return json{{"kind", to_string(m.kind)}, {"L", m.L},         {"J", m.J},
                {"h", m.h},                  {"delta_xxz", m.delta_xxz}, {"omega", m.omega},
                {"delta_ryd", m.delta_ryd},  {"V1", m.V1},       {"V2", m.V2},
                {"boundary", to_string(m.boundary)}};
}

ModelSpec parse_model(const json& j) {
    if (!j.is_object()) throw ConfigError("model", "must be an object");
    reject_unknown(j, "model.", {"kind", "L", "J", "h", "delta_xxz", "omega", "delta_ryd", "V1", "V2", "boundary"});
    ModelSpec m;
    try {
        if (j.contains("kind")) m.kind = model_kind_from_string(get_field<std::string>(j, "kind", "model.kind", ""));
        if (j.contains("boundary"))
            m.boundary = boundary_from_string(get_field<std::string>(j, "boundary", "model.boundary", ""));
    } catch (const DomainError& e) {
        throw ConfigError(j.contains("kind") ? "model.kind" : "model.boundary", e.what());
    }
    m.L = get_field<int>(j, "L", "model.L", m.L);
    m.J = get_real(j, "J", "model.J", m.J);
    m.h = get_real(j, "h", "model.h", m.h);
    m.delta_xxz = get_real(j, "delta_xxz", "model.delta_xxz", m.delta_xxz);
    m.omega = get_real(j, "omega", "model.omega", m.omega);
    m.delta_ryd = get_real(j, "delta_ryd", "model.delta_ryd", m.delta_ryd);
    m.V1 = get_real(j, "V1", "model.V1", m.V1);
    m.V2 = get_real(j, "V2", "model.V2", m.V2);
    return m;
}

json channel_json(const ChannelSpec& c) {
    json j{{"kind", to_string(c.kind)}, {"p", c.p}, {"chi", c.chi}, {"t", c.t}, {"quadrature_nodes", c.quadrature_nodes}};
    if (c.site_mask) j["site_mask"] = *c.site_mask;
    return j;
}

ChannelSpec parse_channel(const json& j) {
    if (!j.is_object()) throw ConfigError("channel", "must be an object");
    reject_unknown(j, "channel.", {"kind", "p", "chi", "t", "site_mask", "quadrature_nodes"});
    ChannelSpec c;
    try {
        c.kind = channel_kind_from_string(get_field<std::string>(j, "kind", "channel.kind", "dephase_z"));
    } catch (const DomainError& e) {
        throw ConfigError("channel.kind", e.what());
    }
    c.p = get_real(j, "p", "channel.p", c.p);
    c.chi = get_real(j, "chi", "channel.chi", c.chi);
    c.t = get_real(j, "t", "channel.t", c.t);
    c.quadrature_nodes = get_field<int>(j, "quadrature_nodes", "channel.quadrature_nodes", c.quadrature_nodes);
    if (j.contains("site_mask")) c.site_mask = get_ints(j, "site_mask");
    return c;
}

void check_sizes(const std::vector<int>& Ls, const std::string& field, int lo, int hi) {
    for (std::size_t i = 0; i < Ls.size(); ++i)
        if (Ls[i] < lo || Ls[i] > hi)
            throw ConfigError(field + "[" + std::to_string(i) + "]",
                              "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

} // namespace

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::qfi_scaling: return "qfi_scaling";
    case Scenario::theta_curves: return "theta_curves";
    case Scenario::channel_sweep: return "channel_sweep";
    case Scenario::deformed: return "deformed";
    case Scenario::subsystem: return "subsystem";
    case Scenario::hadamard: return "hadamard";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s) {
    for (Scenario k : {Scenario::qfi_scaling, Scenario::theta_curves, Scenario::channel_sweep, Scenario::deformed,
                       Scenario::subsystem, Scenario::hadamard})
        if (to_string(k) == s) return k;
    throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

std::vector<double> ThetaGrid::values() const {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        const double u = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        g[i] = spacing == "log" ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))) : lo + u * (hi - lo);
    }
    if (points > 1) g.back() = hi;
    return g;
}

void ExperimentConfig::validate() const {
    try {
        model.validate();
    } catch (const DomainError& e) {
        throw ConfigError("model", e.what());
    }
    if (channel) {
        try {
            channel->validate();
        } catch (const DomainError& e) {
            throw ConfigError("channel", e.what());
        }
    }
    if (theta.spacing != "log" && theta.spacing != "linear") throw ConfigError("theta.spacing", "must be log or linear");
    if (theta.points < 1 || theta.points > 100000) throw ConfigError("theta.points", "must lie in [1, 100000]");
    if (!std::isfinite(theta.lo) || !std::isfinite(theta.hi) || theta.hi < theta.lo)
        throw ConfigError("theta.hi", "must be finite and >= theta.lo");
    if (theta.spacing == "log" && !(theta.lo > 0.0)) throw ConfigError("theta.lo", "must be > 0 for log spacing");
    if (probes.empty()) throw ConfigError("probes", "must not be empty");
    for (std::size_t i = 0; i < probes.size(); ++i)
        if (!kProbes.count(probes[i])) throw ConfigError("probes[" + std::to_string(i) + "]", "unknown probe");
    if (shots < 1) throw ConfigError("shots", "must be >= 1");
    for (std::size_t i = 0; i < p_list.size(); ++i)
        if (!(p_list[i] >= 0.0 && p_list[i] <= 0.5))
            throw ConfigError("p_list[" + std::to_string(i) + "]", "must lie in [0, 0.5]");
    for (std::size_t i = 0; i < beta_list.size(); ++i)
        if (!(beta_list[i] >= 0.0)) throw ConfigError("beta_list[" + std::to_string(i) + "]", "must be >= 0");
    const int cap = policy().dense_cap;
    switch (scenario) {
    case Scenario::qfi_scaling:
        if (L_list.empty()) throw ConfigError("L_list", "must not be empty");
        check_sizes(L_list, "L_list", 2, cap);
        break;
    case Scenario::theta_curves:
    case Scenario::hadamard:
        if (L_list.empty()) throw ConfigError("L_list", "must not be empty");
        check_sizes(L_list, "L_list", 4, cap);
        for (std::size_t i = 0; i < L_list.size(); ++i)
            if (L_list[i] % 2) throw ConfigError("L_list[" + std::to_string(i) + "]", "must be even");
        break;
    case Scenario::channel_sweep:
        if (!channel) throw ConfigError("channel", "required for channel_sweep");
        if (L_list.empty()) throw ConfigError("L_list", "must not be empty");
        check_sizes(L_list, "L_list", 2, std::min(cap, kMaxMixedL));
        break;
    case Scenario::deformed:
        if (model.kind != ModelKind::cluster_ladder) throw ConfigError("model.kind", "deformed needs cluster_ladder");
        if (L_list.empty()) throw ConfigError("L_list", "must not be empty");
        check_sizes(L_list, "L_list", 2, kMaxLadderRungs);
        break;
    case Scenario::subsystem:
        if (model.kind == ModelKind::cluster_ladder) throw ConfigError("model.kind", "subsystem needs a chain model");
        if (model.L > cap) throw ConfigError("model.L", "exceeds the dense cap");
        if (L_sub_list.empty()) throw ConfigError("L_sub_list", "must not be empty");
        check_sizes(L_sub_list, "L_sub_list", model.kind == ModelKind::tfim ? 1 : 2,
                    model.kind == ModelKind::tfim ? model.L : model.L - 1);
        if (model.kind != ModelKind::tfim && theta.spacing == "log" && theta.lo <= 0.0)
            throw ConfigError("theta.lo", "must be > 0");
        break;
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("<document>", "must be a JSON object");
    reject_unknown(j, "", {"scenario", "model", "channel", "probes", "theta", "L_list", "L_sub_list", "p_list",
                           "beta_list", "seed", "shots", "output"});
    ExperimentConfig c;
    if (j.contains("scenario")) {
        c.scenario = scenario_from_string(get_field<std::string>(j, "scenario", "scenario", ""));
        c.scenario_given = true;
    }
    if (j.contains("model")) c.model = parse_model(j.at("model"));
    if (j.contains("channel") && !j.at("channel").is_null()) c.channel = parse_channel(j.at("channel"));
    if (j.contains("probes")) c.probes = get_field<std::vector<std::string>>(j, "probes", "probes", {});
    if (j.contains("theta")) {
        const json& t = j.at("theta");
        if (!t.is_object()) throw ConfigError("theta", "must be an object");
        reject_unknown(t, "theta.", {"spacing", "lo", "hi", "points"});
        c.theta.spacing = get_field<std::string>(t, "spacing", "theta.spacing", c.theta.spacing);
        c.theta.lo = get_real(t, "lo", "theta.lo", c.theta.lo);
        c.theta.hi = get_real(t, "hi", "theta.hi", c.theta.hi);
        c.theta.points = get_field<int>(t, "points", "theta.points", c.theta.points);
    }
    c.L_list = get_ints(j, "L_list");
    c.L_sub_list = get_ints(j, "L_sub_list");
    c.p_list = get_reals(j, "p_list");
    c.beta_list = get_reals(j, "beta_list");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed", "must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.shots = get_field<int>(j, "shots", "shots", c.shots);
    c.output = get_field<std::string>(j, "output", "output", c.output);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const ModelSpec& m) { return model_json(m).dump(); }

ModelSpec model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("model", std::string("invalid JSON: ") + e.what());
    }
    return parse_model(j);
}

std::string to_json(const ExperimentConfig& c) {
    auto reals = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(std::isinf(x) ? json("inf") : json(x));
        return a;
    };
    json j{{"scenario", to_string(c.scenario)},
           {"model", model_json(c.model)},
           {"probes", c.probes},
           {"theta", {{"spacing", c.theta.spacing}, {"lo", c.theta.lo}, {"hi", c.theta.hi}, {"points", c.theta.points}}},
           {"L_list", c.L_list},
           {"L_sub_list", c.L_sub_list},
           {"p_list", reals(c.p_list)},
           {"beta_list", reals(c.beta_list)},
           {"seed", c.seed},
           {"shots", c.shots},
           {"output", c.output}};
    if (c.channel) j["channel"] = channel_json(*c.channel);
    return j.dump();
}

std::string config_hash(const ExperimentConfig& c) {
    // the output location does not change the results
    ExperimentConfig key = c;
    key.output.clear();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(key)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace critsense

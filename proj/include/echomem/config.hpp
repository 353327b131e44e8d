// Config ingestion: a JSON document (key/value objects plus one array of
// modes) with the exact field names of the parameter records. Parsing
// collects every problem instead of stopping at the first; overrides go
// through the same validation path as files.

#pragma once

#include "echomem/model.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace echomem {

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::vector<std::string>& known,
                           const std::string& prefix, std::vector<std::string>& issues) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const auto& k : known)
            if (key == k) ok = true;
        if (!ok) issues.push_back(prefix + "." + key + ": unknown field");
    }
}

inline bool fetch_number(const json& obj, const std::string& key, const std::string& prefix,
                         std::vector<std::string>& issues, double& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_number()) {
        issues.push_back(prefix + "." + key + ": expected a number");
        return false;
    }
    out = obj[key].get<double>();
    return true;
}

inline bool fetch_int(const json& obj, const std::string& key, const std::string& prefix,
                      std::vector<std::string>& issues, int& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_number_integer()) {
        issues.push_back(prefix + "." + key + ": expected an integer");
        return false;
    }
    out = obj[key].get<int>();
    return true;
}

}  // namespace detail

// Parse and fully validate a configuration document. Returns the config on
// success; otherwise `issues` lists every syntax problem, unknown field, and
// violated invariant with its field path.
struct ParsedConfig {
    std::optional<SimConfig> config;
    std::vector<std::string> issues;
    bool ok() const { return issues.empty() && config.has_value(); }
};

inline ParsedConfig parse_config(const std::string& text) {
    using detail::json;
    ParsedConfig result;
    auto& issues = result.issues;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        issues.push_back(std::string("syntax: ") + e.what());
        return result;
    }
    if (!doc.is_object()) {
        issues.push_back("top level: expected an object");
        return result;
    }
    detail::reject_unknown(doc, {"cavity", "ensemble", "train", "quadrature", "oracle"},
                           "config", issues);

    SimConfig cfg;

    if (!doc.contains("cavity")) {
        issues.push_back("cavity: required section missing");
    } else if (!doc["cavity"].is_object()) {
        issues.push_back("cavity: expected an object");
    } else {
        const auto& c = doc["cavity"];
        detail::reject_unknown(c, {"gamma1", "gamma2"}, "cavity", issues);
        detail::fetch_number(c, "gamma1", "cavity", issues, cfg.cavity.gamma1);
        detail::fetch_number(c, "gamma2", "cavity", issues, cfg.cavity.gamma2);
        if (!c.contains("gamma1")) issues.push_back("cavity.gamma1: required field missing");
    }

    if (!doc.contains("ensemble")) {
        issues.push_back("ensemble: required section missing");
    } else if (!doc["ensemble"].is_object()) {
        issues.push_back("ensemble: expected an object");
    } else {
        const auto& e = doc["ensemble"];
        detail::reject_unknown(
            e, {"coupling_strength_sq", "n_atoms", "coupling_mean", "delta_in", "gamma21"},
            "ensemble", issues);
        const bool has_direct = e.contains("coupling_strength_sq");
        const bool has_split = e.contains("n_atoms") || e.contains("coupling_mean");
        if (has_direct && has_split) {
            issues.push_back(
                "ensemble: give either coupling_strength_sq or (n_atoms, coupling_mean), "
                "not both");
        } else if (has_direct) {
            detail::fetch_number(e, "coupling_strength_sq", "ensemble", issues,
                                 cfg.ensemble.coupling_strength_sq);
        } else if (e.contains("n_atoms") && e.contains("coupling_mean")) {
            double n = 0.0, g = 0.0;
            if (detail::fetch_number(e, "n_atoms", "ensemble", issues, n) &&
                detail::fetch_number(e, "coupling_mean", "ensemble", issues, g))
                cfg.ensemble.coupling_strength_sq = n * g * g;
        } else {
            issues.push_back(
                "ensemble: coupling_strength_sq (or n_atoms plus coupling_mean) required");
        }
        detail::fetch_number(e, "delta_in", "ensemble", issues, cfg.ensemble.delta_in);
        detail::fetch_number(e, "gamma21", "ensemble", issues, cfg.ensemble.gamma21);
        if (!e.contains("delta_in")) issues.push_back("ensemble.delta_in: required field missing");
    }

    if (!doc.contains("train")) {
        issues.push_back("train: required section missing");
    } else if (!doc["train"].is_object()) {
        issues.push_back("train: expected an object");
    } else {
        const auto& t = doc["train"];
        detail::reject_unknown(t, {"modes", "flip_time", "spacing_factor"}, "train", issues);
        detail::fetch_number(t, "flip_time", "train", issues, cfg.train.flip_time);
        detail::fetch_number(t, "spacing_factor", "train", issues, cfg.train.spacing_factor);
        if (!t.contains("flip_time")) issues.push_back("train.flip_time: required field missing");
        if (!t.contains("modes") || !t["modes"].is_array()) {
            issues.push_back("train.modes: required array missing");
        } else {
            std::size_t k = 0;
            for (const auto& mj : t["modes"]) {
                const std::string prefix = "train.modes[" + std::to_string(k) + "]";
                ModeSpec m;
                if (!mj.is_object()) {
                    issues.push_back(prefix + ": expected an object");
                    ++k;
                    continue;
                }
                detail::reject_unknown(
                    mj, {"arrival_time", "bandwidth", "mean_photons", "shape"}, prefix, issues);
                detail::fetch_number(mj, "arrival_time", prefix, issues, m.arrival_time);
                detail::fetch_number(mj, "bandwidth", prefix, issues, m.bandwidth);
                detail::fetch_number(mj, "mean_photons", prefix, issues, m.mean_photons);
                if (mj.contains("shape")) {
                    const std::string s = mj["shape"].is_string() ? mj["shape"].get<std::string>() : "";
                    if (s == "lorentzian")
                        m.shape = ModeShape::Lorentzian;
                    else if (s == "gaussian")
                        m.shape = ModeShape::Gaussian;
                    else
                        issues.push_back(prefix + ".shape: expected \"lorentzian\" or \"gaussian\"");
                }
                cfg.train.modes.push_back(m);
                ++k;
            }
        }
    }

    if (doc.contains("quadrature")) {
        if (!doc["quadrature"].is_object()) {
            issues.push_back("quadrature: expected an object");
        } else {
            const auto& q = doc["quadrature"];
            detail::reject_unknown(q, {"rel_tolerance", "abs_tolerance", "max_refinement_depth"},
                                   "quadrature", issues);
            detail::fetch_number(q, "rel_tolerance", "quadrature", issues,
                                 cfg.quadrature.rel_tolerance);
            detail::fetch_number(q, "abs_tolerance", "quadrature", issues,
                                 cfg.quadrature.abs_tolerance);
            detail::fetch_int(q, "max_refinement_depth", "quadrature", issues,
                              cfg.quadrature.max_refinement_depth);
        }
    }

    if (doc.contains("oracle")) {
        if (!doc["oracle"].is_object()) {
            issues.push_back("oracle: expected an object");
        } else {
            const auto& o = doc["oracle"];
            detail::reject_unknown(
                o, {"n_bins", "tail_truncation", "dt", "t_end", "sample_stride"}, "oracle",
                issues);
            detail::fetch_int(o, "n_bins", "oracle", issues, cfg.oracle.n_bins);
            detail::fetch_number(o, "tail_truncation", "oracle", issues,
                                 cfg.oracle.tail_truncation);
            detail::fetch_number(o, "dt", "oracle", issues, cfg.oracle.dt);
            detail::fetch_number(o, "t_end", "oracle", issues, cfg.oracle.t_end);
            detail::fetch_int(o, "sample_stride", "oracle", issues, cfg.oracle.sample_stride);
        }
    }

    if (issues.empty()) {
        auto invariant_issues = validate(cfg);
        issues.insert(issues.end(), invariant_issues.begin(), invariant_issues.end());
    }
    if (issues.empty()) result.config = cfg;
    return result;
}

// Apply one `section.field=value` override to the raw document. Paths may
// index arrays as `train.modes[0].bandwidth`. Values are JSON literals.
inline void apply_override(nlohmann::json& doc, const std::string& spec,
                           std::vector<std::string>& issues) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        issues.push_back("override '" + spec + "': expected section.field=value");
        return;
    }
    const std::string path = spec.substr(0, eq);
    const std::string value_text = spec.substr(eq + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(value_text);
    } catch (const nlohmann::json::parse_error&) {
        value = value_text;  // bare strings (e.g. shape=gaussian) stay strings
    }

    nlohmann::json* node = &doc;
    std::size_t pos = 0;
    while (pos < path.size()) {
        std::size_t dot = path.find('.', pos);
        std::string token = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        pos = dot == std::string::npos ? path.size() : dot + 1;

        std::optional<std::size_t> index;
        const auto bracket = token.find('[');
        if (bracket != std::string::npos && token.back() == ']') {
            index = std::stoul(token.substr(bracket + 1, token.size() - bracket - 2));
            token = token.substr(0, bracket);
        }

        const bool last = pos >= path.size();
        if (!node->is_object()) *node = nlohmann::json::object();
        if (last && !index) {
            (*node)[token] = value;
            return;
        }
        node = &(*node)[token];
        if (index) {
            if (!node->is_array()) *node = nlohmann::json::array();
            while (node->size() <= *index) node->push_back(nlohmann::json::object());
            node = &(*node)[*index];
            if (last) {
                *node = value;
                return;
            }
        }
    }
}

// Load a config file, apply overrides, and validate. The override path is
// identical to the file path: both end in parse_config.
inline ParsedConfig load_config(const std::string& path,
                                const std::vector<std::string>& overrides) {
    ParsedConfig result;
    std::ifstream in(path);
    if (!in) {
        result.issues.push_back("config file '" + path + "' is not readable");
        return result;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        result.issues.push_back(std::string("syntax: ") + e.what());
        return result;
    }
    for (const auto& o : overrides) apply_override(doc, o, result.issues);
    if (!result.issues.empty()) return result;
    return parse_config(doc.dump());
}

// Same, but starting from an in-memory default document.
inline ParsedConfig load_config_text(const std::string& text,
                                     const std::vector<std::string>& overrides) {
    ParsedConfig result;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        result.issues.push_back(std::string("syntax: ") + e.what());
        return result;
    }
    for (const auto& o : overrides) apply_override(doc, o, result.issues);
    if (!result.issues.empty()) return result;
    return parse_config(doc.dump());
}

// Built-in base for the `fig1` scan: unit-bandwidth Lorentzian modes, one
// photon each, spacing factor 5, collective coupling 400, line width 10,
// weak decoherence 1e-4, bath tied at gamma2/gamma1 = 0.01, matched gamma1.
inline std::string fig1_default_config_text() {
    return R"({
  "cavity":   { "gamma1": 80.0, "gamma2": 0.8 },
  "ensemble": { "coupling_strength_sq": 400.0, "delta_in": 10.0, "gamma21": 1e-4 },
  "train": {
    "spacing_factor": 5.0,
    "flip_time": 5.0,
    "modes": [
      { "arrival_time": 0.0, "bandwidth": 1.0, "mean_photons": 1.0, "shape": "lorentzian" }
    ]
  }
})";
}

}  // namespace echomem

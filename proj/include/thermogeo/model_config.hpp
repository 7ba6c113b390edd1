#pragma once

// Declarative Gibbs-model definitions in JSON:
//
//   {"models": [{
//      "name": "coin",
//      "space": {"type": "discrete", "points": [-1, 1], "weights": [1, 1]},
//      "quadrature": {"kind": "discrete_sum"},
//      "observables": ["x"],
//      "q_domain": {"lo": [-3], "hi": [3]}
//   }]}
//
// Interval spaces are {"type": "interval", "lo": <number|null>, "hi": <number|null>},
// null meaning unbounded. Quadrature keys other than "kind" are optional.

#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermogeo/errors.hpp"
#include "thermogeo/statmech.hpp"

namespace thermogeo::statmech {

inline QuadratureKind quadrature_kind_from_string(const std::string& s) {
    if (s == "closed_form") return QuadratureKind::closed_form;
    if (s == "adaptive_interval") return QuadratureKind::adaptive_interval;
    if (s == "discrete_sum") return QuadratureKind::discrete_sum;
    throw ConfigError("unknown quadrature kind '" + s + "'");
}

namespace detail {

inline double bound_from(const nlohmann::json& j, const char* key, double unbounded) {
    if (!j.contains(key) || j.at(key).is_null()) return unbounded;
    return j.at(key).get<double>();
}

} // namespace detail

inline GibbsModel model_from_json(const nlohmann::json& j) {
    try {
        GibbsModel m;
        m.name = j.at("name").get<std::string>();
        const auto& sp = j.at("space");
        const auto type = sp.at("type").get<std::string>();
        if (type == "discrete") {
            m.space = DiscreteSpace{sp.at("points").get<std::vector<double>>(), sp.at("weights").get<std::vector<double>>()};
        } else if (type == "interval") {
            constexpr double inf = std::numeric_limits<double>::infinity();
            m.space = IntervalSpace{detail::bound_from(sp, "lo", -inf), detail::bound_from(sp, "hi", inf)};
        } else {
            throw ConfigError("model '" + m.name + "': unknown space type '" + type + "'");
        }

        const auto& qd = j.at("quadrature");
        m.quadrature.kind = quadrature_kind_from_string(qd.at("kind").get<std::string>());
        if (qd.contains("truncation")) m.quadrature.truncation = qd.at("truncation").get<double>();
        if (qd.contains("node_count")) m.quadrature.node_count = qd.at("node_count").get<int>();

        for (const auto& name : j.at("observables").get<std::vector<std::string>>())
            m.observables.push_back(observable_from_catalog(name));

        const auto lo = j.at("q_domain").at("lo").get<std::vector<double>>();
        const auto hi = j.at("q_domain").at("hi").get<std::vector<double>>();
        m.q_domain = {Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                      Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()))};
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed model definition: ") + e.what());
    }
}

inline std::vector<GibbsModel> models_from_json(const nlohmann::json& j) {
    if (!j.contains("models") || !j.at("models").is_array()) throw ConfigError("model file needs a \"models\" array");
    std::vector<GibbsModel> out;
    for (const auto& m : j.at("models")) out.push_back(model_from_json(m));
    return out;
}

inline std::vector<GibbsModel> load_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return models_from_json(nlohmann::json::parse(buf.str()));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("model file '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace thermogeo::statmech

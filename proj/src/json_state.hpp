#pragma once

// JSON forms of the model types, shared by the io and config sources.

#include <nlohmann/json.hpp>

#include "odfmix/mixture.hpp"

namespace odfmix::detail {

using nlohmann::json;

inline json vec_json(const Vec4& v) { return json::array({v[0], v[1], v[2], v[3]}); }

inline Vec4 json_vec(const json& j) {
    if (!j.is_array() || j.size() != 4) throw std::invalid_argument("expected an array of 4 numbers");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

inline json state_json(const MixtureState& s) {
    json comps = json::array();
    for (const auto& c : s.components) {
        json V = json::array();
        for (const auto& v : c.V()) V.push_back(vec_json(v));
        comps.push_back({{"lambda", vec_json(c.lambda())}, {"V", V}});
    }
    return {{"alpha", s.alpha}, {"forced_uniform", s.forced_uniform}, {"components", comps}};
}

/// Accepts V as a full frame or v1 alone (frame completed).
inline MixtureState json_state(const json& j) {
    MixtureState s;
    s.alpha = j.at("alpha").get<std::vector<double>>();
    s.forced_uniform = j.value("forced_uniform", false);
    for (const auto& c : j.at("components")) {
        const Vec4 lambda = json_vec(c.at("lambda"));
        if (c.contains("V")) {
            Frame V{};
            const auto& jv = c.at("V");
            if (!jv.is_array() || jv.size() != 4) throw std::invalid_argument("V must hold 4 columns");
            for (std::size_t d = 0; d < 4; ++d) V[d] = json_vec(jv.at(d));
            s.components.emplace_back(lambda, V);
        } else {
            s.components.emplace_back(lambda, UnitQuaternion::normalize(json_vec(c.at("v1"))));
        }
    }
    if (s.alpha.size() != s.components.size())
        throw std::invalid_argument("alpha and components differ in length");
    return s;
}

}  // namespace odfmix::detail

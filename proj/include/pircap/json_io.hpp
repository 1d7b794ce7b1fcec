#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pircap/construct.hpp"
#include "pircap/family.hpp"
#include "pircap/lp.hpp"
#include "pircap/pattern.hpp"
#include "pircap/scheme.hpp"
#include "pircap/verify.hpp"

namespace pircap {

using Json = nlohmann::json;  // object keys are emitted sorted: stable bytes

// {"n": N, "sets": [[members...], ...]} with sets in canonical order.
inline Json pattern_to_json(const CollusionPattern& p) {
    Json sets = Json::array();
    for (ServerMask s : p.sets) sets.push_back(mask_members(s));
    return Json{{"n", p.n_servers}, {"sets", sets}};
}

inline CollusionPattern pattern_from_json(const Json& j, bool allow_large = false) {
    try {
        const int n = j.at("n").get<int>();
        std::vector<std::vector<int>> sets;
        for (const auto& s : j.at("sets")) sets.push_back(s.get<std::vector<int>>());
        return make_pattern(n, sets, allow_large);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("bad pattern JSON: ") + e.what());
    }
}

inline Json family_to_json(const SetFamily& f) {
    Json sets = Json::array();
    for (ServerMask s : f.minimal_sets) sets.push_back(mask_members(s));
    return Json{{"n", f.n_servers}, {"minimal_sets", sets}};
}

inline Json hitting_to_json(const HittingResult& h) {
    return Json{{"alpha", h.alpha}, {"witness", h.witness}, {"certified", h.certified}};
}

inline Json rationals_to_json(const std::vector<Rational>& v) {
    Json out = Json::array();
    for (const auto& r : v) out.push_back(rational_to_string(r));
    return out;
}

inline Json lp_solution_to_json(const LpSolution& sol) {
    Json j;
    switch (sol.status) {
        case LpStatus::Optimal: j["status"] = "optimal"; break;
        case LpStatus::Infeasible: j["status"] = "infeasible"; break;
        case LpStatus::Unbounded: j["status"] = "unbounded"; break;
    }
    if (sol.status == LpStatus::Optimal) {
        j["value"] = rational_to_string(sol.value);
        j["point"] = rationals_to_json(sol.point);
    }
    return j;
}

namespace detail {

inline Json component_to_json(const ComponentFunction& c) {
    if (c.linear) return Json{{"lin", *c.linear}};
    return Json{{"table", *c.table}};
}

inline ComponentFunction component_from_json(const Json& j) {
    ComponentFunction c;
    if (j.contains("lin"))
        c.linear = j.at("lin").get<std::vector<int>>();
    else if (j.contains("table"))
        c.table = j.at("table").get<std::vector<long long>>();
    else
        throw ParseError("component must carry \"lin\" or \"table\"");
    return c;
}

inline Json matrix_to_json(const AnswerMatrix& m) {
    Json rows = Json::array();
    for (int k = 0; k < m.rows; ++k) {
        Json row = Json::array();
        for (int i = 0; i < m.cols; ++i) row.push_back(component_to_json(m.at(k, i)));
        rows.push_back(row);
    }
    return rows;
}

inline AnswerMatrix matrix_from_json(const Json& j, int k_messages) {
    AnswerMatrix m;
    m.rows = k_messages;
    if (static_cast<int>(j.size()) != k_messages)
        throw ParseError("answer matrix must have K rows");
    m.cols = j.empty() ? 0 : static_cast<int>(j.at(0).size());
    m.entries.resize(static_cast<std::size_t>(m.rows) * m.cols);
    for (int k = 0; k < m.rows; ++k) {
        if (static_cast<int>(j.at(k).size()) != m.cols)
            throw ParseError("ragged answer matrix");
        for (int i = 0; i < m.cols; ++i)
            m.entries[static_cast<std::size_t>(k) * m.cols + i] =
                component_from_json(j.at(k).at(i));
    }
    return m;
}

}  // namespace detail

// Canonical form: key entries sorted by their serialized bytes, matrices
// keyed "server:label".
inline Json scheme_to_json(const PirScheme& s) {
    Json j;
    j["n"] = s.n_servers;
    j["K"] = s.msg.K;
    j["L"] = s.msg.L;
    j["x"] = s.msg.x_size;
    j["y_factors"] = s.group.factors;

    std::vector<Json> keys;
    for (const auto& key : s.keys) {
        Json queries;
        for (int k = 0; k < s.msg.K; ++k)
            queries["k" + std::to_string(k)] = key.queries[k];
        keys.push_back(Json{{"p", rational_to_string(key.prob)}, {"queries", queries}});
    }
    std::sort(keys.begin(), keys.end(),
              [](const Json& a, const Json& b) { return a.dump() < b.dump(); });
    j["keys"] = keys;

    Json matrices;
    for (const auto& [key, m] : s.matrices)
        matrices[std::to_string(key.first) + ":" + key.second] = detail::matrix_to_json(m);
    j["matrices"] = matrices;
    return j;
}

inline PirScheme scheme_from_json(const Json& j) {
    try {
        PirScheme s;
        s.n_servers = j.at("n").get<int>();
        s.msg.K = j.at("K").get<int>();
        s.msg.L = j.at("L").get<int>();
        s.msg.x_size = j.at("x").get<int>();
        s.group = FiniteAbelianGroup::make(j.at("y_factors").get<std::vector<int>>());
        for (const auto& key_json : j.at("keys")) {
            KeyValue key;
            key.prob = parse_rational(key_json.at("p").get<std::string>());
            key.queries.resize(s.msg.K);
            for (int k = 0; k < s.msg.K; ++k)
                key.queries[k] =
                    key_json.at("queries").at("k" + std::to_string(k)).get<std::vector<std::string>>();
            s.keys.push_back(std::move(key));
        }
        for (const auto& [name, m] : j.at("matrices").items()) {
            const auto colon = name.find(':');
            if (colon == std::string::npos)
                throw ParseError("matrix key must look like \"server:label\"");
            const int server = std::stoi(name.substr(0, colon));
            s.matrices[{server, name.substr(colon + 1)}] =
                detail::matrix_from_json(m, s.msg.K);
        }
        validate_scheme(s);
        return s;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("bad scheme JSON: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw ParseError("bad scheme JSON: malformed server index");
    }
}

inline Json check_to_json(const CheckResult& c) {
    Json j{{"pass", c.pass}, {"fail_count", c.fail_count}};
    if (!c.pass) j["witness"] = c.witness;
    return j;
}

inline Json verify_report_to_json(const VerifyReport& r) {
    return Json{
        {"s_star", rational_to_string(r.s_star)},
        {"capacity", rational_to_string(r.capacity_value)},
        {"rate", rational_to_string(r.rate_value)},
        {"checks",
         Json{{"correctness", check_to_json(r.correctness)},
              {"privacy", check_to_json(r.privacy)},
              {"uniform_decomposable", check_to_json(r.uniform_decomposable)},
              {"p1", check_to_json(r.p1)},
              {"p2", check_to_json(r.p2)},
              {"p3", check_to_json(r.p3)},
              {"p4", check_to_json(r.p4)},
              {"download_invariant", check_to_json(r.download_invariant)}}},
        {"rate_equals_capacity", r.rate_equals_capacity},
        {"capacity_achieving", r.capacity_achieving},
        {"properties_hold", r.properties_hold},
        {"theorem1_consistent", r.theorem1_consistent}};
}

inline Json support_report_to_json(const SupportCountReport& r) {
    return Json{{"vacuous", r.vacuous},
                {"qualifying_found", r.qualifying_found},
                {"min_count", r.min_count},
                {"alpha", r.alpha},
                {"pass", r.pass}};
}

inline Json support_reduction_to_json(const SupportReduction& r) {
    return Json{{"reduced", pattern_to_json(r.reduced)},
                {"removed", r.removed},
                {"positive_point", rationals_to_json(r.positive_point)},
                {"averaged", r.averaged}};
}

}  // namespace pircap

#ifndef bnvc_serialization_hpp
#define bnvc_serialization_hpp

#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnvc/bounds.hpp"
#include "bnvc/dataset.hpp"
#include "bnvc/error.hpp"
#include "bnvc/model.hpp"
#include "bnvc/search.hpp"

namespace bnvc {

using json = nlohmann::ordered_json;

// Network document:
//   { "domain": {"names": [...], "alphabets": [[...], ...]},
//     "dag":    {"parents": [[...], ...]},
//     "cpts":   [{"node": j, "rows": [[p, ...], ...]}, ...] }
// Rows are probabilities, one per parent configuration in mixed-radix
// order over the ascending parent list (last parent fastest). Doubles are
// written with 17 significant digits.

inline json to_json(const CategoricalDomain& domain) {
    return json{{"names", domain.names()}, {"alphabets", domain.alphabets()}};
}

inline json to_json(const Dag& dag) { return json{{"parents", dag.parent_lists()}}; }

inline json to_json(const BayesNet& net) {
    json cpts = json::array();
    for (const auto& cpt : net.cpts()) {
        json rows = json::array();
        for (std::size_t w = 0; w < cpt.parent_config_count(); ++w) {
            rows.push_back(cpt.prob_row(w));
        }
        cpts.push_back(json{{"node", cpt.node()}, {"rows", std::move(rows)}});
    }
    return json{{"domain", to_json(net.domain())}, {"dag", to_json(net.dag())}, {"cpts", std::move(cpts)}};
}

namespace detail {

inline std::string token_string(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number() || v.is_boolean()) {
        return v.dump();
    }
    throw format_error("alphabet values must be strings or numbers");
}

template <class F>
auto parse_guard(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw format_error(std::string(what) + ": " + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ingestion_error("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw format_error("'" + path + "': " + e.what());
    }
}

} // namespace detail

inline CategoricalDomain domain_from_json(const json& j) {
    return detail::parse_guard("domain", [&] {
        std::vector<std::vector<std::string>> alphabets;
        for (const auto& a : j.at("alphabets")) {
            std::vector<std::string> values;
            for (const auto& v : a) {
                values.push_back(detail::token_string(v));
            }
            alphabets.push_back(std::move(values));
        }
        return CategoricalDomain(j.at("names").get<std::vector<std::string>>(), std::move(alphabets));
    });
}

inline Dag dag_from_json(const json& j) {
    const json& parents = j.contains("parents") ? j.at("parents") : j;
    return detail::parse_guard("dag", [&] { return Dag(parents.get<ParentLists>()); });
}

// Reads a network document. Row values are taken as given; call validate()
// to check normalization.
inline BayesNet network_from_json(const json& j) {
    auto domain = domain_from_json(detail::parse_guard("network", [&] { return j.at("domain"); }));
    auto dag = dag_from_json(detail::parse_guard("network", [&] { return j.at("dag"); }));
    if (dag.n() != domain.n()) {
        throw format_error("network: dag has " + std::to_string(dag.n()) + " nodes, domain has " +
                           std::to_string(domain.n()));
    }
    return detail::parse_guard("network", [&] {
        const auto& cpts_json = j.at("cpts");
        if (cpts_json.size() != domain.n()) {
            throw format_error("network: expected " + std::to_string(domain.n()) + " cpts");
        }
        std::vector<Cpt> cpts;
        for (std::size_t node = 0; node < cpts_json.size(); ++node) {
            const auto& c = cpts_json[node];
            const std::size_t label = c.value("node", node);
            std::vector<double> probs;
            std::size_t rows = 0;
            for (const auto& row : c.at("rows")) {
                ++rows;
                for (const auto& p : row) {
                    probs.push_back(p.get<double>());
                }
            }
            const std::size_t child = rows ? probs.size() / rows : 0;
            cpts.push_back(Cpt::from_probabilities(label, child, rows, probs));
        }
        return BayesNet(std::move(domain), std::move(dag), std::move(cpts));
    });
}

inline BayesNet load_network(const std::string& path) { return network_from_json(detail::read_json_file(path)); }

inline void save_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw ingestion_error("cannot write '" + path + "'");
    }
    out << doc.dump(2) << '\n';
}

// Schema sidecar: {"name": ["v0", "v1", ...], ...}, declaration order kept.
inline Schema schema_from_json(const json& j) {
    if (!j.is_object()) {
        throw format_error("schema must be a JSON object mapping names to alphabets");
    }
    Schema schema;
    for (const auto& [name, values] : j.items()) {
        if (!values.is_array()) {
            throw format_error("schema entry '" + name + "' must be an array");
        }
        std::vector<std::string> alphabet;
        for (const auto& v : values) {
            alphabet.push_back(detail::token_string(v));
        }
        schema.emplace_back(name, std::move(alphabet));
    }
    return schema;
}

inline Schema load_schema(const std::string& path) { return schema_from_json(detail::read_json_file(path)); }

inline CategoricalDomain domain_from_schema(const Schema& schema) {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> alphabets;
    for (const auto& [name, values] : schema) {
        names.push_back(name);
        alphabets.push_back(values);
    }
    return CategoricalDomain(std::move(names), std::move(alphabets));
}

namespace detail {

// JSON has no infinity or NaN; those become null
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace detail

inline json to_json(const VcBoundReport& r) {
    json j{{"h", r.h}, {"kind", to_string(r.kind)}, {"n", r.n}};
    j["delta"] = r.delta ? json(*r.delta) : json(nullptr);
    if (r.parents) {
        j["parents"] = *r.parents;
    }
    j["sizes"] = r.sizes;
    if (r.kind == BoundKind::ordered) {
        j["form"] = r.form == OrderedForm::widened ? "widened" : "literal";
    }
    return j;
}

inline json to_json(const ClosedFormBounds& c) {
    return json{{"given_graph", c.given_graph}, {"ordered", c.ordered}, {"unordered", c.unordered}};
}

inline json to_json(const RiskBound& r) {
    json j{{"r_emp", detail::number(r.r_emp)}, {"phi", detail::number(r.phi)}, {"bound", detail::number(r.bound)},
           {"eta", r.eta}, {"lambda", r.lambda}, {"h", r.h}};
    j["k"] = r.k ? json(*r.k) : json(nullptr);
    j["m"] = r.m ? json(*r.m) : json(nullptr);
    j["q"] = r.q ? json(*r.q) : json(nullptr);
    return j;
}

inline json to_json(const GridCell& c) {
    return json{{"k", c.k},
                {"m", c.m},
                {"lambda", c.lambda},
                {"epsilon", c.epsilon},
                {"feasible", c.feasible},
                {"r_emp", detail::number(c.r_emp)},
                {"phi", detail::number(c.phi)},
                {"bound", detail::number(c.bound)},
                {"h", c.h},
                {"q", c.q}};
}

inline json to_json(const SearchResult& r) {
    json scores = json::array();
    for (const auto& s : r.per_node_scores) {
        scores.push_back(json{{"node", s.node}, {"parents", s.parents}, {"log_loss", s.log_loss}});
    }
    json grid = json::array();
    for (const auto& c : r.grid) {
        grid.push_back(to_json(c));
    }
    json j{{"r_emp", r.r_emp}, {"per_node_scores", std::move(scores)}};
    j["risk_bound"] = r.risk_bound ? to_json(*r.risk_bound) : json(nullptr);
    j["grid"] = std::move(grid);
    j["warnings"] = r.warnings;
    return j;
}

} // namespace bnvc

#endif // bnvc_serialization_hpp

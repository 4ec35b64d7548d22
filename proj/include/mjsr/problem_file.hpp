#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mjsr/error.hpp"
#include "mjsr/hourglass.hpp"
#include "mjsr/matrix.hpp"
#include "mjsr/matrix_set.hpp"

namespace mjsr {

/// Problem files name matrix sets, pairs, and hourglass specs:
///
///   {
///     "version": "1",
///     "sets":  { "A": { "rows": 2, "cols": 2,
///                       "matrices": [[2,0,0,0.5], ...],
///                       "labels": ["A1", ...] } },
///     "pairs": { "ab": { "a": "A", "b": "B" } },
///     "hsets": { "H": { "construction": "independent-row-uncertainty",
///                       "rows": [[[1,2],[2,1]], [[1,3],[2,2]]] } }
///   }
///
/// Matrices are row-major flat arrays. Pair sides may reference plain sets
/// or hourglass specs (which materialize on resolution). Hourglass payloads
/// by construction tag: linearly-ordered {"matrices": set-payload},
/// minkowski-sum/-product {"left","right"}, raw {"set": set-payload}.
struct ProblemFile {
    std::string version;
    std::map<std::string, MatrixSet> sets;
    std::map<std::string, std::pair<std::string, std::string>> pairs;
    std::map<std::string, HSetSpec> hsets;

    bool has_set(const std::string& name) const { return sets.count(name) != 0; }
    bool has_hset(const std::string& name) const { return hsets.count(name) != 0; }
    bool has_pair(const std::string& name) const { return pairs.count(name) != 0; }

    /// A named set, materializing hourglass specs on demand.
    MatrixSet resolve_set(const std::string& name) const {
        if (auto it = sets.find(name); it != sets.end()) return it->second;
        if (auto it = hsets.find(name); it != hsets.end()) return materialize(it->second);
        throw schema_error("no set or hset named '" + name + "'");
    }

    SwitchedPair resolve_pair(const std::string& name) const {
        auto it = pairs.find(name);
        if (it == pairs.end()) throw schema_error("no pair named '" + name + "'");
        return SwitchedPair(resolve_set(it->second.first), resolve_set(it->second.second));
    }
};

namespace detail {

inline double finite_number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw schema_error(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw schema_error(where + " must be finite");
    return v;
}

inline MatrixSet parse_set_payload(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw schema_error(where + " must be an object");
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("matrices"))
        throw schema_error(where + " needs rows, cols and matrices");
    const auto rows = j.at("rows").get<std::int64_t>();
    const auto cols = j.at("cols").get<std::int64_t>();
    if (rows <= 0 || cols <= 0) throw schema_error(where + " dimensions must be positive");
    if (!j.at("matrices").is_array() || j.at("matrices").empty())
        throw schema_error(where + ".matrices must be a nonempty array");
    std::vector<Matrix> members;
    for (std::size_t k = 0; k < j.at("matrices").size(); ++k) {
        const auto& arr = j.at("matrices")[k];
        if (!arr.is_array())
            throw schema_error(where + ".matrices[" + std::to_string(k) + "] must be an array");
        std::vector<double> entries;
        entries.reserve(arr.size());
        for (std::size_t e = 0; e < arr.size(); ++e)
            entries.push_back(finite_number(
                arr[e], where + ".matrices[" + std::to_string(k) + "][" + std::to_string(e) + "]"));
        try {
            members.emplace_back((std::size_t)rows, (std::size_t)cols, std::move(entries));
        } catch (const invalid_matrix_error& e) {
            throw schema_error(where + ".matrices[" + std::to_string(k) + "]: " + e.what());
        }
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        if (!j.at("labels").is_array()) throw schema_error(where + ".labels must be an array");
        for (const auto& l : j.at("labels")) labels.push_back(l.get<std::string>());
    }
    try {
        return MatrixSet(std::move(members), std::move(labels));
    } catch (const error& e) {
        throw schema_error(where + ": " + e.what());
    }
}

inline HSetSpec parse_hset_spec(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("construction"))
        throw schema_error(where + " must be an object with a construction tag");
    const std::string tag = j.at("construction").get<std::string>();
    HSetSpec spec;
    if (tag == "linearly-ordered") {
        spec.construction = HSetSpec::Construction::linearly_ordered;
        spec.chain = parse_set_payload(j.at("matrices"), where + ".matrices").members();
    } else if (tag == "independent-row-uncertainty") {
        spec.construction = HSetSpec::Construction::independent_row_uncertainty;
        if (!j.contains("rows") || !j.at("rows").is_array())
            throw schema_error(where + ".rows must be an array of row families");
        for (std::size_t r = 0; r < j.at("rows").size(); ++r) {
            const auto& family = j.at("rows")[r];
            if (!family.is_array())
                throw schema_error(where + ".rows[" + std::to_string(r) + "] must be an array");
            std::vector<std::vector<double>> choices;
            for (const auto& choice : family) {
                std::vector<double> rowvec;
                for (const auto& v : choice)
                    rowvec.push_back(finite_number(v, where + ".rows[" + std::to_string(r) + "]"));
                choices.push_back(std::move(rowvec));
            }
            spec.row_choices.push_back(std::move(choices));
        }
    } else if (tag == "minkowski-sum" || tag == "minkowski-product") {
        spec.construction = tag == "minkowski-sum" ? HSetSpec::Construction::minkowski_sum
                                                   : HSetSpec::Construction::minkowski_product;
        if (!j.contains("left") || !j.contains("right"))
            throw schema_error(where + " needs left and right child specs");
        spec.left = std::make_unique<HSetSpec>(parse_hset_spec(j.at("left"), where + ".left"));
        spec.right = std::make_unique<HSetSpec>(parse_hset_spec(j.at("right"), where + ".right"));
    } else if (tag == "raw") {
        spec.construction = HSetSpec::Construction::raw;
        spec.raw_set = parse_set_payload(j.at("set"), where + ".set");
    } else {
        throw schema_error(where + ": unknown construction '" + tag + "'");
    }
    return spec;
}

} // namespace detail

inline ProblemFile parse_problem_json(const nlohmann::json& j) {
    if (!j.is_object()) throw schema_error("problem file must be a JSON object");
    ProblemFile file;
    if (!j.contains("version")) throw schema_error("problem file needs a version");
    file.version = j.at("version").is_string() ? j.at("version").get<std::string>() : "";
    if (file.version != "1")
        throw schema_error("unsupported problem file version '" + file.version + "'");
    if (j.contains("sets")) {
        if (!j.at("sets").is_object()) throw schema_error("sets must be an object");
        for (const auto& [name, payload] : j.at("sets").items())
            file.sets.emplace(name, detail::parse_set_payload(payload, "sets." + name));
    }
    if (j.contains("hsets")) {
        if (!j.at("hsets").is_object()) throw schema_error("hsets must be an object");
        for (const auto& [name, payload] : j.at("hsets").items())
            file.hsets.emplace(name, detail::parse_hset_spec(payload, "hsets." + name));
    }
    if (j.contains("pairs")) {
        if (!j.at("pairs").is_object()) throw schema_error("pairs must be an object");
        for (const auto& [name, payload] : j.at("pairs").items()) {
            if (!payload.is_object() || !payload.contains("a") || !payload.contains("b"))
                throw schema_error("pairs." + name + " needs 'a' and 'b' set names");
            const std::string a = payload.at("a").get<std::string>();
            const std::string b = payload.at("b").get<std::string>();
            for (const std::string& ref : {a, b})
                if (!file.has_set(ref) && !file.has_hset(ref))
                    throw schema_error("pairs." + name + " references unknown set '" + ref + "'");
            file.pairs.emplace(name, std::make_pair(a, b));
        }
    }
    return file;
}

inline ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open problem file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw schema_error("invalid JSON in '" + path + "': " + e.what());
    }
    try {
        return parse_problem_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw schema_error("invalid problem file '" + path + "': " + e.what());
    }
}

inline nlohmann::json set_to_json(const MatrixSet& set) {
    nlohmann::json j;
    j["rows"] = set.rows();
    j["cols"] = set.cols();
    nlohmann::json matrices = nlohmann::json::array();
    for (const Matrix& m : set.members()) matrices.push_back(m.entries());
    j["matrices"] = std::move(matrices);
    if (set.has_labels()) j["labels"] = set.labels();
    return j;
}

} // namespace mjsr

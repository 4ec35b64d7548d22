#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mjsr/hourglass.hpp"
#include "mjsr/matrix_set.hpp"
#include "mjsr/radii.hpp"
#include "mjsr/stability.hpp"

// Machine-readable reports for the command line front end. Doubles go
// through the JSON library's shortest round-trip serialization, so a report
// re-parses to bit-identical values.

namespace mjsr {

inline nlohmann::json word_to_json(const IndexWord& word) {
    return nlohmann::json{{"a", word.a_indices}, {"b", word.b_indices}};
}

inline IndexWord word_from_json(const nlohmann::json& j) {
    IndexWord word;
    word.a_indices = j.at("a").get<std::vector<std::size_t>>();
    word.b_indices = j.at("b").get<std::vector<std::size_t>>();
    return word;
}

inline nlohmann::json bracket_to_json(const RadiusBracket& bracket) {
    nlohmann::json j;
    j["quantity"] = to_string(bracket.quantity);
    j["lower"] = bracket.lower;
    j["upper"] = bracket.upper;
    j["lower_certified"] = bracket.lower_certified;
    j["upper_certified"] = bracket.upper_certified;
    j["horizon"] = bracket.horizon;
    j["norm"] = to_string(bracket.norm);
    if (bracket.lower_witness) j["lower_witness"] = word_to_json(*bracket.lower_witness);
    if (bracket.upper_witness) j["upper_witness"] = word_to_json(*bracket.upper_witness);
    if (bracket.underflow_clamped) j["underflow_clamped"] = true;
    return j;
}

inline nlohmann::json jsr_rows_to_json(const std::vector<JsrRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const JsrRow& r : rows) {
        arr.push_back({{"m", r.m},
                       {"max_norm", r.max_norm},
                       {"max_norm_root", r.max_norm_root},
                       {"max_rho", r.max_rho},
                       {"max_rho_root", r.max_rho_root},
                       {"norm_word", r.norm_word},
                       {"rho_word", r.rho_word}});
    }
    return arr;
}

inline nlohmann::json lsr_rows_to_json(const std::vector<LsrRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const LsrRow& r : rows) {
        arr.push_back({{"m", r.m},
                       {"min_norm", r.min_norm},
                       {"min_norm_root", r.min_norm_root},
                       {"min_rho", r.min_rho},
                       {"min_rho_root", r.min_rho_root},
                       {"norm_word", r.norm_word},
                       {"rho_word", r.rho_word}});
    }
    return arr;
}

inline nlohmann::json minimax_rows_to_json(const std::vector<MinimaxRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const MinimaxRow& r : rows) {
        arr.push_back({{"m", r.m},
                       {"mu", r.mu},
                       {"mu_root", r.mu_root},
                       {"eta", r.eta},
                       {"eta_root", r.eta_root},
                       {"mu_bar", r.mu_bar},
                       {"mu_bar_root", r.mu_bar_root},
                       {"eta_bar", r.eta_bar},
                       {"eta_bar_root", r.eta_bar_root},
                       {"mu_witness", word_to_json(r.mu_witness)},
                       {"eta_witness", word_to_json(r.eta_witness)},
                       {"mu_bar_witness", word_to_json(r.mu_bar_witness)},
                       {"eta_bar_witness", word_to_json(r.eta_bar_witness)}});
    }
    return arr;
}

inline nlohmann::json controller_to_json(const Controller& c) {
    nlohmann::json j;
    j["kind"] = to_string(c.kind);
    j["block_length"] = c.block_length;
    if (c.kind == Controller::Kind::periodic) j["periodic_b_indices"] = c.periodic_b_indices;
    return j;
}

inline Controller controller_from_json(const nlohmann::json& j) {
    Controller c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "block-greedy")
        c.kind = Controller::Kind::block_greedy;
    else if (kind == "periodic")
        c.kind = Controller::Kind::periodic;
    else
        throw error("unknown controller kind '" + kind + "'");
    c.block_length = j.at("block_length").get<std::size_t>();
    if (c.kind == Controller::Kind::periodic)
        c.periodic_b_indices = j.at("periodic_b_indices").get<std::vector<std::size_t>>();
    return c;
}

inline nlohmann::json verdict_to_json(const StabilizationVerdict& v) {
    nlohmann::json j;
    j["mode"] = to_string(v.mode);
    j["decision"] = to_string(v.decision);
    j["horizon"] = v.horizon;
    j["bound"] = v.bound;
    if (v.decision == Decision::yes) {
        j["sigma"] = v.sigma;
        j["lambda"] = v.lambda;
        j["c_constant"] = v.c_constant;
    }
    if (v.certificate) j["controller"] = controller_to_json(*v.certificate);
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline int exit_code_for(Decision d) {
    switch (d) {
        case Decision::yes: return 0;
        case Decision::no_at_horizon: return 1;
        case Decision::inconclusive: return 4;
    }
    return 4;
}

inline nlohmann::json saddle_to_json(const SaddleCertificate& cert, const MatrixSet& a_set,
                                     const MatrixSet& b_set) {
    return nlohmann::json{{"a_index", cert.a_index},
                          {"b_index", cert.b_index},
                          {"a_label", a_set.label(cert.a_index, "a")},
                          {"b_label", b_set.label(cert.b_index, "b")},
                          {"value", cert.value},
                          {"max_row_residual", cert.max_row_residual},
                          {"min_col_residual", cert.min_col_residual}};
}

} // namespace mjsr

#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mjsr/config.hpp"
#include "mjsr/enumeration.hpp"
#include "mjsr/matrix.hpp"
#include "mjsr/matrix_set.hpp"

namespace mjsr {

enum class RadiusQuantity { jsr, lsr, mu, eta, mu_hat, mu_check, eta_hat, eta_check };

inline const char* to_string(RadiusQuantity q) {
    switch (q) {
        case RadiusQuantity::jsr: return "jsr";
        case RadiusQuantity::lsr: return "lsr";
        case RadiusQuantity::mu: return "mu";
        case RadiusQuantity::eta: return "eta";
        case RadiusQuantity::mu_hat: return "mu_hat";
        case RadiusQuantity::mu_check: return "mu_check";
        case RadiusQuantity::eta_hat: return "eta_hat";
        case RadiusQuantity::eta_check: return "eta_check";
    }
    return "?";
}

/// Certified or estimated two-sided bound for one asymptotic quantity.
/// A certified side is a proven bound; a non-certified side is a finite
/// horizon estimate only (nothing analogous to the Berger-Wang formula is
/// known for the minimax quantities, so their spectral-radius-based lower
/// values stay estimates). lower <= upper is guaranteed only when both
/// sides are certified.
struct RadiusBracket {
    RadiusQuantity quantity{};
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool lower_certified = false;
    bool upper_certified = false;
    std::size_t horizon = 0;
    std::optional<IndexWord> lower_witness;
    std::optional<IndexWord> upper_witness;
    NormKind norm = NormKind::row_sum;
    bool underflow_clamped = false;
};

namespace detail {

/// value^(1/m) through logs; quantities below 1e-300 clamp to zero so that
/// strongly contracting sets cannot underflow into garbage.
inline double root_of(double value, std::size_t m, bool& clamped) {
    if (value == 0.0) return 0.0;
    if (value < 1e-300) {
        clamped = true;
        return 0.0;
    }
    if (m == 1) return value;
    return std::exp(std::log(value) / (double)m);
}

template <typename Row, typename Fn>
std::vector<Row> rows_for_horizons(std::size_t n, unsigned threads, Fn&& make_row) {
    std::vector<Row> rows;
    rows.reserve(n);
    if (threads <= 1 || n <= 1) {
        for (std::size_t m = 1; m <= n; ++m) rows.push_back(make_row(m));
        return rows;
    }
    std::vector<std::future<Row>> futures;
    futures.reserve(n);
    for (std::size_t m = 1; m <= n; ++m)
        futures.push_back(std::async(std::launch::async, make_row, m));
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

} // namespace detail

/// Per-horizon growth extremes of one square set: the largest product norm
/// and largest product spectral radius at length m, with their m-th roots.
struct JsrRow {
    std::size_t m = 0;
    double max_norm = 0.0, max_norm_root = 0.0;
    double max_rho = 0.0, max_rho_root = 0.0;
    std::vector<std::size_t> norm_word, rho_word;
    bool clamped = false;
};

struct LsrRow {
    std::size_t m = 0;
    double min_norm = 0.0, min_norm_root = 0.0;
    double min_rho = 0.0, min_rho_root = 0.0;
    std::vector<std::size_t> norm_word, rho_word;
    bool clamped = false;
};

inline JsrRow jsr_row(const MatrixSet& set, std::size_t m, NormKind kind,
                      std::uint64_t budget = kDefaultBudget) {
    const ProductScan scan = scan_products(set, m, kind, budget);
    JsrRow row;
    row.m = m;
    row.max_norm = scan.max_norm;
    row.max_rho = scan.max_rho;
    row.norm_word = scan.max_norm_word;
    row.rho_word = scan.max_rho_word;
    row.max_norm_root = detail::root_of(scan.max_norm, m, row.clamped);
    row.max_rho_root = detail::root_of(scan.max_rho, m, row.clamped);
    return row;
}

inline LsrRow lsr_row(const MatrixSet& set, std::size_t m, NormKind kind,
                      std::uint64_t budget = kDefaultBudget) {
    const ProductScan scan = scan_products(set, m, kind, budget);
    LsrRow row;
    row.m = m;
    row.min_norm = scan.min_norm;
    row.min_rho = scan.min_rho;
    row.norm_word = scan.min_norm_word;
    row.rho_word = scan.min_rho_word;
    row.min_norm_root = detail::root_of(scan.min_norm, m, row.clamped);
    row.min_rho_root = detail::root_of(scan.min_rho, m, row.clamped);
    return row;
}

inline std::vector<JsrRow> jsr_rows(const MatrixSet& set, std::size_t n, NormKind kind,
                                    std::uint64_t budget = kDefaultBudget, unsigned threads = 1) {
    return detail::rows_for_horizons<JsrRow>(
        n, threads, [&](std::size_t m) { return jsr_row(set, m, kind, budget); });
}

inline std::vector<LsrRow> lsr_rows(const MatrixSet& set, std::size_t n, NormKind kind,
                                    std::uint64_t budget = kDefaultBudget, unsigned threads = 1) {
    return detail::rows_for_horizons<LsrRow>(
        n, threads, [&](std::size_t m) { return lsr_row(set, m, kind, budget); });
}

/// Certified bracket for the joint spectral radius: the upper bound is the
/// best m-th root of the largest product norm (valid for every m by Fekete
/// subadditivity), the lower bound the best m-th root of the largest product
/// spectral radius (each product certifies one).
inline RadiusBracket jsr_bracket_from_rows(const std::vector<JsrRow>& rows, NormKind kind) {
    RadiusBracket bracket;
    bracket.quantity = RadiusQuantity::jsr;
    bracket.norm = kind;
    bracket.horizon = rows.empty() ? 0 : rows.back().m;
    bracket.lower = 0.0;
    bracket.upper = std::numeric_limits<double>::infinity();
    bracket.lower_certified = true;
    bracket.upper_certified = true;
    for (const JsrRow& row : rows) {
        bracket.underflow_clamped = bracket.underflow_clamped || row.clamped;
        if (row.max_norm_root < bracket.upper) {
            bracket.upper = row.max_norm_root;
            bracket.upper_witness = IndexWord{row.norm_word, {}};
        }
        if (row.max_rho_root > bracket.lower) {
            bracket.lower = row.max_rho_root;
            bracket.lower_witness = IndexWord{row.rho_word, {}};
        }
    }
    return bracket;
}

inline RadiusBracket jsr_bracket(const MatrixSet& set, std::size_t n, NormKind kind,
                                 std::uint64_t budget = kDefaultBudget, unsigned threads = 1) {
    if (n == 0) throw error("bracket horizon must be at least 1");
    return jsr_bracket_from_rows(jsr_rows(set, n, kind, budget, threads), kind);
}

/// Bracket for the lower spectral radius. Any length-m word repeated
/// periodically is admissible, so both the smallest product norm root and
/// the smallest product spectral-radius root are valid upper bounds. No
/// computable general lower bound is available; the lower side is the
/// trivial certified zero.
inline RadiusBracket lsr_bracket_from_rows(const std::vector<LsrRow>& rows, NormKind kind) {
    RadiusBracket bracket;
    bracket.quantity = RadiusQuantity::lsr;
    bracket.norm = kind;
    bracket.horizon = rows.empty() ? 0 : rows.back().m;
    bracket.lower = 0.0;
    bracket.lower_certified = true;
    bracket.upper = std::numeric_limits<double>::infinity();
    bracket.upper_certified = true;
    for (const LsrRow& row : rows) {
        bracket.underflow_clamped = bracket.underflow_clamped || row.clamped;
        if (row.min_norm_root < bracket.upper) {
            bracket.upper = row.min_norm_root;
            bracket.upper_witness = IndexWord{row.norm_word, {}};
        }
        if (row.min_rho_root < bracket.upper) {
            bracket.upper = row.min_rho_root;
            bracket.upper_witness = IndexWord{row.rho_word, {}};
        }
    }
    return bracket;
}

inline RadiusBracket lsr_bracket(const MatrixSet& set, std::size_t n, NormKind kind,
                                 std::uint64_t budget = kDefaultBudget, unsigned threads = 1) {
    if (n == 0) throw error("bracket horizon must be at least 1");
    return lsr_bracket_from_rows(lsr_rows(set, n, kind, budget, threads), kind);
}

/// One horizon of the four minimax quantities: norm-based mu_m / eta_m and
/// spectral-radius-based mu_bar_m / eta_bar_m, raw and as m-th roots.
struct MinimaxRow {
    std::size_t m = 0;
    double mu = 0.0, eta = 0.0, mu_bar = 0.0, eta_bar = 0.0;
    double mu_root = 0.0, eta_root = 0.0, mu_bar_root = 0.0, eta_bar_root = 0.0;
    IndexWord mu_witness, eta_witness, mu_bar_witness, eta_bar_witness;
    bool clamped = false;
};

inline MinimaxRow minimax_row(const SwitchedPair& pair, std::size_t m, NormKind kind,
                              std::uint64_t budget = kDefaultBudget) {
    MinimaxRow row;
    row.m = m;
    MinimaxOutcome mu = max_min_norm(pair, m, kind, true, budget);
    MinimaxOutcome eta = min_max_norm(pair, m, kind, true, budget);
    MinimaxOutcome mu_bar = max_min_rho(pair, m, budget);
    MinimaxOutcome eta_bar = min_max_rho(pair, m, budget);
    row.mu = mu.value;
    row.eta = eta.value;
    row.mu_bar = mu_bar.value;
    row.eta_bar = eta_bar.value;
    row.mu_witness = std::move(mu.witness);
    row.eta_witness = std::move(eta.witness);
    row.mu_bar_witness = std::move(mu_bar.witness);
    row.eta_bar_witness = std::move(eta_bar.witness);
    row.mu_root = detail::root_of(row.mu, m, row.clamped);
    row.eta_root = detail::root_of(row.eta, m, row.clamped);
    row.mu_bar_root = detail::root_of(row.mu_bar, m, row.clamped);
    row.eta_bar_root = detail::root_of(row.eta_bar, m, row.clamped);
    return row;
}

inline std::vector<MinimaxRow> minimax_rows(const SwitchedPair& pair, std::size_t n, NormKind kind,
                                            std::uint64_t budget = kDefaultBudget,
                                            unsigned threads = 1) {
    return detail::rows_for_horizons<MinimaxRow>(
        n, threads, [&](std::size_t m) { return minimax_row(pair, m, kind, budget); });
}

/// Brackets for mu and eta plus the four sequence estimates. The norm roots
/// give certified upper bounds (Fekete infimum); everything derived from the
/// spectral-radius rows is flagged as a non-certified estimate.
inline std::vector<RadiusBracket> minimax_brackets_from_rows(const std::vector<MinimaxRow>& rows,
                                                             NormKind kind) {
    const std::size_t horizon = rows.empty() ? 0 : rows.back().m;
    bool clamped = false;
    for (const MinimaxRow& r : rows) clamped = clamped || r.clamped;

    RadiusBracket mu, eta;
    mu.quantity = RadiusQuantity::mu;
    eta.quantity = RadiusQuantity::eta;
    for (RadiusBracket* b : {&mu, &eta}) {
        b->norm = kind;
        b->horizon = horizon;
        b->upper = std::numeric_limits<double>::infinity();
        b->upper_certified = true;
        b->lower = 0.0;
        b->lower_certified = false;
        b->underflow_clamped = clamped;
    }
    for (const MinimaxRow& r : rows) {
        if (r.mu_root < mu.upper) {
            mu.upper = r.mu_root;
            mu.upper_witness = r.mu_witness;
        }
        if (r.mu_bar_root > mu.lower) {
            mu.lower = r.mu_bar_root;
            mu.lower_witness = r.mu_bar_witness;
        }
        if (r.eta_root < eta.upper) {
            eta.upper = r.eta_root;
            eta.upper_witness = r.eta_witness;
        }
        if (r.eta_bar_root > eta.lower) {
            eta.lower = r.eta_bar_root;
            eta.lower_witness = r.eta_bar_witness;
        }
    }

    auto estimate = [&](RadiusQuantity q, bool take_max, bool use_eta) {
        RadiusBracket b;
        b.quantity = q;
        b.norm = kind;
        b.horizon = horizon;
        b.lower_certified = false;
        b.upper_certified = false;
        b.underflow_clamped = clamped;
        double value = take_max ? 0.0 : std::numeric_limits<double>::infinity();
        for (const MinimaxRow& r : rows) {
            const double root = use_eta ? r.eta_bar_root : r.mu_bar_root;
            const IndexWord& wit = use_eta ? r.eta_bar_witness : r.mu_bar_witness;
            const bool improves = take_max ? (root > value) : (root < value);
            if (improves) {
                value = root;
                b.lower_witness = wit;
            }
        }
        b.lower = b.upper = value;
        return b;
    };

    return {mu,
            eta,
            estimate(RadiusQuantity::mu_hat, true, false),
            estimate(RadiusQuantity::mu_check, false, false),
            estimate(RadiusQuantity::eta_hat, true, true),
            estimate(RadiusQuantity::eta_check, false, true)};
}

inline std::vector<RadiusBracket> minimax_brackets(const SwitchedPair& pair, std::size_t n,
                                                   NormKind kind,
                                                   std::uint64_t budget = kDefaultBudget,
                                                   unsigned threads = 1) {
    if (n == 0) throw error("bracket horizon must be at least 1");
    return minimax_brackets_from_rows(minimax_rows(pair, n, kind, budget, threads), kind);
}

/// All pairwise products {A*B}, in a-major order, duplicates retained.
inline MatrixSet set_product(const MatrixSet& a, const MatrixSet& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw dimension_error("set product must compose to square; got " +
                              Matrix::shape_string(a.rows(), a.cols()) + " and " +
                              Matrix::shape_string(b.rows(), b.cols()));
    std::vector<Matrix> members;
    std::vector<std::string> labels;
    members.reserve(a.size() * b.size());
    labels.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            members.push_back(mat_mul(a.member(i), b.member(j)));
            labels.push_back(a.label(i, "a") + "*" + b.label(j, "b"));
        }
    return MatrixSet(std::move(members), std::move(labels));
}

} // namespace mjsr

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mjsr/config.hpp"
#include "mjsr/error.hpp"
#include "mjsr/matrix.hpp"
#include "mjsr/matrix_set.hpp"

namespace mjsr {

/// Recipe for a set of positive matrices with hourglass structure. The
/// guaranteed constructions are linearly ordered chains, independent row
/// uncertainty (each row drawn from its own family), and Minkowski sums and
/// products of hourglass sets; "raw" carries a claimed-but-unverified set.
struct HSetSpec {
    enum class Construction {
        linearly_ordered,
        independent_row_uncertainty,
        minkowski_sum,
        minkowski_product,
        raw
    };

    Construction construction = Construction::raw;

    // linearly_ordered
    std::vector<Matrix> chain;
    // independent_row_uncertainty: row_choices[row][choice][col]
    std::vector<std::vector<std::vector<double>>> row_choices;
    // minkowski_sum / minkowski_product
    std::unique_ptr<HSetSpec> left, right;
    // raw
    std::optional<MatrixSet> raw_set;
};

inline const char* to_string(HSetSpec::Construction c) {
    switch (c) {
        case HSetSpec::Construction::linearly_ordered: return "linearly-ordered";
        case HSetSpec::Construction::independent_row_uncertainty:
            return "independent-row-uncertainty";
        case HSetSpec::Construction::minkowski_sum: return "minkowski-sum";
        case HSetSpec::Construction::minkowski_product: return "minkowski-product";
        case HSetSpec::Construction::raw: return "raw";
    }
    return "?";
}

namespace detail {

inline void require_positive(const Matrix& m, const std::string& what) {
    if (!m.strictly_positive())
        throw positivity_error(what + " requires strictly positive entries");
}

inline bool strictly_less(const Matrix& a, const Matrix& b) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!(a(i, j) < b(i, j))) return false;
    return true;
}

} // namespace detail

/// Expand a spec into the concrete matrix set it denotes. Independent row
/// uncertainty enumerates the row-choice cross product with the first row
/// index varying fastest; Minkowski variants combine the two child
/// materializations pairwise (left-major), duplicates retained.
inline MatrixSet materialize(const HSetSpec& spec) {
    using C = HSetSpec::Construction;
    switch (spec.construction) {
        case C::linearly_ordered: {
            if (spec.chain.empty()) throw chain_error("linearly ordered chain must be nonempty");
            for (const Matrix& m : spec.chain) detail::require_positive(m, "linearly ordered chain");
            for (std::size_t i = 0; i + 1 < spec.chain.size(); ++i)
                if (!detail::strictly_less(spec.chain[i], spec.chain[i + 1]))
                    throw chain_error("linearly ordered chain must increase strictly entrywise "
                                      "(violated between members " +
                                      std::to_string(i) + " and " + std::to_string(i + 1) + ")");
            return MatrixSet(spec.chain);
        }
        case C::independent_row_uncertainty: {
            const std::size_t n_rows = spec.row_choices.size();
            if (n_rows == 0)
                throw positivity_error("independent row uncertainty needs at least one row family");
            std::size_t cols = 0;
            for (const auto& family : spec.row_choices) {
                if (family.empty())
                    throw positivity_error("every row family needs at least one choice");
                for (const auto& choice : family) {
                    if (cols == 0) cols = choice.size();
                    if (choice.empty() || choice.size() != cols)
                        throw dimension_error("row choices must share one length");
                    for (double v : choice)
                        if (!(v > 0.0))
                            throw positivity_error(
                                "independent row uncertainty requires strictly positive rows");
                }
            }
            std::size_t total = 1;
            for (const auto& family : spec.row_choices) total *= family.size();
            std::vector<Matrix> members;
            members.reserve(total);
            for (std::size_t k = 0; k < total; ++k) {
                Matrix m(n_rows, cols);
                std::size_t rest = k;
                for (std::size_t r = 0; r < n_rows; ++r) {
                    const auto& family = spec.row_choices[r];
                    const std::size_t pick = rest % family.size();
                    rest /= family.size();
                    for (std::size_t c = 0; c < cols; ++c) m(r, c) = family[pick][c];
                }
                members.push_back(std::move(m));
            }
            return MatrixSet(std::move(members));
        }
        case C::minkowski_sum:
        case C::minkowski_product: {
            if (!spec.left || !spec.right)
                throw error("minkowski construction needs two child specs");
            const MatrixSet lhs = materialize(*spec.left);
            const MatrixSet rhs = materialize(*spec.right);
            std::vector<Matrix> members;
            members.reserve(lhs.size() * rhs.size());
            for (std::size_t i = 0; i < lhs.size(); ++i)
                for (std::size_t j = 0; j < rhs.size(); ++j)
                    members.push_back(spec.construction == C::minkowski_sum
                                          ? lhs.member(i) + rhs.member(j)
                                          : mat_mul(lhs.member(i), rhs.member(j)));
            return MatrixSet(std::move(members));
        }
        case C::raw: {
            if (!spec.raw_set) throw error("raw spec carries no matrix set");
            for (const Matrix& m : spec.raw_set->members())
                detail::require_positive(m, "raw hourglass set");
            return *spec.raw_set;
        }
    }
    throw error("unknown hourglass construction");
}

struct HsetViolation {
    std::size_t matrix_index = 0;
    std::vector<double> u;
};

namespace detail {

// coordinatewise comparisons on image vectors; exact, no tolerance
inline bool leq(const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] <= y[i])) return false;
    return true;
}

inline bool geq(const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= y[i])) return false;
    return true;
}

inline double unit_open(std::mt19937_64& rng) {
    // deterministic (0,1) double independent of the standard library's
    // distribution implementations
    return ((double)(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Grid points with coordinates in {1, 2, 10} (first coordinate most
/// significant), then seeded uniform-on-simplex samples.
inline std::vector<std::vector<double>> probe_vectors(std::size_t dim, std::size_t samples,
                                                      std::uint64_t seed) {
    static constexpr double kGrid[3] = {1.0, 2.0, 10.0};
    std::vector<std::vector<double>> probes;
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) total *= 3;
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<double> u(dim);
        std::size_t rest = k;
        for (std::size_t i = dim; i-- > 0;) {
            u[i] = kGrid[rest % 3];
            rest /= 3;
        }
        probes.push_back(std::move(u));
    }
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> u(dim);
        double sum = 0.0;
        for (double& v : u) {
            v = -std::log(unit_open(rng));
            sum += v;
        }
        for (double& v : u) v = v / sum;
        probes.push_back(std::move(u));
    }
    return probes;
}

} // namespace detail

/// Search for a witness that the set is not an hourglass set: a member and a
/// positive vector u such that neither definition alternative holds (the
/// member's image is neither dominated by all images nor strictly improvable
/// downwards, or the mirrored condition upwards). The probe stream is fully
/// deterministic given the seed. A violation is a disproof; no violation
/// found is NOT a proof of membership.
inline std::optional<HsetViolation> falsify_hset(const MatrixSet& set, std::size_t samples,
                                                 std::uint64_t seed = kDefaultSeed) {
    if (!set.strictly_positive())
        throw positivity_error("hourglass falsifier requires strictly positive matrices");
    if (samples < 1) throw error("falsifier needs at least one sample");

    const auto probes = detail::probe_vectors(set.cols(), samples, seed);
    std::vector<std::vector<double>> images(set.size());
    for (const auto& u : probes) {
        for (std::size_t k = 0; k < set.size(); ++k) images[k] = mat_vec(set.member(k), u);
        for (std::size_t k = 0; k < set.size(); ++k) {
            const auto& ref = images[k];
            bool all_above = true, all_below = true;
            bool some_strictly_below = false, some_strictly_above = false;
            for (std::size_t j = 0; j < set.size(); ++j) {
                const auto& img = images[j];
                if (!detail::geq(img, ref)) all_above = false;
                if (!detail::leq(img, ref)) all_below = false;
                if (detail::leq(img, ref) && img != ref) some_strictly_below = true;
                if (detail::geq(img, ref) && img != ref) some_strictly_above = true;
            }
            const bool first_ok = all_above || some_strictly_below;
            const bool second_ok = all_below || some_strictly_above;
            if (!first_ok || !second_ok) return HsetViolation{k, u};
        }
    }
    return std::nullopt;
}

/// Saddle pair for the spectral radii of the cross products: indices of
/// (A~, B~) with rho(A B~) <= rho(A~ B~) <= rho(A~ B) for all A, B, plus the
/// residuals of those two inequalities over the full payoff table.
struct SaddleCertificate {
    std::size_t a_index = 0;
    std::size_t b_index = 0;
    double value = 0.0;
    double max_row_residual = 0.0; // max_A rho(A B~) - value, >= 0
    double min_col_residual = 0.0; // value - min_B rho(A~ B), >= 0
};

/// Thrown when no candidate pair passes the residual test; carries the
/// best (smallest total residual) candidate seen.
struct no_saddle_error : error {
    no_saddle_error(const std::string& msg, SaddleCertificate best_candidate)
        : error(msg), best(best_candidate) {}
    SaddleCertificate best;
};

/// Exhaustive scan of the |A| x |B| payoff table of rho(A_i B_j); returns the
/// lexicographically first pair whose residuals pass the certificate
/// tolerance.
inline SaddleCertificate saddle_search(const SwitchedPair& pair) {
    if (!pair.a_set().strictly_positive() || !pair.b_set().strictly_positive())
        throw positivity_error("saddle search requires strictly positive sets");
    const std::size_t na = pair.a_set().size(), nb = pair.b_set().size();
    std::vector<double> table(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            table[i * nb + j] =
                spectral_radius(mat_mul(pair.a_set().member(i), pair.b_set().member(j)));

    SaddleCertificate best;
    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double value = table[i * nb + j];
            double col_max = -std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < na; ++r) col_max = std::max(col_max, table[r * nb + j]);
            double row_min = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < nb; ++c) row_min = std::min(row_min, table[i * nb + c]);
            SaddleCertificate cand{i, j, value, col_max - value, value - row_min};
            const double tol = kTol.compare_rel * std::max(1.0, value);
            if (cand.max_row_residual <= tol && cand.min_col_residual <= tol) return cand;
            const double total = cand.max_row_residual + cand.min_col_residual;
            if (total < best_total) {
                best_total = total;
                best = cand;
            }
        }
    }
    throw no_saddle_error("no saddle point in the rho(A*B) payoff table (best residuals " +
                              std::to_string(best.max_row_residual) + ", " +
                              std::to_string(best.min_col_residual) + " at pair " +
                              std::to_string(best.a_index) + "," + std::to_string(best.b_index) +
                              ")",
                          best);
}

struct ExactRadii {
    double jsr = 0.0;
    double lsr = 0.0;
};

/// For hourglass sets both asymptotic radii collapse to member spectral
/// radii: the joint spectral radius is the largest, the lower spectral
/// radius the smallest. Membership is the caller's assertion; with
/// assume_hset false a falsifier screen runs first.
inline ExactRadii hset_exact_radii(const MatrixSet& set, bool assume_hset = true,
                                   std::size_t screen_samples = 64,
                                   std::uint64_t seed = kDefaultSeed) {
    if (!set.strictly_positive())
        throw positivity_error("exact hourglass radii require strictly positive matrices");
    if (!set.is_square())
        throw dimension_error("exact hourglass radii require square matrices, got " +
                              Matrix::shape_string(set.rows(), set.cols()));
    if (!assume_hset) {
        if (auto violation = falsify_hset(set, screen_samples, seed))
            throw error("falsifier found an hourglass violation at member " +
                        std::to_string(violation->matrix_index));
    }
    ExactRadii out;
    out.jsr = -std::numeric_limits<double>::infinity();
    out.lsr = std::numeric_limits<double>::infinity();
    for (const Matrix& m : set.members()) {
        const double rho = spectral_radius(m);
        out.jsr = std::max(out.jsr, rho);
        out.lsr = std::min(out.lsr, rho);
    }
    return out;
}

/// Common value of all six minimax quantities on a pair of hourglass sets:
/// the saddle value rho(A~ B~).
inline double hset_minimax_value(const SwitchedPair& pair) { return saddle_search(pair).value; }

} // namespace mjsr

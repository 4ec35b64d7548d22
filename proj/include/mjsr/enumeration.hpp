#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mjsr/config.hpp"
#include "mjsr/error.hpp"
#include "mjsr/matrix.hpp"
#include "mjsr/matrix_set.hpp"

namespace mjsr {

/// Thrown when an enumeration would (or did) evaluate more complete products
/// than the configured budget allows. Carries whatever bound was achieved
/// before the cap hit; NaN when nothing completed.
struct budget_exceeded : error {
    budget_exceeded(const std::string& msg, double achieved = std::numeric_limits<double>::quiet_NaN(),
                    std::uint64_t leaves = 0)
        : error(msg), partial_value(achieved), leaves_done(leaves) {}

    double partial_value;
    std::uint64_t leaves_done;
};

struct MinimaxOutcome {
    double value = 0.0;
    IndexWord witness;
    std::uint64_t leaves = 0;
};

namespace detail {

inline void check_enumeration_budget(std::size_t branch, std::size_t depth, std::uint64_t budget,
                                     const char* what) {
    if (depth == 0) return;
    const long double log_leaves = (long double)depth * std::log((long double)branch);
    if (log_leaves > std::log((long double)budget) * (1.0L + 1e-12L) + 1e-9L)
        throw budget_exceeded(std::string(what) + ": " + std::to_string(branch) + "^" +
                              std::to_string(depth) + " complete products exceed the budget of " +
                              std::to_string(budget) + " leaf evaluations");
}

/// Two-level optimization over interleaved products A_n B_n ... A_1 B_1.
/// The outer player fixes its whole index tuple; the inner player then
/// optimizes its own tuple with full knowledge of the outer one. Tuples are
/// visited in lexicographic order (time position 0 most significant) and all
/// updates are strict, so ties always resolve to the lexicographically
/// smallest witness and results do not depend on pruning.
///
/// Pruning bounds, enabled only for norm objectives:
///   upper completion: ||suffix * P|| <= ||P|| * (max block norm)^remaining
///   lower completion: ||suffix * P|| >= sigma_min(P) * (min block sigma_min)^remaining
/// The sigma_min route needs 2x2 products and is skipped otherwise. Both
/// bounds are applied with a small safety factor so that float rounding can
/// never prune a strictly improving branch.
class MinimaxEngine {
  public:
    MinimaxEngine(const SwitchedPair& pair, std::size_t n, NormKind kind, bool outer_is_a_max,
                  bool use_norm, bool prune, std::uint64_t budget)
        : n_(n),
          kind_(kind),
          outer_is_a_max_(outer_is_a_max),
          use_norm_(use_norm),
          prune_(prune && use_norm),
          budget_(budget),
          na_(pair.a_set().size()),
          nb_(pair.b_set().size()),
          dim_(pair.state_dim()) {
        check_enumeration_budget(na_ * nb_, n_, budget_, "minimax enumeration");

        blocks_.reserve(na_ * nb_);
        for (std::size_t i = 0; i < na_; ++i)
            for (std::size_t j = 0; j < nb_; ++j)
                blocks_.push_back(mat_mul(pair.a_set().member(i), pair.b_set().member(j)));

        if (prune_) {
            double max_norm = 0.0;
            double min_smin = std::numeric_limits<double>::infinity();
            for (const Matrix& blk : blocks_) {
                max_norm = std::max(max_norm, op_norm(blk, kind_));
                if (dim_ == 2) min_smin = std::min(min_smin, sigma_min_2x2(blk));
            }
            up_pow_.assign(n_ + 1, 1.0);
            for (std::size_t r = 1; r <= n_; ++r) up_pow_[r] = up_pow_[r - 1] * max_norm;
            if (dim_ == 2) {
                lo_pow_.assign(n_ + 1, 1.0);
                for (std::size_t r = 1; r <= n_; ++r) lo_pow_[r] = lo_pow_[r - 1] * min_smin;
            }
        }

        stack_.resize(n_ + 1);
        stack_[0] = Matrix::identity(dim_);
        for (std::size_t t = 1; t <= n_; ++t) stack_[t] = Matrix(dim_, dim_);
        outer_word_.assign(n_, 0);
        inner_word_.assign(n_, 0);
    }

    MinimaxOutcome run() {
        if (n_ == 0) return {1.0, {}, 0};
        outer_best_ = outer_is_a_max_ ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::infinity();
        const std::size_t outer_count = outer_is_a_max_ ? na_ : nb_;

        // odometer over the outer word, lexicographic
        for (;;) {
            descend_inner(0);
            if (!inner_aborted_) {
                const double v = inner_best_;
                const bool improves = outer_is_a_max_ ? (v > outer_best_) : (v < outer_best_);
                if (improves) {
                    outer_best_ = v;
                    best_outer_word_ = outer_word_;
                    best_inner_word_ = inner_best_word_;
                }
            }
            std::size_t pos = n_;
            while (pos > 0) {
                if (++outer_word_[pos - 1] < outer_count) break;
                outer_word_[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }

        MinimaxOutcome out;
        out.value = outer_best_;
        out.leaves = leaves_;
        if (outer_is_a_max_)
            out.witness = IndexWord{best_outer_word_, best_inner_word_};
        else
            out.witness = IndexWord{best_inner_word_, best_outer_word_};
        return out;
    }

  private:
    const Matrix& block_at(std::size_t t) const {
        const std::size_t a = outer_is_a_max_ ? outer_word_[t] : inner_word_[t];
        const std::size_t b = outer_is_a_max_ ? inner_word_[t] : outer_word_[t];
        return blocks_[a * nb_ + b];
    }

    double leaf_value(const Matrix& product) const {
        return use_norm_ ? op_norm(product, kind_) : spectral_radius(product);
    }

    // Inner optimization for the current outer word. Resets its own state at
    // depth 0; sets inner_aborted_ when the outer word is provably dominated.
    void descend_inner(std::size_t t) {
        if (t == 0) {
            inner_best_ = outer_is_a_max_ ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
            inner_best_word_.assign(n_, 0);
            inner_aborted_ = false;
        }
        if (t == n_) {
            if (++leaves_ > budget_)
                throw budget_exceeded("enumeration budget exceeded", outer_best_, leaves_);
            const double v = leaf_value(stack_[n_]);
            const bool improves = outer_is_a_max_ ? (v < inner_best_) : (v > inner_best_);
            if (improves) {
                inner_best_ = v;
                inner_best_word_ = inner_word_;
            }
            return;
        }
        if (prune_) {
            static constexpr double kMargin = 1e-9;
            const std::size_t rem = n_ - t;
            if (outer_is_a_max_) {
                // this a-word cannot strictly beat the incumbent max
                const double ub = op_norm(stack_[t], kind_) * up_pow_[rem];
                if (ub <= outer_best_ * (1.0 - kMargin)) {
                    inner_aborted_ = true;
                    return;
                }
                // this subtree cannot strictly lower the running min
                if (!lo_pow_.empty()) {
                    const double lb = sigma_min_2x2(stack_[t]) * lo_pow_[rem];
                    if (lb >= inner_best_ * (1.0 + kMargin)) return;
                }
            } else {
                // this b-word cannot strictly lower the incumbent min
                if (!lo_pow_.empty()) {
                    const double lb = sigma_min_2x2(stack_[t]) * lo_pow_[rem];
                    if (lb >= outer_best_ * (1.0 + kMargin)) {
                        inner_aborted_ = true;
                        return;
                    }
                }
                // this subtree cannot strictly raise the running max
                const double ub = op_norm(stack_[t], kind_) * up_pow_[rem];
                if (ub <= inner_best_ * (1.0 - kMargin)) return;
            }
        }
        const std::size_t inner_count = outer_is_a_max_ ? nb_ : na_;
        for (std::size_t c = 0; c < inner_count; ++c) {
            inner_word_[t] = c;
            mat_mul_into(stack_[t + 1], block_at(t), stack_[t]);
            descend_inner(t + 1);
            if (inner_aborted_) return;
        }
    }

    std::size_t n_;
    NormKind kind_;
    bool outer_is_a_max_;
    bool use_norm_;
    bool prune_;
    std::uint64_t budget_;
    std::size_t na_, nb_, dim_;

    std::vector<Matrix> blocks_;
    std::vector<double> up_pow_, lo_pow_;
    std::vector<Matrix> stack_;
    std::vector<std::size_t> outer_word_, inner_word_;

    double outer_best_ = 0.0, inner_best_ = 0.0;
    bool inner_aborted_ = false;
    std::vector<std::size_t> best_outer_word_, best_inner_word_, inner_best_word_;
    std::uint64_t leaves_ = 0;
};

} // namespace detail

/// Product A_n B_n ... A_1 B_1 for one index word (position 0 applied first),
/// together with its norm. Each step multiplies the block A*B onto the
/// running product from the left; witness replays reproduce enumeration
/// values bit for bit.
inline std::pair<Matrix, double> eval_product(const SwitchedPair& pair, const IndexWord& word,
                                              NormKind kind) {
    validate_word(word, pair);
    Matrix product = Matrix::identity(pair.state_dim());
    Matrix next(pair.state_dim(), pair.state_dim());
    for (std::size_t t = 0; t < word.length(); ++t) {
        const Matrix block =
            mat_mul(pair.a_set().member(word.a_indices[t]), pair.b_set().member(word.b_indices[t]));
        mat_mul_into(next, block, product);
        std::swap(next, product);
    }
    return {product, op_norm(product, kind)};
}

/// max over A-tuples of the min over B-tuples of the product norm.
/// Witness: the argmax A-tuple with its argmin B-tuple, lexicographically
/// smallest on ties.
inline MinimaxOutcome max_min_norm(const SwitchedPair& pair, std::size_t n, NormKind kind,
                                   bool prune = true, std::uint64_t budget = kDefaultBudget) {
    detail::MinimaxEngine engine(pair, n, kind, /*outer_is_a_max=*/true, /*use_norm=*/true, prune,
                                 budget);
    return engine.run();
}

/// min over B-tuples of the max over A-tuples of the product norm.
inline MinimaxOutcome min_max_norm(const SwitchedPair& pair, std::size_t n, NormKind kind,
                                   bool prune = true, std::uint64_t budget = kDefaultBudget) {
    detail::MinimaxEngine engine(pair, n, kind, /*outer_is_a_max=*/false, /*use_norm=*/true, prune,
                                 budget);
    return engine.run();
}

/// Spectral-radius variants. The spectral radius is not submultiplicative
/// along partial products, so these are always exhaustive.
inline MinimaxOutcome max_min_rho(const SwitchedPair& pair, std::size_t n,
                                  std::uint64_t budget = kDefaultBudget) {
    detail::MinimaxEngine engine(pair, n, NormKind::row_sum, /*outer_is_a_max=*/true,
                                 /*use_norm=*/false, /*prune=*/false, budget);
    return engine.run();
}

inline MinimaxOutcome min_max_rho(const SwitchedPair& pair, std::size_t n,
                                  std::uint64_t budget = kDefaultBudget) {
    detail::MinimaxEngine engine(pair, n, NormKind::row_sum, /*outer_is_a_max=*/false,
                                 /*use_norm=*/false, /*prune=*/false, budget);
    return engine.run();
}

/// Extremes of norm and spectral radius over all |set|^m products of one
/// square set, with lexicographically-first witnesses. One shared pass
/// feeds both the growth-rate and the decay-rate brackets.
struct ProductScan {
    double max_norm = 0.0, min_norm = 0.0, max_rho = 0.0, min_rho = 0.0;
    std::vector<std::size_t> max_norm_word, min_norm_word, max_rho_word, min_rho_word;
    std::uint64_t leaves = 0;
};

inline ProductScan scan_products(const MatrixSet& set, std::size_t m, NormKind kind,
                                 std::uint64_t budget = kDefaultBudget) {
    if (!set.is_square())
        throw dimension_error("product scan requires square members, got " +
                              Matrix::shape_string(set.rows(), set.cols()));
    ProductScan scan;
    if (m == 0) {
        scan.max_norm = scan.min_norm = scan.max_rho = scan.min_rho = 1.0;
        return scan;
    }
    detail::check_enumeration_budget(set.size(), m, budget, "product scan");

    const std::size_t dim = set.rows();
    std::vector<Matrix> stack(m + 1, Matrix(dim, dim));
    stack[0] = Matrix::identity(dim);
    std::vector<std::size_t> word(m, 0);

    scan.max_norm = -std::numeric_limits<double>::infinity();
    scan.min_norm = std::numeric_limits<double>::infinity();
    scan.max_rho = -std::numeric_limits<double>::infinity();
    scan.min_rho = std::numeric_limits<double>::infinity();

    auto visit = [&](auto&& self, std::size_t t) -> void {
        if (t == m) {
            ++scan.leaves;
            const double norm = op_norm(stack[m], kind);
            const double rho = spectral_radius(stack[m]);
            if (norm > scan.max_norm) { scan.max_norm = norm; scan.max_norm_word = word; }
            if (norm < scan.min_norm) { scan.min_norm = norm; scan.min_norm_word = word; }
            if (rho > scan.max_rho) { scan.max_rho = rho; scan.max_rho_word = word; }
            if (rho < scan.min_rho) { scan.min_rho = rho; scan.min_rho_word = word; }
            return;
        }
        for (std::size_t c = 0; c < set.size(); ++c) {
            word[t] = c;
            mat_mul_into(stack[t + 1], set.member(c), stack[t]);
            self(self, t + 1);
        }
    };
    visit(visit, 0);
    return scan;
}

} // namespace mjsr

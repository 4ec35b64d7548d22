#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mjsr/config.hpp"
#include "mjsr/enumeration.hpp"
#include "mjsr/matrix.hpp"
#include "mjsr/matrix_set.hpp"
#include "mjsr/radii.hpp"

namespace mjsr {

/// Synthesized control policy. A block-greedy controller answers each
/// revealed adversary block with the norm-minimizing control block of the
/// same length; a periodic controller replays one fixed block forever.
struct Controller {
    enum class Kind { block_greedy, periodic };

    Kind kind = Kind::periodic;
    std::size_t block_length = 1;
    std::vector<std::size_t> periodic_b_indices; // periodic kind only

    friend bool operator==(const Controller&, const Controller&) = default;
};

inline const char* to_string(Controller::Kind k) {
    return k == Controller::Kind::block_greedy ? "block-greedy" : "periodic";
}

enum class StabilizationMode {
    asymptotic_stability,
    uniform_stabilizability,
    path_dependent,
    path_independent_periodic
};

inline const char* to_string(StabilizationMode m) {
    switch (m) {
        case StabilizationMode::asymptotic_stability: return "asymptotic-stability";
        case StabilizationMode::uniform_stabilizability: return "uniform-stabilizability";
        case StabilizationMode::path_dependent: return "path-dependent";
        case StabilizationMode::path_independent_periodic: return "path-independent-periodic";
    }
    return "?";
}

enum class Decision { yes, no_at_horizon, inconclusive };

inline const char* to_string(Decision d) {
    switch (d) {
        case Decision::yes: return "yes";
        case Decision::no_at_horizon: return "no-at-horizon";
        case Decision::inconclusive: return "inconclusive";
    }
    return "?";
}

/// Outcome of one stabilizability check. A yes carries a block length k, a
/// certified contraction factor sigma < 1 over blocks of that length, a
/// controller, and the derived exponential-decay constants C, lambda with
/// ||x(n)|| <= C lambda^n ||x(0)||. A no-at-horizon only rules out
/// certificates up to the searched horizon (except for asymptotic mode,
/// where a certified spectral lower bound >= 1 is a genuine disproof).
struct StabilizationVerdict {
    StabilizationMode mode{};
    Decision decision = Decision::inconclusive;
    std::size_t horizon = 0;
    double sigma = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double c_constant = std::numeric_limits<double>::quiet_NaN();
    std::optional<Controller> certificate;
    std::string note;
};

namespace detail {

/// Contraction and expansion tests carry the comparison tolerance so that
/// quantities equal to 1 up to float noise (unit-determinant obstructions,
/// exactly undoable products) are never certified either way.
inline bool certified_below_one(double v) { return v < 1.0 - kTol.compare_rel; }
inline bool certified_at_least_one(double v) { return v >= 1.0 + kTol.compare_rel; }

inline double max_block_norm(const SwitchedPair& pair, NormKind kind) {
    double best = 0.0;
    for (std::size_t i = 0; i < pair.a_set().size(); ++i)
        for (std::size_t j = 0; j < pair.b_set().size(); ++j)
            best = std::max(best,
                            op_norm(mat_mul(pair.a_set().member(i), pair.b_set().member(j)), kind));
    return best;
}

inline double growth_constant(double max_step, double lambda, std::size_t k) {
    if (k <= 1) return 1.0;
    return std::pow(std::max(1.0, max_step / lambda), (double)(k - 1));
}

/// Norm-minimizing control block for one revealed adversary block,
/// exhaustive and lexicographically first on ties.
inline std::pair<double, std::vector<std::size_t>> best_control_block(
    const SwitchedPair& pair, const std::vector<std::size_t>& a_block, NormKind kind,
    std::uint64_t budget = kDefaultBudget) {
    const std::size_t len = a_block.size();
    check_enumeration_budget(pair.b_set().size(), len, budget, "control block search");
    const std::size_t dim = pair.state_dim();
    std::vector<Matrix> stack(len + 1, Matrix(dim, dim));
    stack[0] = Matrix::identity(dim);
    std::vector<std::size_t> word(len, 0), best_word(len, 0);
    double best = std::numeric_limits<double>::infinity();
    Matrix block(dim, dim);
    auto visit = [&](auto&& self, std::size_t t) -> void {
        if (t == len) {
            const double v = op_norm(stack[len], kind);
            if (v < best) {
                best = v;
                best_word = word;
            }
            return;
        }
        for (std::size_t j = 0; j < pair.b_set().size(); ++j) {
            word[t] = j;
            mat_mul_into(block, pair.a_set().member(a_block[t]), pair.b_set().member(j));
            mat_mul_into(stack[t + 1], block, stack[t]);
            self(self, t + 1);
        }
    };
    if (len == 0) return {1.0, {}};
    visit(visit, 0);
    return {best, best_word};
}

inline double fixed_block_norm(const SwitchedPair& pair, const std::vector<std::size_t>& a_block,
                               const std::vector<std::size_t>& b_block, NormKind kind) {
    return eval_product(pair, IndexWord{a_block, b_block}, kind).second;
}

/// Visit every index word of the given length in lexicographic order.
template <typename Fn>
void for_each_word(std::size_t alphabet, std::size_t length, Fn&& fn) {
    std::vector<std::size_t> word(length, 0);
    if (length == 0) {
        fn(word);
        return;
    }
    for (;;) {
        fn(word);
        std::size_t pos = length;
        while (pos > 0) {
            if (++word[pos - 1] < alphabet) break;
            word[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
}

} // namespace detail

/// Asymptotic stability of x(n) = A_n B_n x(n-1) over all perturbation and
/// control sequences, decided through the joint spectral radius of the
/// product set {A*B}. Pass a one-member identity control set for an
/// uncontrolled system.
inline StabilizationVerdict check_asymptotic_stability(const SwitchedPair& pair, std::size_t n_max,
                                                       NormKind kind,
                                                       std::uint64_t budget = kDefaultBudget) {
    StabilizationVerdict v;
    v.mode = StabilizationMode::asymptotic_stability;
    const MatrixSet products = set_product(pair.a_set(), pair.b_set());
    double upper = std::numeric_limits<double>::infinity();
    double lower = 0.0;
    double max_step = 0.0;
    for (const Matrix& m : products.members()) max_step = std::max(max_step, op_norm(m, kind));
    try {
        for (std::size_t m = 1; m <= n_max; ++m) {
            const JsrRow row = jsr_row(products, m, kind, budget);
            upper = std::min(upper, row.max_norm_root);
            lower = std::max(lower, row.max_rho_root);
            if (detail::certified_below_one(row.max_norm)) {
                v.decision = Decision::yes;
                v.horizon = m;
                v.sigma = row.max_norm;
                v.lambda = row.max_norm_root;
                v.bound = upper;
                v.c_constant = detail::growth_constant(max_step, v.lambda, m);
                v.certificate = Controller{Controller::Kind::periodic, m,
                                           std::vector<std::size_t>(m, 0)};
                v.note = "every length-" + std::to_string(m) +
                         " product contracts; stability holds for every control word";
                return v;
            }
            if (detail::certified_at_least_one(lower)) {
                v.decision = Decision::no_at_horizon;
                v.horizon = m;
                v.bound = lower;
                v.note = "certified spectral lower bound >= 1; not asymptotically stable";
                return v;
            }
        }
    } catch (const budget_exceeded& e) {
        v.decision = Decision::inconclusive;
        v.horizon = n_max;
        v.bound = upper;
        v.note = std::string("enumeration budget exceeded: ") + e.what();
        return v;
    }
    v.decision = Decision::inconclusive;
    v.horizon = n_max;
    v.bound = upper;
    v.note = "bracket straddles 1 at this horizon";
    return v;
}

/// Uniform stabilizability of the uncontrolled system: search for one
/// periodic schedule whose products vanish. A norm-contracting word gives
/// the certificate directly; a word whose product only contracts spectrally
/// is lifted to the power that contracts in norm, so that sigma always
/// replays as a block norm. No disproof is possible here (the artifact
/// carries no nontrivial lower bound for the lower spectral radius), so the
/// answer is yes or inconclusive, never no.
inline StabilizationVerdict check_uniform_stabilizability(const MatrixSet& set, std::size_t n_max,
                                                          NormKind kind,
                                                          std::uint64_t budget = kDefaultBudget) {
    StabilizationVerdict v;
    v.mode = StabilizationMode::uniform_stabilizability;
    double upper = std::numeric_limits<double>::infinity();
    std::optional<std::pair<std::size_t, std::vector<std::size_t>>> spectral_candidate;

    auto finish_yes = [&](std::size_t k, double sigma, std::vector<std::size_t> schedule) {
        v.decision = Decision::yes;
        v.horizon = k;
        v.sigma = sigma;
        bool clamped = false;
        v.lambda = detail::root_of(sigma, k, clamped);
        v.bound = std::min(upper, v.lambda);
        // decay constant along the realized schedule prefixes
        Matrix prefix = Matrix::identity(set.rows());
        Matrix next(set.rows(), set.cols());
        double c = 1.0;
        double lam_pow = 1.0;
        for (std::size_t r = 0; r < k; ++r) {
            c = std::max(c, op_norm(prefix, kind) / lam_pow);
            mat_mul_into(next, set.member(schedule[r]), prefix);
            std::swap(next, prefix);
            lam_pow *= v.lambda;
        }
        v.c_constant = c;
        v.certificate = Controller{Controller::Kind::periodic, k, std::move(schedule)};
        return v;
    };

    try {
        for (std::size_t m = 1; m <= n_max; ++m) {
            const LsrRow row = lsr_row(set, m, kind, budget);
            upper = std::min(upper, std::min(row.min_norm_root, row.min_rho_root));
            if (detail::certified_below_one(row.min_norm))
                return finish_yes(m, row.min_norm, row.norm_word);
            if (!spectral_candidate && detail::certified_below_one(row.min_rho))
                spectral_candidate = {m, row.rho_word};
        }
    } catch (const budget_exceeded& e) {
        v.decision = Decision::inconclusive;
        v.horizon = n_max;
        v.bound = upper;
        v.note = std::string("enumeration budget exceeded: ") + e.what();
        return v;
    }

    if (spectral_candidate) {
        const auto& [m, word] = *spectral_candidate;
        Matrix block = Matrix::identity(set.rows());
        Matrix next(set.rows(), set.cols());
        for (std::size_t t = 0; t < m; ++t) {
            mat_mul_into(next, set.member(word[t]), block);
            std::swap(next, block);
        }
        Matrix power = block;
        constexpr std::size_t kMaxScheduleLength = 10'000;
        for (std::size_t j = 1; j * m <= kMaxScheduleLength; ++j) {
            if (detail::certified_below_one(op_norm(power, kind))) {
                std::vector<std::size_t> schedule;
                schedule.reserve(j * m);
                for (std::size_t rep = 0; rep < j; ++rep)
                    schedule.insert(schedule.end(), word.begin(), word.end());
                return finish_yes(j * m, op_norm(power, kind), std::move(schedule));
            }
            mat_mul_into(next, block, power);
            std::swap(next, power);
        }
        v.decision = Decision::inconclusive;
        v.horizon = n_max;
        v.bound = upper;
        v.note = "a word contracts spectrally but no norm-contracting power was found "
                 "within the schedule-length cap";
        return v;
    }

    v.decision = Decision::inconclusive;
    v.horizon = n_max;
    v.bound = upper;
    v.note = "no contracting schedule up to this horizon; smallest product norm root is " +
             std::to_string(upper);
    return v;
}

/// Path-dependent stabilizability: the controller sees the adversary block
/// before answering, so block length k works exactly when mu_k < 1. A
/// no-at-horizon means mu_k >= 1 for every searched k, ruling out
/// certificates up to that block length only.
inline StabilizationVerdict check_path_dependent(const SwitchedPair& pair, std::size_t k_max,
                                                 NormKind kind,
                                                 std::uint64_t budget = kDefaultBudget) {
    StabilizationVerdict v;
    v.mode = StabilizationMode::path_dependent;
    double best_root = std::numeric_limits<double>::infinity();
    bool clamped = false;
    try {
        for (std::size_t k = 1; k <= k_max; ++k) {
            const MinimaxOutcome mu = max_min_norm(pair, k, kind, true, budget);
            best_root = std::min(best_root, detail::root_of(mu.value, k, clamped));
            if (detail::certified_below_one(mu.value)) {
                v.decision = Decision::yes;
                v.horizon = k;
                v.sigma = mu.value;
                v.lambda = detail::root_of(mu.value, k, clamped);
                v.bound = best_root;
                v.c_constant =
                    detail::growth_constant(detail::max_block_norm(pair, kind), v.lambda, k);
                v.certificate = Controller{Controller::Kind::block_greedy, k, {}};
                return v;
            }
        }
    } catch (const budget_exceeded& e) {
        v.decision = Decision::inconclusive;
        v.horizon = k_max;
        v.bound = best_root;
        v.note = std::string("enumeration budget exceeded: ") + e.what();
        return v;
    }
    v.decision = Decision::no_at_horizon;
    v.horizon = k_max;
    v.bound = best_root;
    v.note = "mu_k >= 1 for every k searched; no block certificate of length <= " +
             std::to_string(k_max);
    return v;
}

/// Path-independent periodic stabilizability: one universal control block
/// must beat every adversary block, so block length k works exactly when
/// eta_k < 1. The witness block extends by periodicity.
inline StabilizationVerdict check_path_independent_periodic(const SwitchedPair& pair,
                                                            std::size_t k_max, NormKind kind,
                                                            std::uint64_t budget = kDefaultBudget) {
    StabilizationVerdict v;
    v.mode = StabilizationMode::path_independent_periodic;
    double best_root = std::numeric_limits<double>::infinity();
    bool clamped = false;
    try {
        for (std::size_t k = 1; k <= k_max; ++k) {
            const MinimaxOutcome eta = min_max_norm(pair, k, kind, true, budget);
            best_root = std::min(best_root, detail::root_of(eta.value, k, clamped));
            if (detail::certified_below_one(eta.value)) {
                v.decision = Decision::yes;
                v.horizon = k;
                v.sigma = eta.value;
                v.lambda = detail::root_of(eta.value, k, clamped);
                v.bound = best_root;
                v.c_constant =
                    detail::growth_constant(detail::max_block_norm(pair, kind), v.lambda, k);
                v.certificate =
                    Controller{Controller::Kind::periodic, k, eta.witness.b_indices};
                return v;
            }
        }
    } catch (const budget_exceeded& e) {
        v.decision = Decision::inconclusive;
        v.horizon = k_max;
        v.bound = best_root;
        v.note = std::string("enumeration budget exceeded: ") + e.what();
        return v;
    }
    v.decision = Decision::no_at_horizon;
    v.horizon = k_max;
    v.bound = best_root;
    v.note = "eta_k >= 1 for every k searched; no periodic certificate of length <= " +
             std::to_string(k_max);
    return v;
}

/// Independent verification of a yes verdict: the worst achieved block norm
/// when the certificate answers every adversary block of length k. Always
/// enumerated without pruning.
inline double replay_max_block_norm(const SwitchedPair& pair, const StabilizationVerdict& verdict,
                                    NormKind kind, std::uint64_t budget = kDefaultBudget) {
    if (!verdict.certificate) throw error("verdict carries no certificate to replay");
    const std::size_t k = verdict.horizon;
    const Controller& ctrl = *verdict.certificate;
    double worst = 0.0;
    switch (verdict.mode) {
        case StabilizationMode::asymptotic_stability: {
            const MatrixSet products = set_product(pair.a_set(), pair.b_set());
            return scan_products(products, k, kind, budget).max_norm;
        }
        case StabilizationMode::path_dependent: {
            detail::check_enumeration_budget(pair.a_set().size() * pair.b_set().size(), k, budget,
                                             "certificate replay");
            detail::for_each_word(pair.a_set().size(), k, [&](const std::vector<std::size_t>& aw) {
                worst = std::max(worst, detail::best_control_block(pair, aw, kind, budget).first);
            });
            return worst;
        }
        case StabilizationMode::path_independent_periodic: {
            detail::check_enumeration_budget(pair.a_set().size(), k, budget, "certificate replay");
            detail::for_each_word(pair.a_set().size(), k, [&](const std::vector<std::size_t>& aw) {
                worst = std::max(worst,
                                 detail::fixed_block_norm(pair, aw, ctrl.periodic_b_indices, kind));
            });
            return worst;
        }
        case StabilizationMode::uniform_stabilizability:
            throw error("uniform verdicts replay against the matrix set, not a pair");
    }
    return worst;
}

/// Uniform-mode replay: the norm of the certified periodic schedule's block
/// product (there is no adversary).
inline double replay_max_block_norm(const MatrixSet& set, const StabilizationVerdict& verdict,
                                    NormKind kind) {
    if (verdict.mode != StabilizationMode::uniform_stabilizability)
        throw error("matrix-set replay is only defined for uniform verdicts");
    if (!verdict.certificate) throw error("verdict carries no certificate to replay");
    Matrix product = Matrix::identity(set.rows());
    Matrix next(set.rows(), set.cols());
    for (std::size_t idx : verdict.certificate->periodic_b_indices) {
        mat_mul_into(next, set.member(idx), product);
        std::swap(next, product);
    }
    return op_norm(product, kind);
}

enum class AdversaryKind { worst_case_greedy, fixed_word, seeded_random };

struct Adversary {
    AdversaryKind kind = AdversaryKind::worst_case_greedy;
    std::vector<std::size_t> word; // fixed_word: cycled over the run
    std::uint64_t seed = kDefaultSeed;
};

struct Trajectory {
    std::vector<std::vector<double>> states; // x(0..T)
    std::vector<std::size_t> a_word, b_word; // realized indices, length T
    std::vector<double> norms;               // vector norm of each state
};

/// Run the closed loop for `steps` steps. The adversary reveals its block
/// first; the controller then chooses its block (block-greedy looks ahead
/// within the block only, mirroring the constructive stabilization
/// argument). The worst-case-greedy adversary maximizes the controller's
/// best response block by block; it is block-myopic, not globally optimal.
/// Without a controller the control index is fixed at 0.
inline Trajectory simulate(const SwitchedPair& pair, const std::optional<Controller>& controller,
                           const Adversary& adversary, const std::vector<double>& x0,
                           std::size_t steps, NormKind kind,
                           std::uint64_t budget = kDefaultBudget) {
    const std::size_t dim = pair.state_dim();
    if (x0.size() != dim)
        throw dimension_error("initial state has length " + std::to_string(x0.size()) +
                              ", expected " + std::to_string(dim));
    std::size_t block_len = 1;
    if (controller) {
        block_len = controller->block_length;
        if (block_len == 0) throw error("controller block length must be positive");
        if (controller->kind == Controller::Kind::periodic) {
            if (controller->periodic_b_indices.size() != block_len)
                throw error("periodic controller must carry exactly block_length indices");
            for (std::size_t idx : controller->periodic_b_indices)
                if (idx >= pair.b_set().size())
                    throw error("periodic controller index out of range");
        }
    }
    if (adversary.kind == AdversaryKind::fixed_word) {
        if (adversary.word.empty()) throw error("fixed-word adversary needs a nonempty word");
        for (std::size_t idx : adversary.word)
            if (idx >= pair.a_set().size()) throw error("adversary word index out of range");
    }

    Trajectory traj;
    traj.states.push_back(x0);
    traj.norms.push_back(vec_norm(x0, kind));

    std::mt19937_64 rng(adversary.seed);

    auto control_block_for = [&](const std::vector<std::size_t>& a_block,
                                 std::size_t block_start) -> std::vector<std::size_t> {
        const std::size_t len = a_block.size();
        if (!controller) return std::vector<std::size_t>(len, 0);
        if (controller->kind == Controller::Kind::periodic) {
            std::vector<std::size_t> out(len);
            for (std::size_t t = 0; t < len; ++t)
                out[t] = controller->periodic_b_indices[(block_start + t) % block_len];
            return out;
        }
        return detail::best_control_block(pair, a_block, kind, budget).second;
    };

    auto response_norm = [&](const std::vector<std::size_t>& a_block,
                             std::size_t block_start) -> double {
        if (controller && controller->kind == Controller::Kind::block_greedy)
            return detail::best_control_block(pair, a_block, kind, budget).first;
        return detail::fixed_block_norm(pair, a_block, control_block_for(a_block, block_start),
                                        kind);
    };

    std::vector<double> x = x0;
    for (std::size_t block_start = 0; block_start < steps; block_start += block_len) {
        const std::size_t len = std::min(block_len, steps - block_start);
        std::vector<std::size_t> a_block(len, 0);
        switch (adversary.kind) {
            case AdversaryKind::fixed_word:
                for (std::size_t t = 0; t < len; ++t)
                    a_block[t] = adversary.word[(block_start + t) % adversary.word.size()];
                break;
            case AdversaryKind::seeded_random:
                for (std::size_t t = 0; t < len; ++t)
                    a_block[t] = (std::size_t)(rng() % pair.a_set().size());
                break;
            case AdversaryKind::worst_case_greedy: {
                detail::check_enumeration_budget(
                    pair.a_set().size() * (controller && controller->kind ==
                                                               Controller::Kind::block_greedy
                                               ? pair.b_set().size()
                                               : 1),
                    len, budget, "worst-case adversary");
                double worst = -std::numeric_limits<double>::infinity();
                detail::for_each_word(pair.a_set().size(), len,
                                      [&](const std::vector<std::size_t>& cand) {
                                          const double v = response_norm(cand, block_start);
                                          if (v > worst) {
                                              worst = v;
                                              a_block = cand;
                                          }
                                      });
                break;
            }
        }
        const std::vector<std::size_t> b_block = control_block_for(a_block, block_start);
        for (std::size_t t = 0; t < len; ++t) {
            x = mat_vec(pair.a_set().member(a_block[t]),
                        mat_vec(pair.b_set().member(b_block[t]), x));
            traj.states.push_back(x);
            traj.norms.push_back(vec_norm(x, kind));
            traj.a_word.push_back(a_block[t]);
            traj.b_word.push_back(b_block[t]);
        }
    }
    return traj;
}

/// CSV export: step, state components, state norm, applied indices. The
/// initial row has no applied indices.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
    os << "step";
    for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
    os << ",norm,a_index,b_index\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf;
    };
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        os << n;
        for (double v : traj.states[n]) {
            os << ",";
            put(v);
        }
        os << ",";
        put(traj.norms[n]);
        if (n == 0)
            os << ",,";
        else
            os << "," << traj.a_word[n - 1] << "," << traj.b_word[n - 1];
        os << "\n";
    }
}

} // namespace mjsr

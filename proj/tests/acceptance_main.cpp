// Acceptance suite: end-to-end checks of the library and the CLI against
// the quantities that are exactly computable at finite horizon. Prints one
// pass/fail line per criterion and exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mjsr/mjsr.hpp"
#include "mjsr/reports.hpp"

using namespace mjsr;
using nlohmann::json;

namespace {

const std::string kDataDir = MJSR_DATA_DIR;
const std::string kCliPath = MJSR_CLI_PATH;

int g_failures = 0;

void report(int number, const std::string& name, bool ok, double seconds,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number,
                name.c_str(), seconds, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

void run_criterion(int number, const std::string& name, double time_limit_s,
                   const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && time_limit_s > 0 && seconds > time_limit_s) {
        ok = false;
        detail = "runtime limit " + std::to_string(time_limit_s) + " s exceeded";
    }
    report(number, name, ok, seconds, detail);
}

double unit(std::mt19937_64& rng) { return ((double)(rng() >> 11) + 0.5) * 0x1.0p-53; }

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo, double hi) {
    std::vector<double> entries(r * c);
    for (double& v : entries) v = lo + unit(rng) * (hi - lo);
    return Matrix(r, c, std::move(entries));
}

// two rows, two choices per row, entries uniform in [0.1, 2]
MatrixSet random_iru_set(std::mt19937_64& rng) {
    HSetSpec spec;
    spec.construction = HSetSpec::Construction::independent_row_uncertainty;
    for (int r = 0; r < 2; ++r) {
        std::vector<std::vector<double>> choices(2, std::vector<double>(2));
        for (auto& choice : choices)
            for (double& v : choice) v = 0.1 + unit(rng) * 1.9;
        spec.row_choices.push_back(std::move(choices));
    }
    return materialize(spec);
}

int run_cli(const std::string& args) {
    const std::string cmd = kCliPath + " " + args + " > /dev/null 2> /dev/null";
    const int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WEXITSTATUS(status);
}

json run_cli_json(const std::string& args, const std::string& out_name, int& exit_code) {
    const std::string out_path =
        (std::filesystem::temp_directory_path() / out_name).string();
    exit_code = run_cli(args + " --json --out " + out_path);
    std::ifstream in(out_path);
    if (!in) return json();
    return json::parse(in, nullptr, false);
}

// odometer enumeration with its own multiply, for criterion 7
template <typename Fn>
void oracle_words(std::size_t alphabet, std::size_t len, Fn&& fn) {
    std::vector<std::size_t> word(len, 0);
    for (;;) {
        fn(word);
        std::size_t pos = len;
        while (pos > 0) {
            if (++word[pos - 1] < alphabet) break;
            word[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
}

std::vector<double> oracle_mul(const std::vector<double>& a, const std::vector<double>& b,
                               std::size_t n, std::size_t k, std::size_t m) {
    std::vector<double> out(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) acc += a[i * k + t] * b[t * m + j];
            out[i * m + j] = acc;
        }
    return out;
}

double oracle_row_sum(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
    double best = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) s += std::abs(m[i * cols + j]);
        best = std::max(best, s);
    }
    return best;
}

struct OracleOutcome {
    double value;
    std::vector<std::size_t> a_word, b_word;
};

OracleOutcome oracle_max_min(const SwitchedPair& pair, std::size_t n) {
    const std::size_t dim = pair.state_dim();
    std::vector<std::vector<double>> blocks;
    for (std::size_t i = 0; i < pair.a_set().size(); ++i)
        for (std::size_t j = 0; j < pair.b_set().size(); ++j)
            blocks.push_back(oracle_mul(pair.a_set().member(i).entries(),
                                        pair.b_set().member(j).entries(), dim, pair.a_set().cols(),
                                        dim));
    std::vector<double> eye(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) eye[i * dim + i] = 1.0;

    OracleOutcome out{-1e300, {}, {}};
    oracle_words(pair.a_set().size(), n, [&](const std::vector<std::size_t>& aw) {
        double inner = 1e300;
        std::vector<std::size_t> inner_word;
        oracle_words(pair.b_set().size(), n, [&](const std::vector<std::size_t>& bw) {
            std::vector<double> p = eye;
            for (std::size_t t = 0; t < n; ++t)
                p = oracle_mul(blocks[aw[t] * pair.b_set().size() + bw[t]], p, dim, dim, dim);
            const double v = oracle_row_sum(p, dim, dim);
            if (v < inner) {
                inner = v;
                inner_word = bw;
            }
        });
        if (inner > out.value) {
            out.value = inner;
            out.a_word = aw;
            out.b_word = inner_word;
        }
    });
    return out;
}

OracleOutcome oracle_min_max(const SwitchedPair& pair, std::size_t n) {
    const std::size_t dim = pair.state_dim();
    std::vector<std::vector<double>> blocks;
    for (std::size_t i = 0; i < pair.a_set().size(); ++i)
        for (std::size_t j = 0; j < pair.b_set().size(); ++j)
            blocks.push_back(oracle_mul(pair.a_set().member(i).entries(),
                                        pair.b_set().member(j).entries(), dim, pair.a_set().cols(),
                                        dim));
    std::vector<double> eye(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) eye[i * dim + i] = 1.0;

    OracleOutcome out{1e300, {}, {}};
    oracle_words(pair.b_set().size(), n, [&](const std::vector<std::size_t>& bw) {
        double inner = -1e300;
        std::vector<std::size_t> inner_word;
        oracle_words(pair.a_set().size(), n, [&](const std::vector<std::size_t>& aw) {
            std::vector<double> p = eye;
            for (std::size_t t = 0; t < n; ++t)
                p = oracle_mul(blocks[aw[t] * pair.b_set().size() + bw[t]], p, dim, dim, dim);
            const double v = oracle_row_sum(p, dim, dim);
            if (v > inner) {
                inner = v;
                inner_word = aw;
            }
        });
        if (inner < out.value) {
            out.value = inner;
            out.a_word = inner_word;
            out.b_word = bw;
        }
    });
    return out;
}

bool criterion1(std::string& detail) {
    const ProblemFile file = load_problem_file(kDataDir + "/example2.json");
    const SwitchedPair pair = file.resolve_pair("ab");
    for (std::size_t m = 1; m <= 4; ++m) {
        const double mu = max_min_norm(pair, m, NormKind::row_sum).value;
        if (std::abs(mu - 1.0) >= 1e-9) {
            detail = "mu_" + std::to_string(m) + " = " + std::to_string(mu);
            return false;
        }
    }
    const double target = std::sqrt(1.5);
    for (std::size_t m = 2; m <= 4; m += 2) {
        const double eta = min_max_norm(pair, m, NormKind::row_sum).value;
        const double root = std::exp(std::log(eta) / (double)m);
        if (root < target - 1e-9) {
            detail = "eta_" + std::to_string(m) + "^(1/m) = " + std::to_string(root);
            return false;
        }
    }
    return true;
}

bool criterion2(std::string& detail) {
    const ProblemFile file = load_problem_file(kDataDir + "/example1.json");
    const MatrixSet set = file.resolve_set("A");
    double min_norm = 1e300;
    for (std::size_t m = 1; m <= 8; ++m)
        min_norm = std::min(min_norm, scan_products(set, m, NormKind::spectral).min_norm);
    if (std::abs(min_norm - 1.0) >= 1e-9) {
        detail = "min spectral norm = " + std::to_string(min_norm);
        return false;
    }

    int exit_code = 0;
    const json verdict = run_cli_json("stabilize " + kDataDir +
                                          "/example1.json A --mode uniform --k-max 8 "
                                          "--norm spectral",
                                      "acceptance_uniform.json", exit_code);
    if (exit_code != 4) {
        detail = "uniform exit code " + std::to_string(exit_code) + " (want 4)";
        return false;
    }
    if (!verdict.contains("bound") || std::abs(verdict["bound"].get<double>() - 1.0) > 1e-9) {
        detail = "uniform bound " + verdict.value("bound", json()).dump();
        return false;
    }

    const json jsr = run_cli_json("jsr " + kDataDir + "/example1.json A --n 1 --norm spectral",
                                  "acceptance_jsr.json", exit_code);
    if (exit_code != 0 || !jsr.contains("bracket")) {
        detail = "jsr run failed";
        return false;
    }
    if (jsr["bracket"]["lower"].get<double>() < 2.0 - 1e-9) {
        detail = "jsr lower " + jsr["bracket"]["lower"].dump();
        return false;
    }
    return true;
}

bool criterion3(std::string& detail) {
    bool clamped = false;
    for (int i = 0; i < 20; ++i) {
        std::mt19937_64 rng(0x5EED3000ULL + (unsigned)i);
        const SwitchedPair pair(random_iru_set(rng), random_iru_set(rng));
        const double value = hset_minimax_value(pair);
        for (std::size_t m = 1; m <= 4; ++m) {
            const double mu_bar =
                detail::root_of(max_min_rho(pair, m).value, m, clamped);
            const double eta_bar =
                detail::root_of(min_max_rho(pair, m).value, m, clamped);
            if (std::abs(mu_bar - value) > 1e-7 * std::abs(value) ||
                std::abs(eta_bar - value) > 1e-7 * std::abs(value)) {
                detail = "pair " + std::to_string(i) + " m=" + std::to_string(m) +
                         ": mu_bar root " + std::to_string(mu_bar) + ", eta_bar root " +
                         std::to_string(eta_bar) + ", saddle " + std::to_string(value);
                return false;
            }
        }
        for (std::size_t m = 1; m <= 6; ++m) {
            const double mu_root =
                detail::root_of(max_min_norm(pair, m, NormKind::row_sum).value, m, clamped);
            const double eta_root =
                detail::root_of(min_max_norm(pair, m, NormKind::row_sum).value, m, clamped);
            if (mu_root < value - 1e-7 || eta_root < value - 1e-7) {
                detail = "pair " + std::to_string(i) + " m=" + std::to_string(m) +
                         ": norm roots dip below the saddle value";
                return false;
            }
        }
    }
    return true;
}

bool criterion4(std::string& detail) {
    for (int i = 0; i < 20; ++i) {
        std::mt19937_64 rng(0x5EED3000ULL + (unsigned)i);
        const SwitchedPair pair(random_iru_set(rng), random_iru_set(rng));
        const SaddleCertificate cert = saddle_search(pair);
        if (cert.max_row_residual >= 1e-9 || cert.min_col_residual >= 1e-9) {
            detail = "pair " + std::to_string(i) + " residuals " +
                     std::to_string(cert.max_row_residual) + ", " +
                     std::to_string(cert.min_col_residual);
            return false;
        }
        // exhaustive payoff table: the value is both security levels
        double maximin = -1e300, minimax = 1e300;
        for (std::size_t a = 0; a < pair.a_set().size(); ++a) {
            double row_min = 1e300;
            for (std::size_t b = 0; b < pair.b_set().size(); ++b)
                row_min = std::min(row_min, spectral_radius(mat_mul(pair.a_set().member(a),
                                                                    pair.b_set().member(b))));
            maximin = std::max(maximin, row_min);
        }
        for (std::size_t b = 0; b < pair.b_set().size(); ++b) {
            double col_max = -1e300;
            for (std::size_t a = 0; a < pair.a_set().size(); ++a)
                col_max = std::max(col_max, spectral_radius(mat_mul(pair.a_set().member(a),
                                                                    pair.b_set().member(b))));
            minimax = std::min(minimax, col_max);
        }
        if (std::abs(cert.value - maximin) > 1e-12 * std::max(1.0, std::abs(maximin)) ||
            std::abs(cert.value - minimax) > 1e-12 * std::max(1.0, std::abs(minimax))) {
            detail = "pair " + std::to_string(i) + " security levels " + std::to_string(maximin) +
                     "/" + std::to_string(minimax) + " vs " + std::to_string(cert.value);
            return false;
        }
    }
    return true;
}

bool criterion5(std::string& detail) {
    for (int i = 0; i < 20; ++i) {
        std::mt19937_64 rng(0x5EED5000ULL + (unsigned)i);
        const std::size_t dim = 2 + (std::size_t)(rng() % 2);
        const std::size_t count = 1 + (std::size_t)(rng() % 3);
        std::vector<Matrix> members;
        for (std::size_t k = 0; k < count; ++k)
            members.push_back(random_matrix(rng, dim, dim, -1.5, 1.5));
        const MatrixSet set(std::move(members));
        const MatrixSet eye({Matrix::identity(dim)});
        const SwitchedPair identity_control(set, eye);
        const SwitchedPair identity_plant(eye, set);
        for (std::size_t m = 1; m <= 4; ++m) {
            const ProductScan scan = scan_products(set, m, NormKind::row_sum);
            const double mu_c = max_min_norm(identity_control, m, NormKind::row_sum).value;
            const double eta_c = min_max_norm(identity_control, m, NormKind::row_sum).value;
            const double mu_p = max_min_norm(identity_plant, m, NormKind::row_sum).value;
            const double eta_p = min_max_norm(identity_plant, m, NormKind::row_sum).value;
            if (mu_c != scan.max_norm || eta_c != scan.max_norm || mu_p != scan.min_norm ||
                eta_p != scan.min_norm) {
                detail = "set " + std::to_string(i) + " m=" + std::to_string(m) +
                         ": reduction not exact";
                return false;
            }
        }
    }
    return true;
}

bool criterion6(std::string& detail) {
    for (int i = 0; i < 20; ++i) {
        std::mt19937_64 rng(0x5EED6000ULL + (unsigned)i);
        std::vector<Matrix> as = {random_matrix(rng, 2, 2, -1.5, 1.5),
                                  random_matrix(rng, 2, 2, -1.5, 1.5)};
        std::vector<Matrix> bs = {random_matrix(rng, 2, 2, -1.5, 1.5),
                                  random_matrix(rng, 2, 2, -1.5, 1.5)};
        const SwitchedPair pair{MatrixSet(as), MatrixSet(bs)};
        double mu[7], eta[7];
        for (std::size_t n = 1; n <= 6; ++n) {
            mu[n] = max_min_norm(pair, n, NormKind::row_sum).value;
            eta[n] = min_max_norm(pair, n, NormKind::row_sum).value;
        }
        for (std::size_t p = 1; p <= 5; ++p)
            for (std::size_t q = 1; p + q <= 6; ++q) {
                if (mu[p + q] > mu[p] * mu[q] * (1.0 + 1e-9)) {
                    detail = "pair " + std::to_string(i) + ": mu_" + std::to_string(p + q) +
                             " > mu_" + std::to_string(p) + " * mu_" + std::to_string(q);
                    return false;
                }
                if (eta[p + q] > eta[p] * eta[q] * (1.0 + 1e-9)) {
                    detail = "pair " + std::to_string(i) + ": eta_" + std::to_string(p + q) +
                             " > eta_" + std::to_string(p) + " * eta_" + std::to_string(q);
                    return false;
                }
            }
    }
    return true;
}

bool criterion7(std::string& detail) {
    for (int i = 0; i < 50; ++i) {
        std::mt19937_64 rng(0x5EED7000ULL + (unsigned)i);
        const std::size_t na = 1 + (std::size_t)(rng() % 3);
        const std::size_t nb = 1 + (std::size_t)(rng() % 3);
        std::vector<Matrix> as, bs;
        for (std::size_t k = 0; k < na; ++k) as.push_back(random_matrix(rng, 2, 2, -1.5, 1.5));
        for (std::size_t k = 0; k < nb; ++k) bs.push_back(random_matrix(rng, 2, 2, -1.5, 1.5));
        const SwitchedPair pair{MatrixSet(as), MatrixSet(bs)};
        const std::size_t n = 1 + (std::size_t)(rng() % 4);

        const MinimaxOutcome mu = max_min_norm(pair, n, NormKind::row_sum, true);
        const OracleOutcome mu_want = oracle_max_min(pair, n);
        if (mu.value != mu_want.value || mu.witness.a_indices != mu_want.a_word ||
            mu.witness.b_indices != mu_want.b_word) {
            detail = "pair " + std::to_string(i) + " max-min mismatch at n=" + std::to_string(n);
            return false;
        }
        const MinimaxOutcome eta = min_max_norm(pair, n, NormKind::row_sum, true);
        const OracleOutcome eta_want = oracle_min_max(pair, n);
        if (eta.value != eta_want.value || eta.witness.a_indices != eta_want.a_word ||
            eta.witness.b_indices != eta_want.b_word) {
            detail = "pair " + std::to_string(i) + " min-max mismatch at n=" + std::to_string(n);
            return false;
        }
    }
    return true;
}

bool criterion8(std::string& detail) {
    int yes_count = 0;
    for (int i = 0; i < 12; ++i) {
        std::mt19937_64 rng(0x5EED8000ULL + (unsigned)i);
        std::vector<Matrix> as = {random_matrix(rng, 2, 2, -1.0, 1.0),
                                  random_matrix(rng, 2, 2, -1.0, 1.0)};
        std::vector<Matrix> bs = {random_matrix(rng, 2, 2, -0.8, 0.8),
                                  random_matrix(rng, 2, 2, -0.8, 0.8)};
        const SwitchedPair pair{MatrixSet(as), MatrixSet(bs)};

        std::vector<StabilizationVerdict> verdicts = {
            check_asymptotic_stability(pair, 3, NormKind::row_sum),
            check_path_dependent(pair, 3, NormKind::row_sum),
            check_path_independent_periodic(pair, 3, NormKind::row_sum)};
        const MatrixSet products = set_product(pair.a_set(), pair.b_set());
        verdicts.push_back(check_uniform_stabilizability(products, 3, NormKind::row_sum));

        for (const StabilizationVerdict& v : verdicts) {
            if (v.decision != Decision::yes) continue;
            ++yes_count;
            const double replayed =
                v.mode == StabilizationMode::uniform_stabilizability
                    ? replay_max_block_norm(products, v, NormKind::row_sum)
                    : replay_max_block_norm(pair, v, NormKind::row_sum);
            if (replayed > v.sigma + 1e-9) {
                detail = "pair " + std::to_string(i) + " " + to_string(v.mode) +
                         ": replay " + std::to_string(replayed) + " > sigma " +
                         std::to_string(v.sigma);
                return false;
            }

            // uniform certificates drive the uncontrolled family through an
            // identity plant
            const bool uniform = v.mode == StabilizationMode::uniform_stabilizability;
            const SwitchedPair sim_pair =
                uniform ? SwitchedPair(MatrixSet({Matrix::identity(2)}), products) : pair;
            for (auto adversary_kind :
                 {AdversaryKind::worst_case_greedy, AdversaryKind::seeded_random}) {
                const Trajectory traj =
                    simulate(sim_pair, v.certificate, Adversary{adversary_kind, {}, 0x5EED},
                             {1.0, 1.0}, v.horizon * 10, NormKind::row_sum);
                for (std::size_t block = 1; block <= 10; ++block) {
                    const double bound =
                        std::pow(v.sigma, (double)block) * traj.norms[0] + 1e-6;
                    if (traj.norms[block * v.horizon] > bound) {
                        detail = "pair " + std::to_string(i) + " " + to_string(v.mode) +
                                 ": ||x|| " + std::to_string(traj.norms[block * v.horizon]) +
                                 " > " + std::to_string(bound) + " at block " +
                                 std::to_string(block);
                        return false;
                    }
                }
            }
        }
    }
    if (yes_count == 0) {
        detail = "no yes-verdicts produced; soundness not exercised";
        return false;
    }
    detail = std::to_string(yes_count) + " yes-verdicts replayed";
    return true;
}

} // namespace

int main() {
    std::printf("acceptance suite (data: %s)\n", kDataDir.c_str());

    run_criterion(1, "undoable pair: mu_m pinned at 1, eta_m above sqrt(3/2)", 10.0, criterion1);
    run_criterion(2, "unit-determinant set: spectral floor at 1, jsr lower 2", 10.0, criterion2);
    run_criterion(3, "hourglass pairs: six-way equality of the minimax radii", 60.0, criterion3);
    run_criterion(4, "hourglass pairs: saddle certificates match security levels", 0.0,
                  criterion4);
    run_criterion(5, "identity reductions hold exactly", 0.0, criterion5);
    run_criterion(6, "mu and eta are submultiplicative across horizons", 0.0, criterion6);
    run_criterion(7, "pruned enumeration equals the exhaustive oracle", 0.0, criterion7);
    run_criterion(8, "yes-certificates replay and trajectories decay", 0.0, criterion8);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}

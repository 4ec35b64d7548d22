#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mjsr/config.hpp"
#include "mjsr/error.hpp"

namespace mjsr {

/// Operator norms used throughout: induced by the vector max-norm (row_sum),
/// by the vector 1-norm (col_sum), and by the Euclidean norm (spectral).
/// All three are submultiplicative.
enum class NormKind { row_sum, col_sum, spectral };

inline const char* to_string(NormKind kind) {
    switch (kind) {
        case NormKind::row_sum: return "row-sum";
        case NormKind::col_sum: return "col-sum";
        case NormKind::spectral: return "spectral";
    }
    return "?";
}

inline std::optional<NormKind> norm_kind_from_string(std::string_view s) {
    if (s == "row-sum") return NormKind::row_sum;
    if (s == "col-sum") return NormKind::col_sum;
    if (s == "spectral") return NormKind::spectral;
    return std::nullopt;
}

/// Dense real matrix, row-major doubles. Checked construction rejects
/// non-finite entries and wrong entry counts; shapes are fixed for life.
class Matrix {
  public:
    Matrix() = default; // empty placeholder, only valid as assignment target

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0)
            throw invalid_matrix_error("matrix dimensions must be positive, got " +
                                       shape_string(rows, cols));
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (rows == 0 || cols == 0)
            throw invalid_matrix_error("matrix dimensions must be positive, got " +
                                       shape_string(rows, cols));
        if (entries_.size() != rows * cols)
            throw invalid_matrix_error("expected " + std::to_string(rows * cols) +
                                       " entries for a " + shape_string(rows, cols) +
                                       " matrix, got " + std::to_string(entries_.size()));
        for (double v : entries_)
            if (!std::isfinite(v))
                throw invalid_matrix_error("matrix entries must be finite");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

    const std::vector<double>& entries() const { return entries_; }

    bool strictly_positive() const {
        return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v > 0.0; });
    }

    std::string shape() const { return shape_string(rows_, cols_); }

    static std::string shape_string(std::size_t r, std::size_t c) {
        return std::to_string(r) + "x" + std::to_string(c);
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

/// dst = a * b without allocation; dst must not alias a or b.
inline void mat_mul_into(Matrix& dst, const Matrix& a, const Matrix& b) {
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    if (dst.rows() != n || dst.cols() != m) dst = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) acc += a(i, t) * b(t, j);
            dst(i, j) = acc;
        }
    }
}

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw dimension_error("cannot multiply " + a.shape() + " by " + b.shape());
    Matrix out(a.rows(), b.cols());
    mat_mul_into(out, a, b);
    return out;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) { return mat_mul(a, b); }

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw dimension_error("cannot add " + a.shape() + " and " + b.shape());
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    return out;
}

inline std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v) {
    if (v.size() != m.cols())
        throw dimension_error("cannot apply " + m.shape() + " to a vector of length " +
                              std::to_string(v.size()));
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

/// Vector norm that induces the given matrix norm.
inline double vec_norm(const std::vector<double>& v, NormKind kind) {
    double acc = 0.0;
    switch (kind) {
        case NormKind::row_sum: // max-norm
            for (double x : v) acc = std::max(acc, std::abs(x));
            return acc;
        case NormKind::col_sum: // 1-norm
            for (double x : v) acc += std::abs(x);
            return acc;
        case NormKind::spectral: // Euclidean
            for (double x : v) acc += x * x;
            return std::sqrt(acc);
    }
    return 0.0;
}

inline double row_sum_norm(const Matrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

inline double col_sum_norm(const Matrix& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

double spectral_radius(const Matrix& m);

/// Largest singular value, computed as the square root of the spectral
/// radius of m^T m.
inline double spectral_norm(const Matrix& m) {
    Matrix gram(m.cols(), m.cols());
    for (std::size_t i = 0; i < m.cols(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < m.rows(); ++t) acc += m(t, i) * m(t, j);
            gram(i, j) = acc;
        }
    return std::sqrt(std::max(0.0, spectral_radius(gram)));
}

inline double op_norm(const Matrix& m, NormKind kind) {
    switch (kind) {
        case NormKind::row_sum: return row_sum_norm(m);
        case NormKind::col_sum: return col_sum_norm(m);
        case NormKind::spectral: return spectral_norm(m);
    }
    return 0.0;
}

namespace detail {

inline double spectral_radius_2x2(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return std::max(std::abs((tr + s) / 2.0), std::abs((tr - s) / 2.0));
    }
    // complex pair; modulus^2 = det, which is positive here
    return std::sqrt(det);
}

} // namespace detail

/// Largest eigenvalue modulus. 1x1 and 2x2 use closed forms; larger matrices
/// use Gelfand iteration by repeated squaring, renormalizing each square by
/// its row-sum norm and accumulating the scale in extended-precision logs so
/// that effective powers up to 2^64 neither overflow nor underflow.
inline double spectral_radius(const Matrix& m) {
    if (!m.is_square())
        throw dimension_error("spectral radius requires a square matrix, got " + m.shape());
    const std::size_t n = m.rows();
    if (n == 1) return std::abs(m(0, 0));
    if (n == 2) return detail::spectral_radius_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));

    const double norm0 = row_sum_norm(m);
    if (norm0 == 0.0) return 0.0;

    Matrix x(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = m(i, j) / norm0;

    long double log_scale = std::log((long double)norm0);
    long double power = 1.0L; // current effective exponent 2^j
    double estimate = norm0;  // ||m^(2^j)||^(1/2^j), starting at j = 0
    // Estimates can sit flat before a nilpotent part dies off, so the
    // relative-change test only arms once the effective power exceeds any
    // possible nilpotency index (64 > the ~32 dimension cap).
    Matrix sq(n, n);
    for (int j = 0; j < 64; ++j) {
        mat_mul_into(sq, x, x);
        const double s = row_sum_norm(sq);
        if (s == 0.0) return 0.0; // nilpotent
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < n; ++c) x(i, c) = sq(i, c) / s;
        log_scale = 2.0L * log_scale + std::log((long double)s);
        power *= 2.0L;
        const double next = (double)std::exp(log_scale / power);
        if (j >= 6 && std::abs(next - estimate) < kTol.iterate_rel * std::max(next, 1e-300)) {
            return next;
        }
        estimate = next;
    }
    return estimate;
}

/// Smallest singular value of a 2x2 matrix (equals 1/||X^-1|| in the
/// spectral norm when X is invertible). Used for sound lower-completion
/// bounds during enumeration; callers must check the shape.
inline double sigma_min_2x2(const Matrix& m) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double t = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::max(0.0, t * t - 4.0 * det * det);
    const double lam_min = (t - std::sqrt(disc)) / 2.0;
    return std::sqrt(std::max(0.0, lam_min));
}

} // namespace mjsr

#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mjsr/error.hpp"
#include "mjsr/matrix.hpp"

namespace mjsr {

/// Finite, nonempty, ordered collection of matrices of one shared shape.
/// Labels are optional; when present they must be unique.
class MatrixSet {
  public:
    explicit MatrixSet(std::vector<Matrix> members, std::vector<std::string> labels = {})
        : members_(std::move(members)), labels_(std::move(labels)) {
        if (members_.empty()) throw invalid_matrix_error("matrix set must be nonempty");
        rows_ = members_.front().rows();
        cols_ = members_.front().cols();
        for (const Matrix& m : members_)
            if (m.rows() != rows_ || m.cols() != cols_)
                throw dimension_error("matrix set members must share one shape; saw " +
                                      members_.front().shape() + " and " + m.shape());
        if (!labels_.empty()) {
            if (labels_.size() != members_.size())
                throw invalid_matrix_error("label count does not match member count");
            std::unordered_set<std::string> seen;
            for (const std::string& l : labels_)
                if (!seen.insert(l).second)
                    throw invalid_matrix_error("duplicate label '" + l + "' in matrix set");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return members_.size(); }
    bool is_square() const { return rows_ == cols_; }

    const Matrix& member(std::size_t i) const { return members_[i]; }
    const std::vector<Matrix>& members() const { return members_; }

    bool has_labels() const { return !labels_.empty(); }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Label of member i, or "<prefix><i+1>" when the set carries none.
    std::string label(std::size_t i, const std::string& prefix = "m") const {
        if (!labels_.empty()) return labels_[i];
        return prefix + std::to_string(i + 1);
    }

    bool strictly_positive() const {
        for (const Matrix& m : members_)
            if (!m.strictly_positive()) return false;
        return true;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Matrix> members_;
    std::vector<std::string> labels_;
};

/// Compatible pair: plant set of shape N x M, control set of shape M x N,
/// so that every product A*B is square N x N.
class SwitchedPair {
  public:
    SwitchedPair(MatrixSet a_set, MatrixSet b_set)
        : a_(std::move(a_set)), b_(std::move(b_set)) {
        if (a_.cols() != b_.rows() || a_.rows() != b_.cols())
            throw dimension_error(
                "pair shapes must be NxM and MxN; got " + Matrix::shape_string(a_.rows(), a_.cols()) +
                " and " + Matrix::shape_string(b_.rows(), b_.cols()));
    }

    const MatrixSet& a_set() const { return a_; }
    const MatrixSet& b_set() const { return b_; }

    /// State dimension N of the products A*B.
    std::size_t state_dim() const { return a_.rows(); }

  private:
    MatrixSet a_;
    MatrixSet b_;
};

/// Factor choices of one interleaved product, in time order: index 0 is the
/// first factor applied. Single-set enumerations leave b_indices empty.
struct IndexWord {
    std::vector<std::size_t> a_indices;
    std::vector<std::size_t> b_indices;

    std::size_t length() const { return a_indices.size(); }

    friend bool operator==(const IndexWord&, const IndexWord&) = default;
};

inline void validate_word(const IndexWord& word, const SwitchedPair& pair) {
    if (word.a_indices.size() != word.b_indices.size())
        throw invalid_matrix_error("index word sides differ in length: " +
                                   std::to_string(word.a_indices.size()) + " vs " +
                                   std::to_string(word.b_indices.size()));
    for (std::size_t i : word.a_indices)
        if (i >= pair.a_set().size())
            throw invalid_matrix_error("a-index " + std::to_string(i) + " out of range (set has " +
                                       std::to_string(pair.a_set().size()) + " members)");
    for (std::size_t i : word.b_indices)
        if (i >= pair.b_set().size())
            throw invalid_matrix_error("b-index " + std::to_string(i) + " out of range (set has " +
                                       std::to_string(pair.b_set().size()) + " members)");
}

} // namespace mjsr

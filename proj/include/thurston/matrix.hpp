#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thurston/errors.hpp"
#include "thurston/rational.hpp"

namespace thurston {

using ExactVector = std::vector<GaussianRational>;

/// Dense row-major matrix over the Gaussian rationals.
class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
    ExactMatrix(std::size_t rows, std::size_t cols, std::vector<GaussianRational> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (entries_.size() != rows_ * cols_) throw UsageError("matrix entry count does not match shape");
    }
    ExactMatrix(std::initializer_list<std::initializer_list<GaussianRational>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        for (const auto& r : rows) {
            if (r.size() != cols_) throw UsageError("ragged matrix literal");
            entries_.insert(entries_.end(), r.begin(), r.end());
        }
    }

    static ExactMatrix identity(std::size_t n) {
        ExactMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] const std::vector<GaussianRational>& entries() const noexcept { return entries_; }

    GaussianRational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const GaussianRational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    [[nodiscard]] ExactVector row(std::size_t r) const {
        return {entries_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
    }

    [[nodiscard]] ExactVector operator*(std::span<const GaussianRational> v) const {
        if (v.size() != cols_) throw UsageError("matrix-vector dimension mismatch");
        ExactVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                if (!(*this)(r, c).is_zero() && !v[c].is_zero()) out[r] += (*this)(r, c) * v[c];
        return out;
    }

    friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
        if (a.cols_ != b.rows_) throw UsageError("matrix-matrix dimension mismatch");
        ExactMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
            }
        return out;
    }

    friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<GaussianRational> entries_;
};

inline std::ostream& operator<<(std::ostream& os, const ExactMatrix& m) {
    os << '[';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << (r ? ",[" : "[");
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? "," : "") << m(r, c);
        os << ']';
    }
    return os << ']';
}

struct RrefResult {
    ExactMatrix matrix;
    std::vector<std::size_t> pivots;  // ascending pivot columns
};

/// Reduced row echelon form by exact Gauss-Jordan elimination (first nonzero pivot).
inline RrefResult rref(ExactMatrix m) {
    std::vector<std::size_t> pivots;
    std::size_t lead_row = 0;
    for (std::size_t c = 0; c < m.cols() && lead_row < m.rows(); ++c) {
        std::size_t p = lead_row;
        while (p < m.rows() && m(p, c).is_zero()) ++p;
        if (p == m.rows()) continue;
        if (p != lead_row)
            for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m(p, k), m(lead_row, k));
        const GaussianRational inv = GaussianRational(1) / m(lead_row, c);
        for (std::size_t k = c; k < m.cols(); ++k) m(lead_row, k) *= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == lead_row || m(r, c).is_zero()) continue;
            const GaussianRational factor = m(r, c);
            for (std::size_t k = c; k < m.cols(); ++k)
                if (!m(lead_row, k).is_zero()) m(r, k) -= factor * m(lead_row, k);
        }
        pivots.push_back(c);
        ++lead_row;
    }
    return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const ExactMatrix& m) { return rref(m).pivots.size(); }

/// Basis of ker(m), one vector per free column, each scaled so its first nonzero entry is 1.
inline std::vector<ExactVector> nullspace(const ExactMatrix& m) {
    const auto [r, pivots] = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;

    std::vector<ExactVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        ExactVector v(m.cols());
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -r(i, free);
        const auto lead = std::find_if(v.begin(), v.end(), [](const auto& q) { return !q.is_zero(); });
        const GaussianRational scale = GaussianRational(1) / *lead;
        for (auto& q : v) q *= scale;
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One exact solution of m x = rhs (free variables set to zero), or nullopt when inconsistent.
inline std::optional<ExactVector> solve(const ExactMatrix& m, std::span<const GaussianRational> rhs) {
    if (rhs.size() != m.rows()) throw UsageError("right-hand side length does not match row count");
    ExactMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
        aug(r, m.cols()) = rhs[r];
    }
    const auto [red, pivots] = rref(std::move(aug));
    if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
    ExactVector x(m.cols());
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = red(i, m.cols());
    return x;
}

}  // namespace thurston

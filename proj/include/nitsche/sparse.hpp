#pragma once

/**
 * @file sparse.hpp
 * @brief Compressed row storage and a triplet builder that sums duplicates.
 */

#include "nitsche/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace nitsche {

class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols, std::vector<double> vals)
        : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals))
    {
        if (row_ptr_.size() != n_ + 1 || cols_.size() != vals_.size() || row_ptr_.back() != vals_.size())
            throw Error("inconsistent compressed row arrays");
    }

    [[nodiscard]] std::size_t rows() const noexcept { return n_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return vals_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] const std::vector<std::size_t>& cols() const noexcept { return cols_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return vals_; }

    /// Entry (i, j); zero when not stored.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const
    {
        const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i));
        const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i + 1));
        const auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return 0.0;
        return vals_[static_cast<std::size_t>(it - cols_.begin())];
    }

    [[nodiscard]] std::vector<double> diagonal() const
    {
        std::vector<double> d(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
        return d;
    }

    /// y = A x with a fixed per-row summation order.
    void multiply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
            y[i] = s;
        }
    }

    [[nodiscard]] std::vector<double> operator*(std::span<const double> x) const
    {
        std::vector<double> y(n_);
        multiply(x, y);
        return y;
    }

    [[nodiscard]] double max_abs() const noexcept
    {
        double m = 0.0;
        for (const double v : vals_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t n_{0};
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
};

/// Coordinate-format accumulator; duplicates are summed in insertion order.
class TripletBuilder {
public:
    explicit TripletBuilder(std::size_t n) : n_(n) {}

    void add(std::size_t i, std::size_t j, double v)
    {
        if (i >= n_ || j >= n_) throw Error("triplet index out of range");
        entries_.push_back({i, j, v});
    }

    [[nodiscard]] CsrMatrix finalize() const
    {
        std::vector<std::size_t> order(entries_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ea = entries_[a];
            const auto& eb = entries_[b];
            return ea.row != eb.row ? ea.row < eb.row : ea.col < eb.col;
        });
        std::vector<std::size_t> row_ptr(n_ + 1, 0);
        std::vector<std::size_t> cols;
        std::vector<double> vals;
        std::size_t k = 0;
        while (k < order.size()) {
            const Entry& first = entries_[order[k]];
            double sum = 0.0;
            std::size_t m = k;
            for (; m < order.size() && entries_[order[m]].row == first.row && entries_[order[m]].col == first.col; ++m)
                sum += entries_[order[m]].value;
            if (sum != 0.0) {
                cols.push_back(first.col);
                vals.push_back(sum);
                ++row_ptr[first.row + 1];
            }
            k = m;
        }
        std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
        return CsrMatrix(n_, std::move(row_ptr), std::move(cols), std::move(vals));
    }

private:
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };
    std::size_t n_;
    std::vector<Entry> entries_;
};

} // namespace nitsche

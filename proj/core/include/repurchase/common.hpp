#pragma once

// Shared value types, error classes and seeding helpers used across the
// repurchase prediction library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace repurchase {

/// Number of behaviour features per <user, item> pair (R, F, M, S, T).
inline constexpr std::size_t kFeatureCount = 5;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return rows_ == 0; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    /// Appends one row; the first append on an empty 0-column matrix fixes the width.
    void push_row(std::span<const double> values);

    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Feature matrix with binary labels (1 = positive / repurchase).
struct Dataset {
    Matrix x;
    std::vector<int> y;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
    [[nodiscard]] std::size_t count_label(int label) const;
    void push_back(std::span<const double> features, int label);
    /// Rows selected by index, in the given order.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

    bool operator==(const Dataset&) const = default;
};

/// Checks the matrix/label shapes agree and every label is 0 or 1.
void validate_dataset(const Dataset& data);

/// SplitMix64 finalizer; used to derive independent child seeds from a
/// master seed and a counter.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Small counter-based generator satisfying UniformRandomBitGenerator.
/// Cheap to construct, which matters for per-node and per-sample streams.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in the open interval (0, 1).
    double uniform_open() noexcept {
        double u = 0.0;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        // Rejection keeps the draw unbiased.
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t v = 0;
        do {
            v = (*this)();
        } while (v >= limit);
        return v % n;
    }

private:
    std::uint64_t state_;
};

/// ceil(fraction * n), tolerant of representation error such as 0.1 * 30.
std::size_t ceil_fraction(double fraction, std::size_t n) noexcept;

inline bool all_finite(std::span<const double> values) noexcept {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace repurchase

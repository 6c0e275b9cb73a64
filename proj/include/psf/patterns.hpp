#pragma once

#include "psf/series.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace psf {

/// Mean and dispersion used to normalize a sequence into a pattern.
/// dispersion is sqrt(sum of squared deviations), always > 0.
struct CodingVars {
    double mean = 0.0;
    double dispersion = 1.0;

    friend bool operator==(const CodingVars&, const CodingVars&) = default;
};

/// How y-patterns are coded.
///  V1: with the mean/dispersion of the forecasted sequence itself (these
///      must be predicted at forecast time).
///  V2: with the mean/dispersion of the preceding input sequence.
enum class Variant { V1, V2 };

/// Normalized input sequence. Zero sum, unit Euclidean norm.
struct XPattern {
    std::vector<double> components;
    std::size_t origin = 0; ///< 0-based index of the last encoded month
    CodingVars coding;      ///< statistics of the encoded window
};

struct YPattern {
    std::vector<double> components;
    CodingVars coding;
    Variant variant = Variant::V2;
};

struct PatternPair {
    XPattern x;
    YPattern y;
    std::size_t origin = 0;
};

/// Dense row-major matrix, one pattern per row.
class PatternMatrix {
public:
    PatternMatrix() = default;
    PatternMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    double& operator()(std::size_t i, std::size_t t) { return data_[i * cols_ + t]; }
    double operator()(std::size_t i, std::size_t t) const { return data_[i * cols_ + t]; }

    void push_row(std::span<const double> values);

    friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Mean and dispersion of a sequence; DegenerateSequenceError if constant.
CodingVars coding_of(std::span<const double> sequence);

/// Encodes X_i = E[i-n+1 .. i] (0-based, i is the last month of the window).
XPattern encode_x(const MonthlySeries& series, std::size_t i, std::size_t n);

/// Encodes Y_i = E[i+1 .. i+m]. V2 codes with X_i's statistics (window of
/// length n ending at i); V1 codes with Y_i's own statistics unless
/// `v1_coding` is supplied.
YPattern encode_y(const MonthlySeries& series, std::size_t i, std::size_t n, std::size_t m,
                  Variant variant, std::optional<CodingVars> v1_coding = std::nullopt);

/// Demand values y_t * D* + E*.
std::vector<double> decode_y(std::span<const double> pattern, const CodingVars& coding);

/// Training set: one pair per admissible origin whose windows are non-constant.
struct PatternSet {
    std::vector<PatternPair> pairs;
    std::size_t skipped = 0; ///< origins dropped for a constant window
    std::size_t n = 0;
    std::size_t m = 0;
    Variant variant = Variant::V2;

    std::size_t size() const { return pairs.size(); }
    PatternMatrix x_matrix() const;
    PatternMatrix y_matrix() const;
};

/// Builds pairs for origins n-1 .. last_index-m, so that every y window lies
/// at or before `last_index` (defaults to the last month of the series).
/// InsufficientDataError if fewer than two pairs result.
PatternSet build_pattern_set(const MonthlySeries& series, std::size_t n, std::size_t m,
                             Variant variant,
                             std::optional<std::size_t> last_index = std::nullopt);

} // namespace psf

#include "psf/patterns.hpp"

#include "psf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace psf {

void PatternMatrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    }
    if (values.size() != cols_) {
        throw ShapeError("row of length " + std::to_string(values.size()) +
                         " pushed into matrix with " + std::to_string(cols_) + " columns");
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

CodingVars coding_of(std::span<const double> sequence) {
    if (sequence.empty()) {
        throw DegenerateSequenceError("empty sequence");
    }
    const double n = static_cast<double>(sequence.size());
    const double mean = std::accumulate(sequence.begin(), sequence.end(), 0.0) / n;
    double ss = 0.0;
    double scale = 0.0;
    for (double e : sequence) {
        ss += (e - mean) * (e - mean);
        scale = std::max(scale, std::abs(e));
    }
    const double dispersion = std::sqrt(ss);
    // Rounding in the mean leaves a residue of a few ulps on constant input.
    if (!(dispersion > 1e-12 * scale * std::sqrt(n))) {
        throw DegenerateSequenceError("sequence is constant (zero dispersion)");
    }
    return {mean, dispersion};
}

namespace {

std::vector<double> normalize(std::span<const double> sequence, const CodingVars& coding) {
    std::vector<double> out(sequence.size());
    for (std::size_t t = 0; t < sequence.size(); ++t) {
        out[t] = (sequence[t] - coding.mean) / coding.dispersion;
    }
    return out;
}

} // namespace

XPattern encode_x(const MonthlySeries& series, std::size_t i, std::size_t n) {
    if (n == 0 || i + 1 < n || i >= series.size()) {
        throw ShapeError("x window of length " + std::to_string(n) + " ending at " +
                         std::to_string(i) + " does not fit the series");
    }
    auto window = series.values().subspan(i + 1 - n, n);
    CodingVars coding = coding_of(window);
    return {normalize(window, coding), i, coding};
}

YPattern encode_y(const MonthlySeries& series, std::size_t i, std::size_t n, std::size_t m,
                  Variant variant, std::optional<CodingVars> v1_coding) {
    if (m == 0 || i + m >= series.size()) {
        throw ShapeError("y window of length " + std::to_string(m) + " after " +
                         std::to_string(i) + " does not fit the series");
    }
    auto window = series.values().subspan(i + 1, m);
    CodingVars coding;
    if (variant == Variant::V2) {
        if (n == 0 || i + 1 < n) {
            throw ShapeError("x window does not fit the series");
        }
        coding = coding_of(series.values().subspan(i + 1 - n, n));
    } else if (v1_coding) {
        if (!(v1_coding->dispersion > 0.0)) {
            throw DomainError("coding dispersion must be positive");
        }
        coding = *v1_coding;
    } else {
        coding = coding_of(window);
    }
    return {normalize(window, coding), coding, variant};
}

std::vector<double> decode_y(std::span<const double> pattern, const CodingVars& coding) {
    if (!(coding.dispersion > 0.0)) {
        throw DomainError("coding dispersion must be positive");
    }
    std::vector<double> out(pattern.size());
    for (std::size_t t = 0; t < pattern.size(); ++t) {
        out[t] = pattern[t] * coding.dispersion + coding.mean;
    }
    return out;
}

PatternMatrix PatternSet::x_matrix() const {
    PatternMatrix out(0, n);
    for (const auto& p : pairs) out.push_row(p.x.components);
    return out;
}

PatternMatrix PatternSet::y_matrix() const {
    PatternMatrix out(0, m);
    for (const auto& p : pairs) out.push_row(p.y.components);
    return out;
}

PatternSet build_pattern_set(const MonthlySeries& series, std::size_t n, std::size_t m,
                             Variant variant, std::optional<std::size_t> last_index) {
    if (n == 0 || m == 0) {
        throw ConfigError("pattern lengths must be positive");
    }
    const std::size_t last = last_index.value_or(series.size() - 1);
    if (last >= series.size()) {
        throw ShapeError("last index beyond the end of the series");
    }

    PatternSet set;
    set.n = n;
    set.m = m;
    set.variant = variant;
    for (std::size_t i = n - 1; i + m <= last; ++i) {
        try {
            XPattern x = encode_x(series, i, n);
            YPattern y = encode_y(series, i, n, m, variant);
            set.pairs.push_back({std::move(x), std::move(y), i});
        } catch (const DegenerateSequenceError&) {
            ++set.skipped;
        }
    }
    if (set.pairs.size() < 2) {
        throw InsufficientDataError("series '" + series.id() + "' yields " +
                                    std::to_string(set.pairs.size()) +
                                    " training pair(s); at least 2 are required");
    }
    return set;
}

} // namespace psf

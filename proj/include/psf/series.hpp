#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace psf {

/// Calendar month, month in 1..12.
struct YearMonth {
    int year = 0;
    int month = 1;

    /// Months since year 0, January.
    long ordinal() const { return static_cast<long>(year) * 12 + (month - 1); }
    static YearMonth from_ordinal(long ordinal);
    YearMonth plus(long months) const { return from_ordinal(ordinal() + months); }

    friend bool operator==(const YearMonth&, const YearMonth&) = default;
};

/// One demand history. values[t] belongs to calendar month start + t and is
/// strictly positive. Immutable after construction.
class MonthlySeries {
public:
    MonthlySeries(std::string id, YearMonth start, std::vector<double> values);

    const std::string& id() const { return id_; }
    YearMonth start() const { return start_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t t) const { return values_[t]; }
    YearMonth month_of(std::size_t t) const { return start_.plus(static_cast<long>(t)); }

    /// Copy of the first `count` values.
    MonthlySeries head(std::size_t count) const;

    friend bool operator==(const MonthlySeries&, const MonthlySeries&) = default;

private:
    std::string id_;
    YearMonth start_;
    std::vector<double> values_;
};

/// Train/test split. `test_origin` is the 0-based index of the last training
/// month; the forecast covers test_origin+1 .. test_origin+horizon.
struct SplitSpec {
    std::size_t horizon = 12;
    std::size_t test_origin = 0;

    /// Holds out the last `horizon` months of the series.
    static SplitSpec holdout(const MonthlySeries& series, std::size_t horizon = 12);
    /// Forecasts past the end of the series (no actuals).
    static SplitSpec future(const MonthlySeries& series, std::size_t horizon = 12);

    /// Whether actual values exist for the whole forecast window.
    bool has_actuals(const MonthlySeries& series) const {
        return test_origin + horizon < series.size();
    }
    /// Throws InsufficientDataError unless at least two training pairs of
    /// x-length n fit before the origin.
    void validate(const MonthlySeries& series, std::size_t n) const;
};

std::vector<MonthlySeries> read_csv(std::istream& in);
std::vector<MonthlySeries> load_csv(const std::string& path);
void write_csv(std::ostream& out, std::span<const MonthlySeries> series);
void write_csv(const std::string& path, std::span<const MonthlySeries> series);

struct SyntheticParams {
    std::uint64_t seed = 1;
    int years = 10;
    double base = 1000.0;
    double trend = 0.0;        // per month
    double seasonal_amp = 0.0; // fraction of level, [0,1)
    double noise_sd = 0.0;     // fraction of level, [0,0.5)
    YearMonth start{2000, 1};
    std::string id = "SYN";
};

/// values[t] = (base + trend*t) * (1 + amp*sin(2*pi*(t mod 12)/12)) * (1 + eps_t),
/// eps_t ~ N(0, noise_sd) from a generator seeded with `seed`.
MonthlySeries generate_synthetic(const SyntheticParams& params);

/// A corpus of `count` synthetic series with levels, trends and seasonal
/// amplitudes varied deterministically from `seed`.
std::vector<MonthlySeries> synthetic_corpus(std::uint64_t seed, int count, int years,
                                            double noise_sd);

} // namespace psf

#include "psf/series.hpp"

#include "psf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace psf {

YearMonth YearMonth::from_ordinal(long ordinal) {
    long year = ordinal >= 0 ? ordinal / 12 : (ordinal - 11) / 12;
    return {static_cast<int>(year), static_cast<int>(ordinal - year * 12) + 1};
}

MonthlySeries::MonthlySeries(std::string id, YearMonth start, std::vector<double> values)
    : id_(std::move(id)), start_(start), values_(std::move(values)) {
    if (start_.month < 1 || start_.month > 12) {
        throw DomainError("series '" + id_ + "': month out of range");
    }
    for (std::size_t t = 0; t < values_.size(); ++t) {
        if (!(values_[t] > 0.0) || !std::isfinite(values_[t])) {
            throw DomainError("series '" + id_ + "': value at position " + std::to_string(t) +
                              " is not strictly positive");
        }
    }
}

MonthlySeries MonthlySeries::head(std::size_t count) const {
    count = std::min(count, values_.size());
    return {id_, start_, {values_.begin(), values_.begin() + static_cast<long>(count)}};
}

SplitSpec SplitSpec::holdout(const MonthlySeries& series, std::size_t horizon) {
    if (series.size() <= horizon) {
        throw InsufficientDataError("series '" + series.id() + "' shorter than the horizon");
    }
    return {horizon, series.size() - 1 - horizon};
}

SplitSpec SplitSpec::future(const MonthlySeries& series, std::size_t horizon) {
    if (series.size() == 0) {
        throw InsufficientDataError("series '" + series.id() + "' is empty");
    }
    return {horizon, series.size() - 1};
}

void SplitSpec::validate(const MonthlySeries& series, std::size_t n) const {
    if (horizon == 0) {
        throw ConfigError("horizon must be at least 1");
    }
    if (test_origin >= series.size()) {
        throw ConfigError("test origin beyond the end of series '" + series.id() + "'");
    }
    if (test_origin < n + horizon) {
        throw InsufficientDataError("series '" + series.id() + "': " +
                                    std::to_string(test_origin + 1) +
                                    " training months cannot form two pattern pairs with n=" +
                                    std::to_string(n) + ", m=" + std::to_string(horizon));
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
    field = trim(field);
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError("line " + std::to_string(line) + ": cannot parse '" +
                         std::string(field) + "'");
    }
    return value;
}

struct Row {
    YearMonth month;
    double value;
};

} // namespace

std::vector<MonthlySeries> read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("line 1: missing header");
    }
    ++line_no;
    if (trim(line) != "id,year,month,value") {
        throw ParseError("line 1: expected header 'id,year,month,value'");
    }

    // std::map keeps ids in lexicographic order, so output order is stable.
    std::map<std::string, std::vector<Row>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
            fields.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        fields.push_back(rest);
        if (fields.size() != 4 || trim(fields[0]).empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields");
        }
        Row row{{parse_field<int>(fields[1], line_no), parse_field<int>(fields[2], line_no)},
                parse_field<double>(fields[3], line_no)};
        if (row.month.month < 1 || row.month.month > 12) {
            throw ParseError("line " + std::to_string(line_no) + ": month out of range");
        }
        if (!(row.value > 0.0) || !std::isfinite(row.value)) {
            throw DomainError("line " + std::to_string(line_no) +
                              ": demand must be strictly positive");
        }
        rows[std::string(trim(fields[0]))].push_back(row);
    }

    std::vector<MonthlySeries> out;
    for (auto& [id, list] : rows) {
        std::sort(list.begin(), list.end(), [](const Row& a, const Row& b) {
            return a.month.ordinal() < b.month.ordinal();
        });
        std::vector<double> values;
        values.reserve(list.size());
        for (std::size_t t = 0; t < list.size(); ++t) {
            if (t > 0) {
                long step = list[t].month.ordinal() - list[t - 1].month.ordinal();
                if (step == 0) {
                    throw ParseError("series '" + id + "': duplicate month " +
                                     std::to_string(list[t].month.year) + "-" +
                                     std::to_string(list[t].month.month));
                }
                if (step > 1) {
                    YearMonth missing = list[t - 1].month.plus(1);
                    throw GapError("series '" + id + "': missing month " +
                                   std::to_string(missing.year) + "-" +
                                   std::to_string(missing.month));
                }
            }
            values.push_back(list[t].value);
        }
        out.emplace_back(id, list.front().month, std::move(values));
    }
    return out;
}

std::vector<MonthlySeries> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return read_csv(in);
}

void write_csv(std::ostream& out, std::span<const MonthlySeries> series) {
    out << "id,year,month,value\n";
    char buf[64];
    for (const auto& s : series) {
        for (std::size_t t = 0; t < s.size(); ++t) {
            YearMonth ym = s.month_of(t);
            // Shortest round-trip representation.
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, s[t]);
            out << s.id() << ',' << ym.year << ',' << ym.month << ','
                << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
        }
    }
}

void write_csv(const std::string& path, std::span<const MonthlySeries> series) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot write '" + path + "'");
    }
    write_csv(out, series);
}

MonthlySeries generate_synthetic(const SyntheticParams& p) {
    if (p.years < 3) throw ConfigError("synthetic series need at least 3 years");
    if (!(p.base > 0.0)) throw ConfigError("synthetic base must be positive");
    if (p.seasonal_amp < 0.0 || p.seasonal_amp >= 1.0) {
        throw ConfigError("seasonal amplitude must lie in [0,1)");
    }
    if (p.noise_sd < 0.0 || p.noise_sd >= 0.5) {
        throw ConfigError("noise sd must lie in [0,0.5)");
    }

    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> noise(0.0, p.noise_sd > 0.0 ? p.noise_sd : 1.0);

    const std::size_t count = static_cast<std::size_t>(p.years) * 12;
    std::vector<double> values(count);
    for (std::size_t t = 0; t < count; ++t) {
        double level = p.base + p.trend * static_cast<double>(t);
        double season =
            1.0 + p.seasonal_amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t % 12) / 12.0);
        double eps = p.noise_sd > 0.0 ? noise(rng) : 0.0;
        values[t] = level * season * (1.0 + eps);
        if (!(values[t] > 0.0)) {
            throw DomainError("synthetic parameters produce a non-positive value at t=" +
                              std::to_string(t));
        }
    }
    return {p.id, p.start, std::move(values)};
}

std::vector<MonthlySeries> synthetic_corpus(std::uint64_t seed, int count, int years,
                                            double noise_sd) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_base(std::log(500.0), std::log(50000.0));
    std::uniform_real_distribution<double> trend_frac(-0.0005, 0.003);
    std::uniform_real_distribution<double> amp(0.05, 0.3);

    std::vector<MonthlySeries> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        SyntheticParams p;
        p.years = years;
        p.base = std::exp(log_base(rng));
        p.trend = trend_frac(rng) * p.base;
        p.seasonal_amp = amp(rng);
        p.noise_sd = noise_sd;
        p.seed = rng();
        std::ostringstream id;
        id << "S" << (s + 1 < 10 ? "0" : "") << s + 1;
        p.id = id.str();
        out.push_back(generate_synthetic(p));
    }
    return out;
}

} // namespace psf

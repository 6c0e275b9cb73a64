#include "psf/eval.hpp"

#include "psf/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace psf {

std::vector<double> absolute_percentage_errors(std::span<const double> actual,
                                               std::span<const double> forecast) {
    if (actual.size() != forecast.size()) {
        throw ShapeError("actual and forecast lengths differ (" + std::to_string(actual.size()) +
                         " vs " + std::to_string(forecast.size()) + ")");
    }
    if (actual.empty()) throw ShapeError("no values to score");
    std::vector<double> ape(actual.size());
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (!(actual[t] > 0.0)) throw DomainError("actual demand must be strictly positive");
        ape[t] = 100.0 * std::abs(forecast[t] - actual[t]) / actual[t];
    }
    return ape;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ShapeError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

MetricSet compute_metrics(std::span<const double> actual, std::span<const double> forecast) {
    const auto ape = absolute_percentage_errors(actual, forecast);
    MetricSet out;
    out.mape = std::accumulate(ape.begin(), ape.end(), 0.0) / static_cast<double>(ape.size());
    out.median_ape = quantile(ape, 0.5);
    out.iqr_ape = quantile(ape, 0.75) - quantile(ape, 0.25);
    double sse = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        sse += (forecast[t] - actual[t]) * (forecast[t] - actual[t]);
    }
    out.rmse = std::sqrt(sse / static_cast<double>(actual.size()));
    return out;
}

MetricSet average_metrics(std::span<const MetricSet> per_series) {
    if (per_series.empty()) throw ShapeError("no metric sets to average");
    MetricSet out;
    for (const auto& m : per_series) {
        out.mape += m.mape;
        out.median_ape += m.median_ape;
        out.iqr_ape += m.iqr_ape;
        out.rmse += m.rmse;
    }
    const double n = static_cast<double>(per_series.size());
    out.mape /= n;
    out.median_ape /= n;
    out.iqr_ape /= n;
    out.rmse /= n;
    return out;
}

RankTable rank_models(const ScoreTable& table) {
    const std::size_t models = table.models.size();
    if (models == 0) throw IncompleteTableError("no models to rank");
    if (table.values.size() != table.series.size() || table.series.empty()) {
        throw IncompleteTableError("score table has no series rows");
    }

    RankTable out{table.models, std::vector<double>(models, 0.0), {}};
    std::vector<std::size_t> order(models);
    for (std::size_t s = 0; s < table.values.size(); ++s) {
        const auto& row = table.values[s];
        if (row.size() != models) {
            throw IncompleteTableError("series '" + table.series[s] + "' has " +
                                       std::to_string(row.size()) + " scores for " +
                                       std::to_string(models) + " models");
        }
        for (std::size_t j = 0; j < models; ++j) {
            if (std::isnan(row[j])) {
                throw IncompleteTableError("missing score for model '" + table.models[j] +
                                           "' on series '" + table.series[s] + "'");
            }
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
        std::vector<double> ranks(models);
        for (std::size_t i = 0; i < models;) {
            std::size_t j = i;
            while (j + 1 < models && row[order[j + 1]] == row[order[i]]) ++j;
            // Positions i..j (0-based) tie: mean of ranks i+1..j+1.
            const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = shared;
            i = j + 1;
        }
        for (std::size_t j = 0; j < models; ++j) out.average_rank[j] += ranks[j];
        out.ranks.push_back(std::move(ranks));
    }
    for (double& r : out.average_rank) r /= static_cast<double>(table.values.size());
    return out;
}

std::string render_report_text(std::span<const ReportRow> rows) {
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.model.size());
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %10s %8s %8s %12s %8s\n", static_cast<int>(width),
                  "Model", "Median APE", "MAPE", "IQR", "RMSE", "AvgRank");
    out += line;
    out += std::string(width + 51, '-') + "\n";
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-*s %10.2f %8.2f %8.2f %12.2f %8.2f\n",
                      static_cast<int>(width), r.model.c_str(), r.metrics.median_ape,
                      r.metrics.mape, r.metrics.iqr_ape, r.metrics.rmse, r.avg_rank);
        out += line;
    }
    return out;
}

std::string render_report_csv(std::span<const ReportRow> rows) {
    std::string out = "model,median_ape,mape,iqr,rmse,avg_rank\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%s,%.2f,%.2f,%.2f,%.2f,%.2f\n", r.model.c_str(),
                      r.metrics.median_ape, r.metrics.mape, r.metrics.iqr_ape, r.metrics.rmse,
                      r.avg_rank);
        out += line;
    }
    return out;
}

} // namespace psf

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace psf {

/// Forecast accuracy of one series. Percentages for the APE statistics,
/// demand units for RMSE.
struct MetricSet {
    double mape = 0.0;
    double median_ape = 0.0;
    double iqr_ape = 0.0;
    double rmse = 0.0;
};

/// APE_t = 100 |forecast_t - actual_t| / actual_t.
std::vector<double> absolute_percentage_errors(std::span<const double> actual,
                                               std::span<const double> forecast);

/// Quantile by linear interpolation between order statistics
/// (position p*(n-1), the "type 7" rule).
double quantile(std::vector<double> values, double p);

MetricSet compute_metrics(std::span<const double> actual, std::span<const double> forecast);

/// Equal-weight mean of per-series metric sets.
MetricSet average_metrics(std::span<const MetricSet> per_series);

/// Rows are series, columns are models. NaN marks a missing cell.
struct ScoreTable {
    std::vector<std::string> models;
    std::vector<std::string> series;
    std::vector<std::vector<double>> values; ///< [series][model]
};

struct RankTable {
    std::vector<std::string> models;
    std::vector<double> average_rank;         ///< per model
    std::vector<std::vector<double>> ranks;   ///< [series][model], ties share the mean rank
};

/// Ranks models within each series (ascending score, ties get the mean rank)
/// and averages over series. IncompleteTableError on a missing cell.
RankTable rank_models(const ScoreTable& table);

struct ReportRow {
    std::string model;
    MetricSet metrics; ///< averaged over series
    double avg_rank = 0.0;
};

/// Fixed-width text table: Model, Median APE, MAPE, IQR, RMSE, AvgRank.
std::string render_report_text(std::span<const ReportRow> rows);
/// CSV with header model,median_ape,mape,iqr,rmse,avg_rank.
std::string render_report_csv(std::span<const ReportRow> rows);

} // namespace psf

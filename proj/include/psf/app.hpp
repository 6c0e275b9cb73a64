#pragma once

#include "psf/ensemble.hpp"
#include "psf/error.hpp"
#include "psf/eval.hpp"
#include "psf/tuning.hpp"

#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace psf {

inline constexpr const char* kVersion = "1.0.0";

/// A model row a run can produce.
struct ModelId {
    enum class Type { Base, Heterogeneous, Homogeneous, SeasonalNaive };
    enum class Coding { V2, RW, ES };

    Type type = Type::Base;
    ModelKind kind = ModelKind::FNM; // Base
    Coding coding = Coding::V2;      // Base
    EnsembleId ensemble = EnsembleId::E1;
    Strategy strategy = Strategy::S1;

    /// Accepts labels such as "FNM", "k-NNw+RW", "NWE+ES", "Ensemble4",
    /// "E2", "FNMe3", "SNaive" (case-insensitive).
    static ModelId parse(const std::string& name);
    std::string label() const;

    friend bool operator==(const ModelId&, const ModelId&) = default;
};

/// The sixteen base-model and heterogeneous-ensemble rows, in report order.
std::vector<ModelId> table1_models();
/// FNMe1..FNMe5.
std::vector<ModelId> table2_models();

/// Expands "table1", "table2", "all" and comma lists into model ids.
std::vector<ModelId> parse_model_list(const std::string& list);

struct RunConfig {
    std::string data_path;
    std::string out_dir = "out";
    std::string models = "table1";
    std::size_t horizon = 12;
    std::optional<std::uint64_t> seed;
    GridSpec grid = GridSpec::defaults();
    std::size_t ensemble_size = 100;
    double train_frac = 0.85;
    double feature_frac = 0.925;
    double sigma_s = 0.475;
    double sigma_x = 0.4;
    double sigma_y = 0.65;
    bool future = false;   ///< forecast past the end of the data
    unsigned threads = 0;  ///< 0: hardware concurrency

    /// Applies one `key=value` setting; ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Reads a flat `key = value` file ('#' starts a comment).
    void load_file(const std::string& path);
    /// Every setting as `key=value` lines, in a fixed order.
    std::string echo() const;
    /// ConfigError if models are unknown or a stochastic run lacks a seed.
    void validate() const;
};

/// Per-series seed derived from the run seed and the series id.
std::uint64_t series_seed(std::uint64_t run_seed, const std::string& series_id);

/// Everything produced for one series.
struct SeriesResult {
    std::string id;
    SplitSpec split;
    TunedConfigs tuned;
    std::vector<std::pair<ModelId, std::vector<double>>> forecasts;
    std::vector<double> actual; ///< empty when forecasting past the data
    std::vector<std::pair<std::string, GridResult>> grids; ///< "FNM/V2" -> result
    std::string error;          ///< non-empty if the series failed
    std::exception_ptr failure;
};

/// Tunes the models needed by `models` and, unless `tune_only`, forecasts
/// each of them. Failures are captured in the result, not thrown.
SeriesResult run_series(const MonthlySeries& series, const std::vector<ModelId>& models,
                        const RunConfig& run, bool tune_only = false);

/// run_series over all series, possibly in parallel; results in input order.
std::vector<SeriesResult> run_all(const std::vector<MonthlySeries>& data,
                                  const std::vector<ModelId>& models, const RunConfig& run,
                                  bool tune_only = false);

/// Report rows (metrics averaged over successful series, ranks by `by`
/// "mape" or "rmse") for `models`.
std::vector<ReportRow> build_report(const std::vector<SeriesResult>& results,
                                    const std::vector<ModelId>& models, const std::string& by);

// Subcommands. Each writes its files into run.out_dir and returns the
// process exit code (0 success). Library errors propagate as exceptions.
int cmd_forecast(const RunConfig& run);
int cmd_tune(const RunConfig& run);
int cmd_benchmark(const RunConfig& run);
/// Scores a forecast CSV (`id,year,month,forecast,actual`).
int cmd_evaluate(const std::string& forecast_csv, const std::string& out_csv);
/// Ranks the per-series metrics CSV (`id,model,median_ape,mape,iqr,rmse`).
int cmd_rank(const std::string& metrics_csv, const std::string& by, const std::string& out_csv);
int cmd_synth(const std::string& out_csv, std::uint64_t seed, int count, int years,
              double noise_sd);

/// Exit code for an error category: data 1, config 2, runtime 3.
int exit_code(ErrorCategory category);

} // namespace psf

#pragma once

#include "psf/patterns.hpp"
#include "psf/scalar_forecast.hpp"
#include "psf/series.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psf {

enum class ModelKind { KNNW, FNM, NWE, GRNN };

std::string to_string(ModelKind kind);

/// Model kind plus hyperparameters. Only the fields relevant to `kind` are
/// read; validate() checks exactly those.
struct PsfmConfig {
    ModelKind kind = ModelKind::FNM;
    std::size_t n = 12; ///< x-pattern length
    std::size_t m = 12; ///< horizon
    // k-NNw
    std::size_t k = 5;
    double rho = 1.0;   ///< weight differentiation, [0,1]
    double gamma = 0.0; ///< convexity, > -1
    // FNM and GRNN width; FNM shape
    double sigma = 0.5;
    double alpha = 2.0;
    // N-WE per-dimension bandwidths, length n
    std::vector<double> h;

    Variant variant = Variant::V2;
    /// Predicts V1 coding variables.
    ScalarModelSpec coding_model = ScalarModelSpec::auto_select(ScalarFamily::Smoothing);

    void validate() const;
    /// Sets every N-WE bandwidth to `bandwidth` (resizes h to n).
    PsfmConfig& with_isotropic_h(double bandwidth);
    /// "FNM", "k-NNw+ES", ...
    std::string label() const;

    friend bool operator==(const PsfmConfig&, const PsfmConfig&) = default;
};

/// Similarity weights over the training set. Dense over all N training
/// patterns; `support` lists the indices with nonzero weight.
struct WeightVector {
    std::vector<double> weights;
    std::vector<std::size_t> support;
};

double distance(std::span<const double> a, std::span<const double> b);

/// Distances from `query` to every row of `train`.
std::vector<double> distances_to(std::span<const double> query, const PatternMatrix& train);

/// Indices of the k smallest distances in ascending order; equal distances
/// are ordered by ascending index.
std::vector<std::size_t> nearest_neighbors(std::span<const double> distances, std::size_t k);

WeightVector knnw_weights(std::span<const double> query, const PatternMatrix& train,
                          std::size_t k, double rho, double gamma);
WeightVector knnw_weights_from_distances(std::span<const double> distances, std::size_t k,
                                         double rho, double gamma);

WeightVector fnm_weights(std::span<const double> query, const PatternMatrix& train, double sigma,
                         double alpha);
WeightVector fnm_weights_from_distances(std::span<const double> distances, double sigma,
                                        double alpha);

WeightVector nwe_weights(std::span<const double> query, const PatternMatrix& train,
                         std::span<const double> h);

WeightVector grnn_weights(std::span<const double> query, const PatternMatrix& train,
                          double sigma);
WeightVector grnn_weights_from_distances(std::span<const double> distances, double sigma);

/// Weights of the model named by `config.kind`. The query length must match
/// the columns of `train` (and h for N-WE).
WeightVector compute_weights(std::span<const double> query, const PatternMatrix& train,
                             const PsfmConfig& config);

/// Weighted sum of training y-patterns.
std::vector<double> regress(const WeightVector& weights, const PatternMatrix& train_y);

/// Forecast y-pattern for one query.
std::vector<double> predict_pattern(std::span<const double> query, const PatternMatrix& train_x,
                                    const PatternMatrix& train_y, const PsfmConfig& config,
                                    WeightVector* weights_out = nullptr);

/// Predicted coding variables of the sequence following `target_origin`,
/// from the V1 coding variables of the training pairs (ordered by origin).
CodingVars predict_coding(const PatternSet& training, std::size_t target_origin,
                          const ScalarModelSpec& spec);

struct SingleForecast {
    std::vector<double> forecast;  ///< demand, length m
    std::vector<double> y_pattern; ///< forecast y-pattern before decoding
    WeightVector weights;
    CodingVars coding;             ///< coding variables used to decode
    std::size_t training_pairs = 0;
    std::size_t skipped_pairs = 0;
};

/// End-to-end forecast of the `split.horizon` months after `split.test_origin`.
/// `v1_coding` replaces the predicted V1 coding variables when given.
SingleForecast forecast_single(const MonthlySeries& series, const PsfmConfig& config,
                               const SplitSpec& split,
                               std::optional<CodingVars> v1_coding = std::nullopt);

} // namespace psf

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace psf {

/// Candidate families searched by ScalarMethod::AutoSelect.
///  RandomWalk: Naive, Drift, SeasonalNaive(period) -- the random-walk corner
///              of the ARIMA family.
///  Smoothing:  Naive plus additive-trend Holt over the alpha/beta grid --
///              the non-seasonal additive corner of the ETS family.
enum class ScalarFamily { RandomWalk, Smoothing, All };

enum class ScalarMethod { Naive, Drift, SeasonalNaive, HoltLinear, AutoSelect };

/// Forecaster for one coding variable.
struct ScalarModelSpec {
    ScalarMethod method = ScalarMethod::Naive;
    std::size_t period = 12;                  // SeasonalNaive
    double alpha = 0.5;                       // HoltLinear, (0,1]
    double beta = 0.1;                        // HoltLinear, [0,1]
    ScalarFamily family = ScalarFamily::All;  // AutoSelect

    static ScalarModelSpec naive() { return {}; }
    static ScalarModelSpec drift() { return {ScalarMethod::Drift}; }
    static ScalarModelSpec seasonal_naive(std::size_t period) {
        return {ScalarMethod::SeasonalNaive, period};
    }
    static ScalarModelSpec holt(double alpha, double beta) {
        return {ScalarMethod::HoltLinear, 12, alpha, beta};
    }
    static ScalarModelSpec auto_select(ScalarFamily family) {
        return {ScalarMethod::AutoSelect, 12, 0.5, 0.1, family};
    }

    /// Free parameters counted by AICc, including the error variance.
    int parameter_count() const;
    void validate() const;
    std::string label() const;

    friend bool operator==(const ScalarModelSpec&, const ScalarModelSpec&) = default;
};

/// Candidate list for an AutoSelect family, in selection order.
std::vector<ScalarModelSpec> family_candidates(ScalarFamily family, std::size_t period = 12);

/// h-step forecasts from a positive history of length >= 3.
std::vector<double> forecast_scalar(std::span<const double> history, const ScalarModelSpec& spec,
                                    std::size_t h);

/// One-step-ahead in-sample errors of a non-AutoSelect spec.
std::vector<double> one_step_errors(std::span<const double> history, const ScalarModelSpec& spec);

/// N ln(SSE/N) + 2k + 2k(k+1)/(N-k-1) over one_step_errors; -inf for an
/// exact in-sample fit, +inf when N-k-1 <= 0.
double aicc(std::span<const double> history, const ScalarModelSpec& spec);

/// Candidate with the smallest AICc; ties go to fewer parameters, then
/// candidate order.
ScalarModelSpec auto_select(std::span<const double> history,
                            std::span<const ScalarModelSpec> candidates);

} // namespace psf

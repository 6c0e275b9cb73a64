#include "psf/scalar_forecast.hpp"

#include "psf/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace psf {

int ScalarModelSpec::parameter_count() const {
    switch (method) {
    case ScalarMethod::Naive:
    case ScalarMethod::SeasonalNaive:
        return 1;
    case ScalarMethod::Drift:
        return 2;
    case ScalarMethod::HoltLinear:
        return 3;
    case ScalarMethod::AutoSelect:
        break;
    }
    return 0;
}

void ScalarModelSpec::validate() const {
    if (method == ScalarMethod::SeasonalNaive && period < 1) {
        throw ConfigError("seasonal period must be at least 1");
    }
    if (method == ScalarMethod::HoltLinear) {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("Holt alpha must lie in (0,1]");
        if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("Holt beta must lie in [0,1]");
    }
}

std::string ScalarModelSpec::label() const {
    std::ostringstream out;
    switch (method) {
    case ScalarMethod::Naive: out << "naive"; break;
    case ScalarMethod::Drift: out << "drift"; break;
    case ScalarMethod::SeasonalNaive: out << "snaive(" << period << ")"; break;
    case ScalarMethod::HoltLinear: out << "holt(" << alpha << "," << beta << ")"; break;
    case ScalarMethod::AutoSelect:
        out << "auto("
            << (family == ScalarFamily::RandomWalk ? "rw"
                : family == ScalarFamily::Smoothing ? "es"
                                                    : "all")
            << ")";
        break;
    }
    return out.str();
}

std::vector<ScalarModelSpec> family_candidates(ScalarFamily family, std::size_t period) {
    std::vector<ScalarModelSpec> out{ScalarModelSpec::naive()};
    if (family != ScalarFamily::Smoothing) {
        out.push_back(ScalarModelSpec::drift());
        out.push_back(ScalarModelSpec::seasonal_naive(period));
    }
    if (family != ScalarFamily::RandomWalk) {
        for (int a = 1; a <= 9; ++a) {
            for (int b = 1; b <= 9; ++b) {
                out.push_back(ScalarModelSpec::holt(a / 10.0, b / 10.0));
            }
        }
    }
    return out;
}

namespace {

void check_history(std::span<const double> history, const ScalarModelSpec& spec) {
    if (history.size() < 3) {
        throw InsufficientDataError("coding history needs at least 3 values, got " +
                                    std::to_string(history.size()));
    }
    if (spec.method == ScalarMethod::SeasonalNaive && history.size() < spec.period) {
        throw InsufficientDataError("coding history shorter than the seasonal period");
    }
    for (double v : history) {
        if (!(v > 0.0)) throw DomainError("coding history values must be positive");
    }
}

struct HoltState {
    double level;
    double trend;
};

// Runs the additive-trend recursion over the whole history, collecting the
// one-step errors from t = 2 on (t = 1 is fitted exactly by the initial trend).
HoltState run_holt(std::span<const double> y, double alpha, double beta,
                   std::vector<double>* errors) {
    HoltState s{y[0], y[1] - y[0]};
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double predicted = s.level + s.trend;
        if (errors && t >= 2) errors->push_back(y[t] - predicted);
        const double level = alpha * y[t] + (1.0 - alpha) * predicted;
        s.trend = beta * (level - s.level) + (1.0 - beta) * s.trend;
        s.level = level;
    }
    return s;
}

} // namespace

std::vector<double> forecast_scalar(std::span<const double> history, const ScalarModelSpec& spec,
                                    std::size_t h) {
    spec.validate();
    check_history(history, spec);
    if (h < 1) throw ConfigError("forecast horizon must be at least 1");

    const std::size_t len = history.size();
    const double last = history.back();
    std::vector<double> out(h);
    switch (spec.method) {
    case ScalarMethod::Naive:
        std::fill(out.begin(), out.end(), last);
        break;
    case ScalarMethod::Drift: {
        const double slope = (last - history.front()) / static_cast<double>(len - 1);
        for (std::size_t s = 0; s < h; ++s) out[s] = last + static_cast<double>(s + 1) * slope;
        break;
    }
    case ScalarMethod::SeasonalNaive:
        for (std::size_t s = 0; s < h; ++s) out[s] = history[len - spec.period + s % spec.period];
        break;
    case ScalarMethod::HoltLinear: {
        HoltState state = run_holt(history, spec.alpha, spec.beta, nullptr);
        for (std::size_t s = 0; s < h; ++s) {
            out[s] = state.level + static_cast<double>(s + 1) * state.trend;
        }
        break;
    }
    case ScalarMethod::AutoSelect: {
        auto candidates = family_candidates(spec.family, spec.period);
        return forecast_scalar(history, auto_select(history, candidates), h);
    }
    }
    return out;
}

std::vector<double> one_step_errors(std::span<const double> history, const ScalarModelSpec& spec) {
    spec.validate();
    check_history(history, spec);
    std::vector<double> errors;
    const std::size_t len = history.size();
    switch (spec.method) {
    case ScalarMethod::Naive:
        for (std::size_t t = 1; t < len; ++t) errors.push_back(history[t] - history[t - 1]);
        break;
    case ScalarMethod::Drift:
        for (std::size_t t = 2; t < len; ++t) {
            const double slope = (history[t - 1] - history[0]) / static_cast<double>(t - 1);
            errors.push_back(history[t] - (history[t - 1] + slope));
        }
        break;
    case ScalarMethod::SeasonalNaive:
        for (std::size_t t = spec.period; t < len; ++t) {
            errors.push_back(history[t] - history[t - spec.period]);
        }
        break;
    case ScalarMethod::HoltLinear:
        run_holt(history, spec.alpha, spec.beta, &errors);
        break;
    case ScalarMethod::AutoSelect:
        throw ConfigError("in-sample errors are undefined for an AutoSelect spec");
    }
    return errors;
}

double aicc(std::span<const double> history, const ScalarModelSpec& spec) {
    const auto errors = one_step_errors(history, spec);
    const double n = static_cast<double>(errors.size());
    const double k = spec.parameter_count();
    if (n - k - 1.0 <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    double sse = 0.0;
    for (double e : errors) sse += e * e;
    double scale = 0.0;
    for (double v : history) scale += std::abs(v);
    scale /= static_cast<double>(history.size());
    // Relative rms error below 1e-12 is an exact fit up to rounding.
    if (sse / n <= 1e-24 * scale * scale) {
        return -std::numeric_limits<double>::infinity();
    }
    return n * std::log(sse / n) + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0);
}

ScalarModelSpec auto_select(std::span<const double> history,
                            std::span<const ScalarModelSpec> candidates) {
    if (candidates.empty()) {
        throw ConfigError("auto_select needs at least one candidate");
    }
    if (candidates.size() == 1) {
        return candidates.front();
    }
    const ScalarModelSpec* best = nullptr;
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& candidate : candidates) {
        if (candidate.method == ScalarMethod::AutoSelect) {
            throw ConfigError("AutoSelect cannot be a candidate of itself");
        }
        double score;
        try {
            score = aicc(history, candidate);
        } catch (const InsufficientDataError&) {
            continue;
        }
        if (score == std::numeric_limits<double>::infinity() || std::isnan(score)) continue;
        if (!best || score < best_score ||
            (score == best_score && candidate.parameter_count() < best->parameter_count())) {
            best = &candidate;
            best_score = score;
        }
    }
    if (!best) {
        throw InsufficientDataError("no scalar forecaster is feasible for a history of length " +
                                    std::to_string(history.size()));
    }
    return *best;
}

} // namespace psf

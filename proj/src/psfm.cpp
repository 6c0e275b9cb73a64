#include "psf/psfm.hpp"

#include "psf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace psf {

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::KNNW: return "k-NNw";
    case ModelKind::FNM: return "FNM";
    case ModelKind::NWE: return "N-WE";
    case ModelKind::GRNN: return "GRNN";
    }
    return "?";
}

void PsfmConfig::validate() const {
    if (n < 2) throw ConfigError("x-pattern length n must be at least 2");
    if (m < 1) throw ConfigError("horizon m must be at least 1");
    switch (kind) {
    case ModelKind::KNNW:
        if (k < 1) throw ConfigError("k must be at least 1");
        if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0,1]");
        // gamma = -1 makes the weight denominator vanish at the k-th neighbor.
        if (!(gamma > -1.0)) throw ConfigError("gamma must be greater than -1");
        break;
    case ModelKind::FNM:
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
        [[fallthrough]];
    case ModelKind::GRNN:
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
        break;
    case ModelKind::NWE:
        if (h.size() != n) {
            throw ConfigError("N-WE needs " + std::to_string(n) + " bandwidths, got " +
                              std::to_string(h.size()));
        }
        for (double b : h) {
            if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("bandwidths must be positive");
        }
        break;
    }
    if (variant == Variant::V1) coding_model.validate();
}

PsfmConfig& PsfmConfig::with_isotropic_h(double bandwidth) {
    h.assign(n, bandwidth);
    return *this;
}

std::string PsfmConfig::label() const {
    std::string out = to_string(kind);
    if (variant == Variant::V1) {
        if (coding_model.method == ScalarMethod::AutoSelect &&
            coding_model.family == ScalarFamily::RandomWalk) {
            out += "+RW";
        } else if (coding_model.method == ScalarMethod::AutoSelect &&
                   coding_model.family == ScalarFamily::Smoothing) {
            out += "+ES";
        } else {
            out += "+" + coding_model.label();
        }
    }
    return out;
}

double distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("distance between patterns of length " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
    }
    double ss = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double diff = a[t] - b[t];
        ss += diff * diff;
    }
    return std::sqrt(ss);
}

std::vector<double> distances_to(std::span<const double> query, const PatternMatrix& train) {
    std::vector<double> out(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) out[i] = distance(query, train.row(i));
    return out;
}

std::vector<std::size_t> nearest_neighbors(std::span<const double> distances, std::size_t k) {
    if (k < 1 || k > distances.size()) {
        throw ConfigError("k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(distances.size()) + "]");
    }
    std::vector<std::size_t> idx(distances.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return distances[a] < distances[b] ||
                                 (distances[a] == distances[b] && a < b);
                      });
    idx.resize(k);
    return idx;
}

namespace {

WeightVector finalize(std::vector<double> weights) {
    WeightVector out;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) out.support.push_back(i);
    }
    out.weights = std::move(weights);
    return out;
}

// Normalizes exp(log_mu) without underflow by shifting with the largest
// exponent. Throws when every unshifted exp(log_mu) is zero.
WeightVector normalize_log(std::vector<double> log_mu, const char* model) {
    if (log_mu.empty()) throw InsufficientDataError("empty training set");
    const double top = *std::max_element(log_mu.begin(), log_mu.end());
    if (std::exp(top) == 0.0 || std::isnan(top)) {
        throw UnderflowError(std::string(model) +
                             ": every similarity underflows to zero; widen the kernel "
                             "(larger sigma or h)");
    }
    double total = 0.0;
    for (double& l : log_mu) {
        l = std::exp(l - top);
        total += l;
    }
    for (double& l : log_mu) l /= total;
    return finalize(std::move(log_mu));
}

} // namespace

WeightVector knnw_weights_from_distances(std::span<const double> distances, std::size_t k,
                                         double rho, double gamma) {
    const auto neighbors = nearest_neighbors(distances, k);
    const double dk = distances[neighbors.back()];
    std::vector<double> w(distances.size(), 0.0);

    double total = 0.0;
    if (dk > 0.0) {
        for (std::size_t i : neighbors) {
            const double r = distances[i] / dk;
            const double v = rho * ((1.0 - r) / (1.0 + gamma * r) - 1.0) + 1.0;
            w[i] = v;
            total += v;
        }
    }
    // dk = 0 leaves the weight formula undefined; all k neighbors coincide
    // with the query. total = 0 happens when rho = 1 and every neighbor sits
    // at distance dk (e.g. k = 1). Both fall back to uniform weights.
    if (total <= 0.0) {
        for (std::size_t i : neighbors) w[i] = 1.0;
        total = static_cast<double>(k);
    }
    for (std::size_t i : neighbors) w[i] /= total;
    return finalize(std::move(w));
}

WeightVector knnw_weights(std::span<const double> query, const PatternMatrix& train,
                          std::size_t k, double rho, double gamma) {
    return knnw_weights_from_distances(distances_to(query, train), k, rho, gamma);
}

WeightVector fnm_weights_from_distances(std::span<const double> distances, double sigma,
                                        double alpha) {
    std::vector<double> log_mu(distances.size());
    for (std::size_t i = 0; i < distances.size(); ++i) {
        log_mu[i] = -std::pow(distances[i] / sigma, alpha);
    }
    return normalize_log(std::move(log_mu), "FNM");
}

WeightVector fnm_weights(std::span<const double> query, const PatternMatrix& train, double sigma,
                         double alpha) {
    return fnm_weights_from_distances(distances_to(query, train), sigma, alpha);
}

WeightVector nwe_weights(std::span<const double> query, const PatternMatrix& train,
                         std::span<const double> h) {
    if (query.size() != train.cols() || h.size() != train.cols()) {
        throw ShapeError("N-WE query, bandwidth and training dimensions differ");
    }
    std::vector<double> log_k(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) {
        auto row = train.row(i);
        double s = 0.0;
        for (std::size_t t = 0; t < row.size(); ++t) {
            const double diff = query[t] - row[t];
            s += diff * diff / (2.0 * h[t] * h[t]);
        }
        log_k[i] = -s;
    }
    return normalize_log(std::move(log_k), "N-WE");
}

WeightVector grnn_weights_from_distances(std::span<const double> distances, double sigma) {
    std::vector<double> log_g(distances.size());
    for (std::size_t i = 0; i < distances.size(); ++i) {
        log_g[i] = -(distances[i] * distances[i]) / (sigma * sigma);
    }
    return normalize_log(std::move(log_g), "GRNN");
}

WeightVector grnn_weights(std::span<const double> query, const PatternMatrix& train,
                          double sigma) {
    return grnn_weights_from_distances(distances_to(query, train), sigma);
}

WeightVector compute_weights(std::span<const double> query, const PatternMatrix& train,
                             const PsfmConfig& config) {
    if (query.size() != train.cols()) {
        throw ShapeError("query length " + std::to_string(query.size()) +
                         " differs from training pattern length " +
                         std::to_string(train.cols()));
    }
    switch (config.kind) {
    case ModelKind::KNNW:
        return knnw_weights(query, train, config.k, config.rho, config.gamma);
    case ModelKind::FNM:
        return fnm_weights(query, train, config.sigma, config.alpha);
    case ModelKind::NWE:
        return nwe_weights(query, train, config.h);
    case ModelKind::GRNN:
        return grnn_weights(query, train, config.sigma);
    }
    throw ConfigError("unknown model kind");
}

std::vector<double> regress(const WeightVector& weights, const PatternMatrix& train_y) {
    if (weights.weights.size() != train_y.rows()) {
        throw ShapeError(std::to_string(weights.weights.size()) + " weights for " +
                         std::to_string(train_y.rows()) + " training y-patterns");
    }
    std::vector<double> out(train_y.cols(), 0.0);
    for (std::size_t i : weights.support) {
        const double w = weights.weights[i];
        auto row = train_y.row(i);
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * row[t];
    }
    return out;
}

std::vector<double> predict_pattern(std::span<const double> query, const PatternMatrix& train_x,
                                    const PatternMatrix& train_y, const PsfmConfig& config,
                                    WeightVector* weights_out) {
    if (train_x.rows() != train_y.rows()) {
        throw ShapeError("x and y training sets differ in size");
    }
    WeightVector weights = compute_weights(query, train_x, config);
    auto y = regress(weights, train_y);
    if (weights_out) *weights_out = std::move(weights);
    return y;
}

CodingVars predict_coding(const PatternSet& training, std::size_t target_origin,
                          const ScalarModelSpec& spec) {
    if (training.pairs.empty() || training.pairs.back().origin >= target_origin) {
        throw ShapeError("coding target must follow the last training origin");
    }
    std::vector<double> means;
    std::vector<double> dispersions;
    for (const auto& p : training.pairs) {
        // V1 coding of pair p: statistics of its own y window.
        CodingVars c = p.y.variant == Variant::V1
                           ? p.y.coding
                           : coding_of(decode_y(p.y.components, p.y.coding));
        means.push_back(c.mean);
        dispersions.push_back(c.dispersion);
    }
    const std::size_t steps = target_origin - training.pairs.back().origin;
    auto predict = [&](const std::vector<double>& history) {
        double value = forecast_scalar(history, spec, steps).back();
        // A trending forecaster may cross zero; fall back to the last value.
        return value > 0.0 ? value : history.back();
    };
    return {predict(means), predict(dispersions)};
}

SingleForecast forecast_single(const MonthlySeries& series, const PsfmConfig& config,
                               const SplitSpec& split, std::optional<CodingVars> v1_coding) {
    config.validate();
    if (split.horizon != config.m) {
        throw ConfigError("split horizon " + std::to_string(split.horizon) +
                          " differs from model horizon " + std::to_string(config.m));
    }
    split.validate(series, config.n);

    const PatternSet training =
        build_pattern_set(series, config.n, config.m, config.variant, split.test_origin);
    const XPattern query = encode_x(series, split.test_origin, config.n);

    SingleForecast out;
    out.training_pairs = training.size();
    out.skipped_pairs = training.skipped;
    out.y_pattern =
        predict_pattern(query.components, training.x_matrix(), training.y_matrix(), config,
                        &out.weights);
    if (config.variant == Variant::V2) {
        out.coding = query.coding;
    } else if (v1_coding) {
        out.coding = *v1_coding;
    } else {
        out.coding = predict_coding(training, split.test_origin, config.coding_model);
    }
    out.forecast = decode_y(out.y_pattern, out.coding);
    return out;
}

} // namespace psf

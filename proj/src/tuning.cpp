#include "psf/tuning.hpp"

#include "psf/error.hpp"
#include "psf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>

namespace psf {

GridSpec GridSpec::defaults() {
    GridSpec grid;
    grid.n_values = {3, 6, 9, 12, 15, 18, 24};
    for (std::size_t k = 1; k <= 12; ++k) grid.k_values.push_back(k);
    for (int j = 0; j <= 8; ++j) grid.sigma_values.push_back(0.05 * std::ldexp(1.0, j));
    grid.h_values = grid.sigma_values;
    return grid;
}

std::vector<PsfmConfig> GridSpec::candidates(ModelKind kind, const PsfmConfig& base) const {
    std::vector<PsfmConfig> out;
    const auto& inner_size = kind == ModelKind::KNNW  ? k_values.size()
                             : kind == ModelKind::NWE ? h_values.size()
                                                      : sigma_values.size();
    for (std::size_t n : n_values) {
        for (std::size_t j = 0; j < inner_size; ++j) {
            PsfmConfig c = base;
            c.kind = kind;
            c.n = n;
            switch (kind) {
            case ModelKind::KNNW: c.k = k_values[j]; break;
            case ModelKind::FNM:
            case ModelKind::GRNN: c.sigma = sigma_values[j]; break;
            case ModelKind::NWE: c.with_isotropic_h(h_values[j]); break;
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

namespace {

// Training pairs for one x-pattern length plus their pairwise distances.
struct LooData {
    PatternSet set;
    PatternMatrix x;
    PatternMatrix y;
    std::vector<double> dist; // N x N
    std::vector<std::vector<double>> actual;

    LooData(const MonthlySeries& series, std::size_t n, std::size_t m, Variant variant,
            std::size_t last)
        : set(build_pattern_set(series, n, m, variant, last)), x(set.x_matrix()),
          y(set.y_matrix()) {
        const std::size_t big_n = set.size();
        dist.assign(big_n * big_n, 0.0);
        for (std::size_t i = 0; i < big_n; ++i) {
            for (std::size_t j = i + 1; j < big_n; ++j) {
                dist[i * big_n + j] = dist[j * big_n + i] = distance(x.row(i), x.row(j));
            }
        }
        for (const auto& p : set.pairs) {
            auto window = series.values().subspan(p.origin + 1, m);
            actual.emplace_back(window.begin(), window.end());
        }
    }
};

bool isotropic(const std::vector<double>& h) {
    return std::adjacent_find(h.begin(), h.end(), std::not_equal_to<>()) == h.end();
}

CvScore score_with(const LooData& data, const PsfmConfig& config) {
    const std::size_t big_n = data.set.size();
    const std::size_t m = config.m;
    const std::size_t min_neighbors = config.kind == ModelKind::KNNW ? config.k : 1;

    CvScore out{config, 0.0, 0, true, {}};
    double total = 0.0;
    std::vector<std::size_t> keep;
    std::vector<double> d;
    for (std::size_t j = 0; j < big_n; ++j) {
        const std::size_t origin_j = data.set.pairs[j].origin;
        keep.clear();
        for (std::size_t i = 0; i < big_n; ++i) {
            const std::size_t origin_i = data.set.pairs[i].origin;
            const std::size_t gap = origin_i > origin_j ? origin_i - origin_j : origin_j - origin_i;
            if (gap >= m) keep.push_back(i);
        }
        if (keep.size() < min_neighbors) continue;

        d.resize(keep.size());
        for (std::size_t c = 0; c < keep.size(); ++c) d[c] = data.dist[j * big_n + keep[c]];

        WeightVector w;
        switch (config.kind) {
        case ModelKind::KNNW:
            w = knnw_weights_from_distances(d, config.k, config.rho, config.gamma);
            break;
        case ModelKind::FNM:
            w = fnm_weights_from_distances(d, config.sigma, config.alpha);
            break;
        case ModelKind::GRNN:
            w = grnn_weights_from_distances(d, config.sigma);
            break;
        case ModelKind::NWE:
            if (isotropic(config.h)) {
                // Product Gaussian with one bandwidth h equals a radial
                // Gaussian of width h*sqrt(2).
                w = grnn_weights_from_distances(d, config.h.front() * std::sqrt(2.0));
            } else {
                PatternMatrix sub(0, data.x.cols());
                for (std::size_t i : keep) sub.push_row(data.x.row(i));
                w = nwe_weights(data.x.row(j), sub, config.h);
            }
            break;
        }

        std::vector<double> y_hat(m, 0.0);
        for (std::size_t s : w.support) {
            auto row = data.y.row(keep[s]);
            for (std::size_t t = 0; t < m; ++t) y_hat[t] += w.weights[s] * row[t];
        }
        const auto forecast = decode_y(y_hat, data.set.pairs[j].y.coding);
        total += compute_metrics(data.actual[j], forecast).mape;
        ++out.n_folds;
    }
    if (out.n_folds < 3) {
        throw InsufficientDataError(std::to_string(out.n_folds) +
                                    " usable cross-validation folds; at least 3 are required");
    }
    out.score = total / static_cast<double>(out.n_folds);
    return out;
}

CvScore infeasible(const PsfmConfig& config, const std::string& why) {
    return {config, std::numeric_limits<double>::infinity(), 0, false, why};
}

} // namespace

CvScore loo_cv_score(const MonthlySeries& series, const PsfmConfig& config,
                     std::size_t last_train_index) {
    config.validate();
    LooData data(series, config.n, config.m, config.variant, last_train_index);
    return score_with(data, config);
}

GridResult grid_search(const MonthlySeries& series, ModelKind kind, const GridSpec& grid,
                       std::size_t last_train_index, const PsfmConfig& base) {
    const auto candidates = grid.candidates(kind, base);
    if (candidates.empty()) throw ConfigError("empty grid for " + to_string(kind));

    GridResult result;
    result.table.reserve(candidates.size());
    std::map<std::size_t, std::unique_ptr<LooData>> by_n;
    std::map<std::size_t, std::string> failed_n;
    for (const auto& config : candidates) {
        try {
            config.validate();
            if (failed_n.count(config.n)) {
                result.table.push_back(infeasible(config, failed_n[config.n]));
                continue;
            }
            auto& data = by_n[config.n];
            if (!data) {
                try {
                    data = std::make_unique<LooData>(series, config.n, config.m, config.variant,
                                                     last_train_index);
                } catch (const Error& e) {
                    by_n.erase(config.n);
                    failed_n[config.n] = e.what();
                    throw;
                }
            }
            result.table.push_back(score_with(*data, config));
        } catch (const Error& e) {
            result.table.push_back(infeasible(config, e.what()));
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& cell : result.table) {
        if (cell.feasible) best = std::min(best, cell.score);
    }
    if (!std::isfinite(best)) {
        throw TuningError("no feasible " + to_string(kind) + " configuration for series '" +
                          series.id() + "'");
    }

    // Prefer shorter patterns, then the smoother model.
    auto preferred = [](const PsfmConfig& a, const PsfmConfig& b) {
        if (a.n != b.n) return a.n < b.n;
        if (a.kind == ModelKind::KNNW && a.k != b.k) return a.k < b.k;
        if ((a.kind == ModelKind::FNM || a.kind == ModelKind::GRNN) && a.sigma != b.sigma) {
            return a.sigma > b.sigma;
        }
        if (a.kind == ModelKind::NWE && a.h != b.h) return a.h > b.h;
        return false;
    };
    const CvScore* chosen = nullptr;
    for (const auto& cell : result.table) {
        if (!cell.feasible || cell.score > best + kScoreTieTolerance) continue;
        if (!chosen || preferred(cell.config, chosen->config)) chosen = &cell;
    }
    result.best = chosen->config;
    result.best_score = chosen->score;
    return result;
}

void write_score_table(std::ostream& out, ModelKind kind, const std::vector<CvScore>& table) {
    const char* param = kind == ModelKind::KNNW ? "k" : kind == ModelKind::NWE ? "h" : "sigma";
    out << "n," << param << ",score\n";
    for (const auto& cell : table) {
        out << cell.config.n << ',';
        switch (kind) {
        case ModelKind::KNNW: out << cell.config.k; break;
        case ModelKind::NWE: out << cell.config.h.front(); break;
        default: out << cell.config.sigma; break;
        }
        out << ',';
        if (cell.feasible) {
            out << cell.score;
        } else {
            out << "NA";
        }
        out << '\n';
    }
}

} // namespace psf

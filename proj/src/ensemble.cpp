#include "psf/ensemble.hpp"

#include "psf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace psf {

std::vector<double> aggregate_mean(std::span<const std::vector<double>> members) {
    if (members.empty()) throw ShapeError("cannot aggregate zero members");
    const std::size_t m = members.front().size();
    std::vector<double> mean(m, 0.0);
    double count = 0.0;
    for (const auto& member : members) {
        if (member.size() != m) {
            throw ShapeError("member forecast of length " + std::to_string(member.size()) +
                             ", expected " + std::to_string(m));
        }
        count += 1.0;
        for (std::size_t t = 0; t < m; ++t) mean[t] += (member[t] - mean[t]) / count;
    }
    return mean;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string to_string(EnsembleId id) {
    switch (id) {
    case EnsembleId::E1: return "Ensemble1";
    case EnsembleId::E2: return "Ensemble2";
    case EnsembleId::E3: return "Ensemble3";
    case EnsembleId::E4: return "Ensemble4";
    }
    return "?";
}

std::string to_string(Strategy s) {
    return "FNMe" + std::to_string(static_cast<int>(s) + 1);
}

PsfmConfig with_coding_family(PsfmConfig config, ScalarFamily family) {
    config.variant = Variant::V1;
    config.coding_model = ScalarModelSpec::auto_select(family);
    return config;
}

std::vector<PsfmConfig> ensemble_members(EnsembleId id, const TunedConfigs& tuned) {
    auto lookup = [](const std::map<ModelKind, PsfmConfig>& table, ModelKind kind,
                     const char* group) {
        auto it = table.find(kind);
        if (it == table.end()) {
            throw ConfigError("no tuned " + std::string(group) + " config for " +
                              to_string(kind));
        }
        return it->second;
    };
    std::vector<PsfmConfig> out;
    const bool all = id == EnsembleId::E4;
    if (id == EnsembleId::E1 || all) {
        for (ModelKind kind : kAllKinds) out.push_back(lookup(tuned.v2, kind, "V2"));
    }
    if (id == EnsembleId::E2 || all) {
        for (ModelKind kind : kAllKinds) {
            out.push_back(with_coding_family(lookup(tuned.v1, kind, "V1"), ScalarFamily::RandomWalk));
        }
    }
    if (id == EnsembleId::E3 || all) {
        for (ModelKind kind : kAllKinds) {
            out.push_back(with_coding_family(lookup(tuned.v1, kind, "V1"), ScalarFamily::Smoothing));
        }
    }
    return out;
}

EnsembleForecast heterogeneous_forecast(const MonthlySeries& series,
                                        std::span<const PsfmConfig> members,
                                        const SplitSpec& split) {
    if (members.empty()) throw ConfigError("heterogeneous ensemble without members");

    EnsembleForecast out;
    std::vector<CodingVars> codings;
    std::vector<std::string> failures;
    for (const auto& config : members) {
        try {
            SingleForecast f = forecast_single(series, config, split);
            out.member_forecasts.push_back(std::move(f.forecast));
            out.member_patterns.push_back(std::move(f.y_pattern));
            out.member_labels.push_back(config.label());
            codings.push_back(f.coding);
        } catch (const Error& e) {
            failures.push_back(config.label() + " (" + e.what() + ")");
        }
    }
    if (!failures.empty()) {
        std::string list;
        for (const auto& f : failures) list += (list.empty() ? "" : "; ") + f;
        throw MemberError(std::to_string(failures.size()) + " member(s) failed: " + list);
    }

    out.pattern_space = std::all_of(codings.begin(), codings.end(),
                                    [&](const CodingVars& c) { return c == codings.front(); });
    if (out.pattern_space) {
        out.forecast = decode_y(aggregate_mean(out.member_patterns), codings.front());
    } else {
        out.forecast = aggregate_mean(out.member_forecasts);
    }
    return out;
}

EnsembleForecast heterogeneous_forecast(const MonthlySeries& series, EnsembleId id,
                                        const TunedConfigs& tuned, const SplitSpec& split) {
    const auto members = ensemble_members(id, tuned);
    return heterogeneous_forecast(series, members, split);
}

void DiversitySpec::validate() const {
    base.validate();
    if (base.variant != Variant::V2) {
        throw ConfigError("homogeneous ensembles decode with V2 coding; base must be V2");
    }
    if (K < 1) throw ConfigError("ensemble needs at least one member");
    if (!(train_frac > 0.0 && train_frac <= 1.0)) throw ConfigError("train_frac must lie in (0,1]");
    if (!(feature_frac > 0.0 && feature_frac <= 1.0)) {
        throw ConfigError("feature_frac must lie in (0,1]");
    }
    if (!(sigma_s >= 0.0 && sigma_x >= 0.0 && sigma_y >= 0.0)) {
        throw ConfigError("noise standard deviations must be non-negative");
    }
    if (!(max_failure_frac >= 0.0 && max_failure_frac < 1.0)) {
        throw ConfigError("max_failure_frac must lie in [0,1)");
    }
    if (strategy == Strategy::S3 && base.kind == ModelKind::KNNW) {
        throw ConfigError("width noise (S3) needs a kernel model, not k-NNw");
    }
}

namespace {

// xi ~ N(1, sd); exactly 1 when sd = 0 so that zero noise is an identity.
class UnitNoise {
public:
    UnitNoise(std::mt19937_64& rng, double sd) : rng_(rng), sd_(sd), dist_(1.0, sd > 0.0 ? sd : 1.0) {}
    double operator()() { return sd_ > 0.0 ? dist_(rng_) : 1.0; }

private:
    std::mt19937_64& rng_;
    double sd_;
    std::normal_distribution<double> dist_;
};

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count,
                                        std::mt19937_64& rng) {
    std::vector<std::size_t> all(population);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> out;
    out.reserve(count);
    // Selection sampling keeps the chosen indices in ascending order.
    std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng);
    return out;
}

} // namespace

Member make_member(const DiversitySpec& spec, std::size_t member_index,
                   const PatternMatrix& train_x, const PatternMatrix& train_y,
                   std::span<const double> query) {
    if (member_index < 1 || member_index > spec.K) {
        throw ConfigError("member index " + std::to_string(member_index) + " outside [1, " +
                          std::to_string(spec.K) + "]");
    }
    if (train_x.rows() != train_y.rows() || query.size() != train_x.cols()) {
        throw ShapeError("member base data shapes disagree");
    }
    std::mt19937_64 rng(derive_seed(spec.seed, member_index));

    Member member{train_x, train_y, {query.begin(), query.end()}, spec.base, {}, {}};
    const std::size_t big_n = train_x.rows();
    const std::size_t n = train_x.cols();

    switch (spec.strategy) {
    case Strategy::S1: {
        const auto size = static_cast<std::size_t>(std::lround(spec.train_frac * static_cast<double>(big_n)));
        if (size < 1) throw ConfigError("S1 sample of the training set is empty");
        member.rows = sample_indices(big_n, size, rng);
        PatternMatrix x(0, n), y(0, train_y.cols());
        for (std::size_t i : member.rows) {
            x.push_row(train_x.row(i));
            y.push_row(train_y.row(i));
        }
        member.train_x = std::move(x);
        member.train_y = std::move(y);
        break;
    }
    case Strategy::S2: {
        const auto size = static_cast<std::size_t>(std::floor(spec.feature_frac * static_cast<double>(n)));
        if (size < 1) throw ConfigError("S2 feature sample is empty");
        member.features = sample_indices(n, size, rng);
        PatternMatrix x(big_n, size);
        for (std::size_t i = 0; i < big_n; ++i) {
            for (std::size_t f = 0; f < size; ++f) x(i, f) = train_x(i, member.features[f]);
        }
        std::vector<double> q(size);
        std::vector<double> h;
        for (std::size_t f = 0; f < size; ++f) {
            q[f] = query[member.features[f]];
            if (!spec.base.h.empty()) h.push_back(spec.base.h[member.features[f]]);
        }
        member.train_x = std::move(x);
        member.query = std::move(q);
        member.config.n = size;
        member.config.h = std::move(h);
        // Distances shrink by about sqrt(n'/n) in the subspace.
        member.config.sigma = spec.base.sigma * std::sqrt(static_cast<double>(size) / static_cast<double>(n));
        break;
    }
    case Strategy::S3: {
        UnitNoise xi(rng, spec.sigma_s);
        double factor = xi();
        for (int attempt = 0; !(factor > 0.0); ++attempt) {
            if (attempt == 1000) throw ConfigError("S3 noise never produced a positive width");
            factor = xi();
        }
        member.config.sigma = spec.base.sigma * factor;
        for (double& b : member.config.h) b *= factor;
        break;
    }
    case Strategy::S4: {
        UnitNoise xi(rng, spec.sigma_x);
        for (std::size_t i = 0; i < big_n; ++i) {
            for (double& v : member.train_x.row(i)) v *= xi();
        }
        for (double& v : member.query) v *= xi();
        break;
    }
    case Strategy::S5: {
        UnitNoise xi(rng, spec.sigma_y);
        for (std::size_t i = 0; i < big_n; ++i) {
            for (double& v : member.train_y.row(i)) v *= xi();
        }
        break;
    }
    }
    return member;
}

EnsembleForecast homogeneous_forecast(const MonthlySeries& series, const DiversitySpec& spec,
                                      const SplitSpec& split) {
    spec.validate();
    if (split.horizon != spec.base.m) {
        throw ConfigError("split horizon differs from the base model horizon");
    }
    split.validate(series, spec.base.n);

    const PatternSet training =
        build_pattern_set(series, spec.base.n, spec.base.m, Variant::V2, split.test_origin);
    const XPattern query = encode_x(series, split.test_origin, spec.base.n);
    const PatternMatrix train_x = training.x_matrix();
    const PatternMatrix train_y = training.y_matrix();

    EnsembleForecast out;
    out.pattern_space = true;
    for (std::size_t k = 1; k <= spec.K; ++k) {
        try {
            Member member = make_member(spec, k, train_x, train_y, query.components);
            auto y = predict_pattern(member.query, member.train_x, member.train_y, member.config);
            out.member_forecasts.push_back(decode_y(y, query.coding));
            out.member_patterns.push_back(std::move(y));
            out.member_labels.push_back(to_string(spec.strategy) + "#" + std::to_string(k));
        } catch (const Error&) {
            ++out.failed_members;
        }
    }
    const double allowed = spec.max_failure_frac * static_cast<double>(spec.K);
    if (out.member_patterns.empty() || static_cast<double>(out.failed_members) > allowed) {
        throw EnsembleError(std::to_string(out.failed_members) + " of " + std::to_string(spec.K) +
                            " members failed");
    }
    out.forecast = decode_y(aggregate_mean(out.member_patterns), query.coding);
    return out;
}

} // namespace psf

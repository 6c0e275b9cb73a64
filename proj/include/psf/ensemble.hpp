#pragma once

#include "psf/psfm.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace psf {

/// Component-wise mean of equal-length vectors. Uses a running mean so that
/// identical inputs reproduce themselves exactly.
std::vector<double> aggregate_mean(std::span<const std::vector<double>> members);

/// Seed for stream `stream` derived from `seed` (e.g. one stream per series,
/// per member). Independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Heterogeneous ensembles

enum class EnsembleId { E1, E2, E3, E4 };

std::string to_string(EnsembleId id);

/// Tuned hyperparameters per model kind. V1 configs are shared by the
/// random-walk and smoothing coding forecasters.
struct TunedConfigs {
    std::map<ModelKind, PsfmConfig> v2;
    std::map<ModelKind, PsfmConfig> v1;
};

inline constexpr ModelKind kAllKinds[] = {ModelKind::KNNW, ModelKind::FNM, ModelKind::NWE,
                                          ModelKind::GRNN};

/// V1 config coded with the given AutoSelect family.
PsfmConfig with_coding_family(PsfmConfig config, ScalarFamily family);

/// E1: the four kinds with V2 coding. E2: V1 with random-walk coding
/// forecasts. E3: V1 with smoothing coding forecasts. E4: all twelve.
std::vector<PsfmConfig> ensemble_members(EnsembleId id, const TunedConfigs& tuned);

struct EnsembleForecast {
    std::vector<double> forecast;                      ///< demand, length m
    std::vector<std::vector<double>> member_forecasts; ///< demand, successful members
    std::vector<std::vector<double>> member_patterns;  ///< y-patterns, successful members
    std::vector<std::string> member_labels;
    std::size_t failed_members = 0;
    bool pattern_space = false; ///< aggregated before decoding
};

/// Runs every member and averages. Members sharing one set of coding
/// variables are averaged as y-patterns and decoded once; otherwise the
/// decoded forecasts are averaged. Any member failure throws MemberError.
EnsembleForecast heterogeneous_forecast(const MonthlySeries& series,
                                        std::span<const PsfmConfig> members,
                                        const SplitSpec& split);
EnsembleForecast heterogeneous_forecast(const MonthlySeries& series, EnsembleId id,
                                        const TunedConfigs& tuned, const SplitSpec& split);

// ---------------------------------------------------------------------------
// Homogeneous ensembles

enum class Strategy {
    S1, ///< random training subset without replacement
    S2, ///< random feature subset without replacement
    S3, ///< multiplicative noise on the width parameter
    S4, ///< multiplicative noise on x-pattern components
    S5, ///< multiplicative noise on training y-pattern components
};

std::string to_string(Strategy s);

struct DiversitySpec {
    Strategy strategy = Strategy::S1;
    PsfmConfig base;           ///< tuned V2 base model, usually FNM
    double train_frac = 0.85;  ///< S1: N'/N
    double feature_frac = 0.925; ///< S2: n'/n
    double sigma_s = 0.475;    ///< S3
    double sigma_x = 0.4;      ///< S4
    double sigma_y = 0.65;     ///< S5
    std::size_t K = 100;
    std::uint64_t seed = 0;
    double max_failure_frac = 0.1;

    void validate() const;
};

/// Training data and query seen by one homogeneous member.
struct Member {
    PatternMatrix train_x;
    PatternMatrix train_y;
    std::vector<double> query;
    PsfmConfig config;
    std::vector<std::size_t> rows;     ///< training rows kept (S1)
    std::vector<std::size_t> features; ///< x components kept (S2)
};

/// Perturbed copy of the base model for member `member_index` (1..K). All
/// randomness comes from derive_seed(spec.seed, member_index).
///  S1: round(train_frac*N) rows sampled without replacement.
///  S2: floor(feature_frac*n) features without replacement; sigma scaled by
///      sqrt(n'/n).
///  S3: sigma * xi, xi ~ N(1, sigma_s) truncated to xi > 0.
///  S4: every training and query x component times its own xi ~ N(1, sigma_x).
///  S5: every training y component times its own xi ~ N(1, sigma_y).
Member make_member(const DiversitySpec& spec, std::size_t member_index,
                   const PatternMatrix& train_x, const PatternMatrix& train_y,
                   std::span<const double> query);

/// K members forecast independently; y-patterns are averaged and decoded with
/// the query window's V2 coding. Up to max_failure_frac of members may fail
/// (excluded and counted); more throws EnsembleError.
EnsembleForecast homogeneous_forecast(const MonthlySeries& series, const DiversitySpec& spec,
                                      const SplitSpec& split);

} // namespace psf

#pragma once

#include "psf/psfm.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace psf {

/// Search domains. Only the lists relevant to a model kind are used:
/// k-NNw n x k, FNM and GRNN n x sigma, N-WE n x h (isotropic bandwidth).
struct GridSpec {
    std::vector<std::size_t> n_values;
    std::vector<std::size_t> k_values;
    std::vector<double> sigma_values;
    std::vector<double> h_values;

    /// n in {3,6,9,12,15,18,24}; k in 1..12; sigma and h in 0.05*2^j, j=0..8.
    static GridSpec defaults();

    /// Cartesian grid for `kind`, n outermost. Fixed fields (rho, gamma,
    /// alpha, m, variant) are copied from `base`.
    std::vector<PsfmConfig> candidates(ModelKind kind, const PsfmConfig& base) const;
};

struct CvScore {
    PsfmConfig config;
    double score = 0.0;       ///< mean MAPE over usable folds, %
    std::size_t n_folds = 0;
    bool feasible = true;
    std::string failure;      ///< reason when infeasible
};

/// Leave-one-out score over the training pairs whose y windows end at or
/// before `last_train_index`. Fold j forecasts pair j from every pair whose
/// y window does not overlap pair j's y window, decodes with pair j's own
/// coding variables and scores MAPE against its demand. Folds with too few
/// usable pairs (fewer than k for k-NNw) are skipped; fewer than 3 usable
/// folds throws InsufficientDataError.
CvScore loo_cv_score(const MonthlySeries& series, const PsfmConfig& config,
                     std::size_t last_train_index);

struct GridResult {
    PsfmConfig best;
    double best_score = 0.0;
    std::vector<CvScore> table; ///< grid order
};

/// Scores within this distance of the minimum count as ties.
inline constexpr double kScoreTieTolerance = 1e-9;

/// Exhaustive search; the best config minimizes the LOO score, ties resolved
/// by smaller n, then smaller k / larger sigma / larger h, then grid order.
/// TuningError if no cell is feasible.
GridResult grid_search(const MonthlySeries& series, ModelKind kind, const GridSpec& grid,
                       std::size_t last_train_index, const PsfmConfig& base = {});

/// `param...,score` table; infeasible cells print NA.
void write_score_table(std::ostream& out, ModelKind kind, const std::vector<CvScore>& table);

} // namespace psf

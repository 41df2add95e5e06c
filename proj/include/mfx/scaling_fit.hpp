#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfx/fluctuation.hpp"

namespace mfx {

struct FitRecord {
    double q = 0.0;
    double h = 0.0;
    double sigma_minus = 0.0;
    double sigma_plus = 0.0;
    double amplitude = 0.0;
    double chi2 = 0.0;
    int n_scales = 0;
};

/// Power-law exponents h(q) of F(q;s) ~ A s^h with asymmetric 1-sigma

/// errors from the 68.3% likelihood interval.
struct ScalingFit {
    std::string id_x, id_y;
    std::vector<FitRecord> records; // one per q, in grid order
    int s_lo = 0, s_hi = 0;         // fitted scale window
    std::vector<std::string> warnings;

    const FitRecord* find_q(double q, double tol = 1e-9) const;
};

struct FitOptions {
    double h_min = 0.0;
    double h_max = 3.0;
    double h_step = 1e-3;
    /// Restrict the fit to scales in [lo, hi]; default uses every scale.
    std::optional<std::pair<int, int>> scale_window;
};

/// Minimizes chi^2(h) = sum_s [F_obs - A s^h]^2 / sigma_obs^2 with the
/// amplitude profiled analytically at each h, then integrates the
/// normalized likelihood for the 68.3% interval. Scales need positive F and
/// positive sigma_obs; fewer than 3 usable scales is an error.
ScalingFit fit_scaling(const FluctuationSurface& surface, const FitOptions& options = {});

struct CrossoverReport {
    bool flagged = false;
    int breakpoint_scale = 0;   // first scale of the right-hand segment
    double improvement = 0.0;   // 1 - RSS_two / RSS_single, in log-log space
    double slope_left = 0.0;
    double slope_right = 0.0;
    double slope_single = 0.0;
};

/// Two-segment piecewise log-log fit over all interior breakpoints; flags a
/// crossover when the best split reduces the residual sum by more than
/// `threshold` (default 30%). Needs >= 8 scales.
CrossoverReport detect_crossover(const FluctuationSurface& surface, double q,
                                 double threshold = 0.30);

/// CSV columns: q,h,sigma_minus,sigma_plus,chi2,n_scales,s_lo,s_hi.
void write_fit_csv(const ScalingFit& fit, const std::string& path);

} // namespace mfx

#pragma once

#include <string>
#include <vector>

#include "mfx/scaling_fit.hpp"

namespace mfx {

struct TauPoint {
    double q = 0.0;
    double tau = 0.0;
};

/// tau(q) = q h(q) - 1 (one-dimensional support).
std::vector<TauPoint> tau_spectrum(const ScalingFit& fit);

struct SpectrumPoint {
    double q = 0.0;
    double tau = 0.0;
    double alpha = 0.0;   // d tau / dq, finite differences
    double f_alpha = 0.0; // q alpha - tau
};

struct SingularitySpectrum {
    std::vector<SpectrumPoint> points;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double delta_alpha = 0.0;       // alpha_max - alpha_min >= 0
    double delta_alpha_sigma = 0.0; // propagated from fit errors when available
    std::vector<std::string> warnings;
};

/// Legendre transform of tau on the q grid; alpha by central differences
/// (one-sided at the ends). Non-concave stretches are reported as warnings,
/// never clipped.
SingularitySpectrum singularity_spectrum(const std::vector<TauPoint>& tau);

/// Same, plus delta_alpha_sigma propagated from the fit's 1-sigma errors.
SingularitySpectrum singularity_spectrum(const ScalingFit& fit);

enum class ScalingBranch { stationary, nonstationary };

std::string to_string(ScalingBranch b);

/// Hurst, correlation and power-spectrum exponents from h(2):
///   h(2) > 1  (fBm-like):  H = h(2)-1, gamma = -2H,  beta = 2H+1
///   h(2) <= 1 (fGn-like):  H = h(2),   gamma = 2-2H, beta = 2H-1
struct DerivedExponents {
    double h2 = 0.0;
    double H = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    ScalingBranch branch = ScalingBranch::stationary;
};

/// Throws std::invalid_argument when the fit has no q=2 record.
DerivedExponents derived_exponents(const ScalingFit& fit);

/// Deviation from h_xy = (h_xx + h_yy)/2 with the 1-sigma error propagated
/// in quadrature (per-q sigma = mean of the fit's asymmetric errors).
struct PairDeviation {
    double q = 0.0;
    double delta = 0.0;
    double sigma = 0.0;
    bool significant = false; // |delta| > sigma
};

std::vector<PairDeviation> mixed_pair_check(const ScalingFit& fit_xx, const ScalingFit& fit_yy,
                                            const ScalingFit& fit_xy);

/// Everything downstream consumers need about one series or pair.
struct MultifractalSummary {
    std::string id_x, id_y;
    std::vector<SpectrumPoint> spectrum;
    double delta_alpha = 0.0;
    double delta_alpha_sigma = 0.0;
    DerivedExponents exponents;
    std::vector<std::string> warnings;
};

MultifractalSummary multifractal_summary(const ScalingFit& fit);

/// CSV columns: q,h,tau,alpha,f_alpha.
void write_spectrum_csv(const ScalingFit& fit, const SingularitySpectrum& spec,
                        const std::string& path);

} // namespace mfx

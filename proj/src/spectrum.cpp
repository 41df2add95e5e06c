#include "mfx/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {

std::vector<TauPoint> tau_spectrum(const ScalingFit& fit) {
    if (fit.records.size() < 3)
        throw std::invalid_argument("tau_spectrum: need at least 3 q values");
    std::vector<TauPoint> tau(fit.records.size());
    for (std::size_t i = 0; i < fit.records.size(); ++i)
        tau[i] = {fit.records[i].q, fit.records[i].q * fit.records[i].h - 1.0};
    return tau;
}

namespace {

/// alpha_i = d tau / dq by central differences on a possibly non-uniform
/// grid, one-sided at the ends. sigma_h, when given, is propagated to a
/// per-point sigma_alpha.
void finite_difference_alpha(const std::vector<TauPoint>& tau, const std::vector<double>* sigma_h,
                             std::vector<double>& alpha, std::vector<double>& sigma_alpha) {
    const std::size_t n = tau.size();
    alpha.resize(n);
    sigma_alpha.assign(n, 0.0);
    auto var_tau = [&](std::size_t i) {
        if (!sigma_h) return 0.0;
        const double s = tau[i].q * (*sigma_h)[i];
        return s * s;
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : i - 1;
        std::size_t b = i + 1 == n ? i : i + 1;
        const double dq = tau[b].q - tau[a].q;
        alpha[i] = (tau[b].tau - tau[a].tau) / dq;
        sigma_alpha[i] = std::sqrt(var_tau(b) + var_tau(a)) / std::fabs(dq);
    }
}

SingularitySpectrum build_spectrum(const std::vector<TauPoint>& tau,
                                   const std::vector<double>* sigma_h) {
    if (tau.size() < 3)
        throw std::invalid_argument("singularity_spectrum: need at least 3 q points");
    for (std::size_t i = 1; i < tau.size(); ++i)
        if (!(tau[i].q > tau[i - 1].q))
            throw std::invalid_argument("singularity_spectrum: q grid must be increasing");

    std::vector<double> alpha, sigma_alpha;
    finite_difference_alpha(tau, sigma_h, alpha, sigma_alpha);

    SingularitySpectrum spec;
    spec.points.resize(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        spec.points[i].q = tau[i].q;
        spec.points[i].tau = tau[i].tau;
        spec.points[i].alpha = alpha[i];
        spec.points[i].f_alpha = tau[i].q * alpha[i] - tau[i].tau;
    }

    // for concave tau the extremes sit at the ends of the q grid (the
    // finite-grid proxy for q -> +-inf); min/max keeps delta_alpha >= 0
    // under estimation noise
    std::size_t imin = 0, imax = 0;
    for (std::size_t i = 1; i < alpha.size(); ++i) {
        if (alpha[i] < alpha[imin]) imin = i;
        if (alpha[i] > alpha[imax]) imax = i;
    }
    spec.alpha_min = alpha[imin];
    spec.alpha_max = alpha[imax];
    spec.delta_alpha = spec.alpha_max - spec.alpha_min;
    spec.delta_alpha_sigma =
        std::sqrt(sigma_alpha[imin] * sigma_alpha[imin] + sigma_alpha[imax] * sigma_alpha[imax]);

    for (std::size_t i = 1; i < alpha.size(); ++i) {
        if (alpha[i] > alpha[i - 1] + 1e-9) {
            spec.warnings.push_back("tau is non-concave between q=" + format_double(tau[i - 1].q) +
                                    " and q=" + format_double(tau[i].q) +
                                    " (alpha increases); spectrum emitted unclipped");
            break;
        }
    }
    return spec;
}

} // namespace

SingularitySpectrum singularity_spectrum(const std::vector<TauPoint>& tau) {
    return build_spectrum(tau, nullptr);
}

SingularitySpectrum singularity_spectrum(const ScalingFit& fit) {
    const auto tau = tau_spectrum(fit);
    std::vector<double> sigma_h(fit.records.size());
    for (std::size_t i = 0; i < fit.records.size(); ++i)
        sigma_h[i] = 0.5 * (fit.records[i].sigma_minus + fit.records[i].sigma_plus);
    return build_spectrum(tau, &sigma_h);
}

std::string to_string(ScalingBranch b) {
    return b == ScalingBranch::nonstationary ? "nonstationary" : "stationary";
}

DerivedExponents derived_exponents(const ScalingFit& fit) {
    const FitRecord* r2 = fit.find_q(2.0);
    if (!r2) throw std::invalid_argument("derived_exponents: fit has no q=2 record");
    DerivedExponents d;
    d.h2 = r2->h;
    if (r2->h > 1.0) {
        d.branch = ScalingBranch::nonstationary;
        d.H = r2->h - 1.0;
        d.gamma = -2.0 * d.H;
        d.beta = 2.0 * d.H + 1.0;
    } else {
        d.branch = ScalingBranch::stationary;
        d.H = r2->h;
        d.gamma = 2.0 - 2.0 * d.H;
        d.beta = 2.0 * d.H - 1.0;
    }
    return d;
}

std::vector<PairDeviation> mixed_pair_check(const ScalingFit& fit_xx, const ScalingFit& fit_yy,
                                            const ScalingFit& fit_xy) {
    const std::size_t n = fit_xy.records.size();
    if (fit_xx.records.size() != n || fit_yy.records.size() != n)
        throw std::invalid_argument("mixed_pair_check: q grids differ in size");
    std::vector<PairDeviation> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rxx = fit_xx.records[i];
        const auto& ryy = fit_yy.records[i];
        const auto& rxy = fit_xy.records[i];
        if (std::fabs(rxx.q - rxy.q) > 1e-9 || std::fabs(ryy.q - rxy.q) > 1e-9)
            throw std::invalid_argument("mixed_pair_check: q grids do not match");
        auto sig = [](const FitRecord& r) { return 0.5 * (r.sigma_minus + r.sigma_plus); };
        PairDeviation d;
        d.q = rxy.q;
        d.delta = rxy.h - 0.5 * (rxx.h + ryy.h);
        d.sigma = std::sqrt(sig(rxy) * sig(rxy) + 0.25 * sig(rxx) * sig(rxx) +
                            0.25 * sig(ryy) * sig(ryy));
        d.significant = std::fabs(d.delta) > d.sigma;
        out[i] = d;
    }
    return out;
}

MultifractalSummary multifractal_summary(const ScalingFit& fit) {
    MultifractalSummary s;
    s.id_x = fit.id_x;
    s.id_y = fit.id_y;
    auto spec = singularity_spectrum(fit);
    s.spectrum = spec.points;
    s.delta_alpha = spec.delta_alpha;
    s.delta_alpha_sigma = spec.delta_alpha_sigma;
    s.exponents = derived_exponents(fit);
    s.warnings = spec.warnings;
    return s;
}

void write_spectrum_csv(const ScalingFit& fit, const SingularitySpectrum& spec,
                        const std::string& path) {
    if (fit.records.size() != spec.points.size())
        throw std::invalid_argument("write_spectrum_csv: fit/spectrum size mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write spectrum file: " + path);
    out << "q,h,tau,alpha,f_alpha\n";
    for (std::size_t i = 0; i < spec.points.size(); ++i)
        out << format_double(spec.points[i].q) << ',' << format_double(fit.records[i].h) << ','
            << format_double(spec.points[i].tau) << ',' << format_double(spec.points[i].alpha)
            << ',' << format_double(spec.points[i].f_alpha) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace mfx

#include "mfx/scaling_fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {

const FitRecord* ScalingFit::find_q(double q, double tol) const {
    for (const auto& r : records)
        if (std::fabs(r.q - q) <= tol) return &r;
    return nullptr;
}

namespace {

struct FitData {
    std::vector<double> f;   // observed F at usable scales
    std::vector<double> w;   // 1/sigma^2
    std::vector<double> lns; // ln s
    std::vector<int> s;
};

/// chi^2 with the amplitude profiled out: chi2(h) = SwFF - SwFu^2 / Swuu.
struct ProfiledChi2 {
    const FitData& d;
    double swff;

    explicit ProfiledChi2(const FitData& data) : d(data) {
        swff = 0.0;
        for (std::size_t i = 0; i < d.f.size(); ++i) swff += d.w[i] * d.f[i] * d.f[i];
    }

    /// u may be precomputed s^h values; returns chi2 and the profiled A.
    std::pair<double, double> eval(const double* u) const {
        double swfu = 0.0, swuu = 0.0;
        for (std::size_t i = 0; i < d.f.size(); ++i) {
            const double wu = d.w[i] * u[i];
            swfu += wu * d.f[i];
            swuu += wu * u[i];
        }
        const double a = swuu > 0.0 ? swfu / swuu : 0.0;
        const double chi2 = std::max(0.0, swff - a * swfu);
        return {chi2, a};
    }

    std::pair<double, double> eval_at(double h, std::vector<double>& scratch) const {
        scratch.resize(d.f.size());
        for (std::size_t i = 0; i < d.f.size(); ++i) scratch[i] = std::exp(h * d.lns[i]);
        return eval(scratch.data());
    }

    /// d chi2 / dh at the profiled amplitude (envelope theorem).
    double derivative(double h, std::vector<double>& scratch) const {
        scratch.resize(d.f.size());
        for (std::size_t i = 0; i < d.f.size(); ++i) scratch[i] = std::exp(h * d.lns[i]);
        const auto [chi2, a] = eval(scratch.data());
        (void)chi2;
        double g = 0.0;
        for (std::size_t i = 0; i < d.f.size(); ++i)
            g += d.w[i] * (d.f[i] - a * scratch[i]) * a * scratch[i] * d.lns[i];
        return -2.0 * g;
    }
};

FitRecord fit_one_q(double q, const FitData& data, const FitOptions& opt,
                    const std::vector<double>& hgrid, const std::vector<double>& u_table,
                    std::vector<std::string>& warnings) {
    const std::size_t nh = hgrid.size();
    const std::size_t ns = data.f.size();
    ProfiledChi2 chi2(data);

    std::vector<double> chi(nh);
    std::size_t best = 0;
    for (std::size_t k = 0; k < nh; ++k) {
        chi[k] = chi2.eval(u_table.data() + k * ns).first;
        if (chi[k] < chi[best]) best = k;
    }

    // parabola through the bracketing grid points, then a derivative-sign
    // bisection inside the cell; the parabola alone leaves O(step^2) bias
    double h_best = hgrid[best];
    if (best > 0 && best + 1 < nh) {
        const double c0 = chi[best - 1], c1 = chi[best], c2 = chi[best + 1];
        const double denom = c0 - 2.0 * c1 + c2;
        if (denom > 0.0) {
            const double shift = 0.5 * (c0 - c2) / denom;
            if (std::fabs(shift) <= 1.0) h_best = hgrid[best] + shift * opt.h_step;
        }
        std::vector<double> scratch;
        double lo = hgrid[best - 1], hi = hgrid[best + 1];
        double glo = chi2.derivative(lo, scratch);
        double ghi = chi2.derivative(hi, scratch);
        if (glo < 0.0 && ghi > 0.0) {
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = chi2.derivative(mid, scratch);
                if (gm < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            h_best = 0.5 * (lo + hi);
        }
    }

    std::vector<double> scratch;
    const auto [chi2_best, a_best] = chi2.eval_at(h_best, scratch);

    // 68.3% highest-density interval of the normalized likelihood on the grid
    std::vector<double> like(nh);
    double z = 0.0;
    for (std::size_t k = 0; k < nh; ++k) {
        like[k] = std::exp(-0.5 * (chi[k] - chi2_best));
        z += like[k];
    }
    std::vector<std::size_t> order(nh);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return like[a] > like[b]; });
    double mass = 0.0;
    std::size_t lo_idx = best, hi_idx = best;
    for (std::size_t k : order) {
        mass += like[k];
        lo_idx = std::min(lo_idx, k);
        hi_idx = std::max(hi_idx, k);
        if (mass >= 0.683 * z) break;
    }
    const double tail = std::max(like.front(), like.back());
    if (tail > 1e-9 * like[order.front()])
        warnings.push_back("q=" + format_double(q) +
                           ": likelihood truncated at the h-grid boundary");

    FitRecord rec;
    rec.q = q;
    rec.h = h_best;
    rec.sigma_minus = std::max(0.0, h_best - hgrid[lo_idx]);
    rec.sigma_plus = std::max(0.0, hgrid[hi_idx] - h_best);
    rec.amplitude = a_best;
    rec.chi2 = chi2_best;
    rec.n_scales = static_cast<int>(ns);
    return rec;
}

} // namespace

ScalingFit fit_scaling(const FluctuationSurface& surface, const FitOptions& options) {
    if (!(options.h_step > 0.0) || !(options.h_max > options.h_min))
        throw std::invalid_argument("fit_scaling: invalid h grid");

    int win_lo = surface.scales.front();
    int win_hi = surface.scales.back();
    if (options.scale_window) {
        win_lo = options.scale_window->first;
        win_hi = options.scale_window->second;
    }

    ScalingFit fit;
    fit.id_x = surface.id_x;
    fit.id_y = surface.id_y;
    fit.s_lo = win_lo;
    fit.s_hi = win_hi;

    const std::size_t nh =
        static_cast<std::size_t>(std::floor((options.h_max - options.h_min) / options.h_step)) + 1;
    std::vector<double> hgrid(nh);
    for (std::size_t k = 0; k < nh; ++k) hgrid[k] = options.h_min + options.h_step * k;

    // the s^h table depends only on the usable scale set, shared across q
    std::vector<double> u_table;
    std::vector<int> last_scales;

    for (std::size_t qi = 0; qi < surface.q.size(); ++qi) {
        FitData data;
        bool any_sigma = false;
        for (std::size_t si = 0; si < surface.scales.size(); ++si) {
            const int s = surface.scales[si];
            if (s < win_lo || s > win_hi) continue;
            const double f = surface.f_at(si, qi);
            const double sg = surface.sigma_at(si, qi);
            if (sg > 0.0) any_sigma = true;
            if (!(f > 0.0) || !std::isfinite(f) || !(sg > 0.0) || !std::isfinite(sg)) continue;
            data.f.push_back(f);
            data.w.push_back(1.0 / (sg * sg));
            data.lns.push_back(std::log(static_cast<double>(s)));
            data.s.push_back(s);
        }
        if (data.f.size() < 3) {
            if (!any_sigma)
                throw DegenerateInput("fit_scaling: all sigma_obs are zero at q=" +
                                      format_double(surface.q[qi]) + " (likelihood undefined)");
            throw DegenerateInput("fit_scaling: fewer than 3 usable scales at q=" +
                                  format_double(surface.q[qi]));
        }
        if (data.s != last_scales) {
            u_table.assign(nh * data.s.size(), 0.0);
            for (std::size_t k = 0; k < nh; ++k)
                for (std::size_t i = 0; i < data.s.size(); ++i)
                    u_table[k * data.s.size() + i] = std::exp(hgrid[k] * data.lns[i]);
            last_scales = data.s;
        }
        fit.records.push_back(
            fit_one_q(surface.q[qi], data, options, hgrid, u_table, fit.warnings));
    }
    return fit;
}

CrossoverReport detect_crossover(const FluctuationSurface& surface, double q, double threshold) {
    std::size_t qi = surface.q.size();
    for (std::size_t k = 0; k < surface.q.size(); ++k)
        if (std::fabs(surface.q[k] - q) <= 1e-9) qi = k;
    if (qi == surface.q.size())
        throw std::invalid_argument("detect_crossover: q not present in the surface");

    std::vector<double> x, y;
    std::vector<int> s;
    for (std::size_t si = 0; si < surface.scales.size(); ++si) {
        const double f = surface.f_at(si, qi);
        if (!(f > 0.0)) continue;
        x.push_back(std::log(static_cast<double>(surface.scales[si])));
        y.push_back(std::log(f));
        s.push_back(surface.scales[si]);
    }
    const std::size_t n = x.size();
    if (n < 8) throw std::invalid_argument("detect_crossover: need at least 8 usable scales");

    auto ols = [&](std::size_t b, std::size_t e) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(e - b);
        for (std::size_t i = b; i < e; ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        const double det = m * sxx - sx * sx;
        const double slope = det != 0.0 ? (m * sxy - sx * sy) / det : 0.0;
        const double icpt = (sy - slope * sx) / m;
        double rss = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            const double r = y[i] - icpt - slope * x[i];
            rss += r * r;
        }
        return std::make_pair(rss, slope);
    };

    CrossoverReport rep;
    const auto [rss1, slope1] = ols(0, n);
    rep.slope_single = slope1;
    double best_rss = rss1;
    std::size_t best_k = 0;
    double best_l = slope1, best_r = slope1;
    for (std::size_t k = 3; k + 3 <= n; ++k) {
        const auto [rl, sl] = ols(0, k);
        const auto [rr, sr] = ols(k, n);
        if (rl + rr < best_rss) {
            best_rss = rl + rr;
            best_k = k;
            best_l = sl;
            best_r = sr;
        }
    }
    if (best_k > 0 && rss1 > 1e-24) {
        rep.improvement = 1.0 - best_rss / rss1;
        rep.breakpoint_scale = s[best_k];
        rep.slope_left = best_l;
        rep.slope_right = best_r;
        rep.flagged = rep.improvement >= threshold;
    }
    return rep;
}

void write_fit_csv(const ScalingFit& fit, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write fit file: " + path);
    out << "q,h,sigma_minus,sigma_plus,chi2,n_scales,s_lo,s_hi\n";
    for (const auto& r : fit.records)
        out << format_double(r.q) << ',' << format_double(r.h) << ','
            << format_double(r.sigma_minus) << ',' << format_double(r.sigma_plus) << ','
            << format_double(r.chi2) << ',' << r.n_scales << ',' << fit.s_lo << ',' << fit.s_hi
            << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace mfx

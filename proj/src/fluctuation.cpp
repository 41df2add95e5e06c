#include "mfx/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {

ScaleGrid ScaleGrid::geometric(int lo, int hi, int count) {
    if (lo < 3 || hi <= lo || count < 2)
        throw std::invalid_argument("ScaleGrid::geometric: need 3 <= lo < hi and count >= 2");
    std::vector<int> scales;
    const double llo = std::log(static_cast<double>(lo));
    const double lhi = std::log(static_cast<double>(hi));
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        const int s = static_cast<int>(std::lround(std::exp(llo + f * (lhi - llo))));
        if (scales.empty() || s > scales.back()) scales.push_back(s);
    }
    ScaleGrid g;
    g.scales = std::move(scales);
    g.spacing = Spacing::geometric;
    return g;
}

ScaleGrid ScaleGrid::from_list(std::vector<int> scales) {
    if (scales.empty()) throw std::invalid_argument("ScaleGrid: empty scale list");
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (scales[i] <= scales[i - 1])
            throw std::invalid_argument("ScaleGrid: scales must be strictly increasing");
    ScaleGrid g;
    g.scales = std::move(scales);
    g.spacing = Spacing::explicit_list;
    return g;
}

ScaleGrid ScaleGrid::default_for_length(std::size_t t) {
    const int hi = static_cast<int>(t / 2);
    if (hi <= 10) throw std::invalid_argument("series too short for the default scale grid");
    return geometric(10, hi, 30);
}

void ScaleGrid::validate(std::size_t series_length, int order) const {
    if (scales.empty()) throw std::invalid_argument("ScaleGrid: empty");
    for (int s : scales) {
        if (s < order + 2)
            throw std::invalid_argument("scale " + std::to_string(s) +
                                        " too small for detrend order " + std::to_string(order));
        if (static_cast<std::size_t>(s) * 2 > series_length)
            throw std::invalid_argument("scale " + std::to_string(s) +
                                        " too large: fewer than 2 segments (need s <= t/2)");
    }
}

QGrid QGrid::from_list(std::vector<double> q) {
    if (q.empty()) throw std::invalid_argument("QGrid: empty moment list");
    for (double v : q)
        if (!std::isfinite(v)) throw std::invalid_argument("QGrid: non-finite moment");
    QGrid g;
    g.q = std::move(q);
    return g;
}

QGrid QGrid::default_grid() {
    return from_list({-10, -8, -6, -4, -2, -1, -0.5, 0, 0.5, 1, 2, 4, 6, 8, 10});
}

namespace {

/// Orthonormal polynomial basis on {0..len-1}, abscissa scaled to [-1,1].
/// residual(x) = x - sum_j (b_j . x) b_j removes the best order-m fit.
class SegmentDetrender {
public:
    SegmentDetrender(int len, int order) : len_(len), order_(order) {
        basis_.assign(static_cast<std::size_t>(order + 1) * len, 0.0);
        std::vector<double> u(len);
        for (int i = 0; i < len; ++i)
            u[i] = len == 1 ? 0.0 : 2.0 * i / (len - 1) - 1.0;
        for (int j = 0; j <= order; ++j) {
            double* bj = row(j);
            for (int i = 0; i < len; ++i) bj[i] = j == 0 ? 1.0 : row(j - 1)[i] * u[i];
            // two Gram-Schmidt passes keep the basis orthonormal to machine
            // precision even for longer segments
            for (int pass = 0; pass < 2; ++pass) {
                for (int k = 0; k < j; ++k) {
                    const double* bk = row(k);
                    double d = 0.0;
                    for (int i = 0; i < len; ++i) d += bj[i] * bk[i];
                    for (int i = 0; i < len; ++i) bj[i] -= d * bk[i];
                }
            }
            double norm = 0.0;
            for (int i = 0; i < len; ++i) norm += bj[i] * bj[i];
            norm = std::sqrt(norm);
            if (norm <= 0.0) throw std::invalid_argument("degenerate detrend basis");
            for (int i = 0; i < len; ++i) bj[i] /= norm;
        }
    }

    void residual(const double* x, double* out) const {
        for (int i = 0; i < len_; ++i) out[i] = x[i];
        for (int j = 0; j <= order_; ++j) {
            const double* bj = row(j);
            double d = 0.0;
            for (int i = 0; i < len_; ++i) d += out[i] * bj[i];
            for (int i = 0; i < len_; ++i) out[i] -= d * bj[i];
        }
    }

private:
    double* row(int j) { return basis_.data() + static_cast<std::size_t>(j) * len_; }
    const double* row(int j) const { return basis_.data() + static_cast<std::size_t>(j) * len_; }

    int len_;
    int order_;
    std::vector<double> basis_;
};

void check_pair(const Profile& x, const Profile& y, int scale, int order) {
    if (x.values.size() != y.values.size())
        throw std::invalid_argument("profiles must have equal length");
    if (order < 0 || order > 3)
        throw std::invalid_argument("detrend order must be in 0..3");
    const std::size_t t = x.values.size();
    if (scale < order + 2)
        throw std::invalid_argument("scale " + std::to_string(scale) +
                                    " too small for detrend order " + std::to_string(order));
    if (static_cast<std::size_t>(scale) * 2 > t)
        throw std::invalid_argument("scale " + std::to_string(scale) +
                                    " too large: fewer than 2 segments (need s <= t/2)");
}

} // namespace

std::vector<double> detrended_segments(const Profile& x, int scale, int order) {
    check_pair(x, x, scale, order);
    const std::size_t t = x.values.size();
    const std::size_t ns = t / static_cast<std::size_t>(scale);
    const std::size_t s = static_cast<std::size_t>(scale);
    SegmentDetrender detrender(scale, order);
    std::vector<double> out(2 * ns * s);
    for (std::size_t m = 0; m < ns; ++m)
        detrender.residual(x.values.data() + m * s, out.data() + m * s);
    for (std::size_t m = 0; m < ns; ++m)
        detrender.residual(x.values.data() + (t - (m + 1) * s), out.data() + (ns + m) * s);
    return out;
}

SegmentCovariances segment_covariances(const Profile& x, const Profile& y, int scale, int order) {
    check_pair(x, y, scale, order);
    const auto rx = detrended_segments(x, scale, order);
    const auto ry = x.values == y.values ? rx : detrended_segments(y, scale, order);
    const std::size_t s = static_cast<std::size_t>(scale);
    const std::size_t nseg = rx.size() / s;
    SegmentCovariances out;
    out.scale = scale;
    out.values.resize(nseg);
    for (std::size_t m = 0; m < nseg; ++m) {
        double acc = 0.0;
        const double* a = rx.data() + m * s;
        const double* b = ry.data() + m * s;
        for (std::size_t i = 0; i < s; ++i) acc += a[i] * b[i];
        out.values[m] = acc / static_cast<double>(s);
    }
    return out;
}

MomentResult moments_from_covariances(const std::vector<double>& covs,
                                      const std::vector<double>& qs, int scale) {
    const std::size_t n = covs.size();
    if (n < 2) throw std::invalid_argument("need at least 2 segment covariances");

    std::vector<double> logs;     // ln|cov| for nonzero entries, in order
    std::vector<std::size_t> pos; // their segment indices
    logs.reserve(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double a = std::fabs(covs[m]);
        if (a > 0.0) {
            logs.push_back(std::log(a));
            pos.push_back(m);
        }
    }
    const std::size_t n0 = logs.size();

    MomentResult res;
    res.F.resize(qs.size());
    res.sigma.resize(qs.size());

    if (n0 == 0)
        throw DegenerateInput("all segment covariances are zero at s=" + std::to_string(scale));
    if (n0 < n) {
        std::size_t first = 0;
        std::vector<bool> nonzero(n, false);
        for (std::size_t p : pos) nonzero[p] = true;
        while (first < n && nonzero[first]) ++first;
        res.warnings.push_back("s=" + std::to_string(scale) + ": " + std::to_string(n - n0) +
                               " zero-covariance segment(s), first at segment " +
                               std::to_string(first + 1) +
                               "; contribute 0 for q>0, excluded for q<=0");
    }

    std::vector<double> jack(n);
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        const double q = qs[qi];
        double F, sigma;
        if (q == 0.0) {
            // log average over usable segments
            double sum = 0.0;
            for (double l : logs) sum += l;
            F = std::exp(0.5 * sum / static_cast<double>(n0));
            if (n0 >= 2) {
                for (std::size_t i = 0; i < n0; ++i)
                    jack[i] = std::exp(0.5 * (sum - logs[i]) / static_cast<double>(n0 - 1));
                double jm = 0.0;
                for (std::size_t i = 0; i < n0; ++i) jm += jack[i];
                jm /= static_cast<double>(n0);
                double ss = 0.0;
                for (std::size_t i = 0; i < n0; ++i) {
                    const double d = jack[i] - jm;
                    ss += d * d;
                }
                sigma = std::sqrt(ss * static_cast<double>(n0 - 1) / static_cast<double>(n0));
            } else {
                sigma = 0.0;
                res.warnings.push_back("s=" + std::to_string(scale) +
                                       ": single usable segment at q=0, sigma set to 0");
            }
        } else {
            const bool keep_zeros = q > 0.0; // zeros contribute 0 for q>0
            const std::size_t denom = keep_zeros ? n : n0;
            // shifted exponentials keep |cov|^(q/2) finite for extreme q
            double shift = -std::numeric_limits<double>::infinity();
            for (double l : logs) shift = std::max(shift, 0.5 * q * l);
            double sum = 0.0;
            std::vector<double> v(n0);
            for (std::size_t i = 0; i < n0; ++i) {
                v[i] = std::exp(0.5 * q * logs[i] - shift);
                sum += v[i];
            }
            F = std::exp((shift + std::log(sum / static_cast<double>(denom))) / q);
            const std::size_t nj = keep_zeros ? n : n0;
            if (nj >= 2 && sum > 0.0) {
                // delete-one over the segments that enter the average
                std::size_t w = 0;
                for (std::size_t m = 0; m < nj; ++m) {
                    double s_loo;
                    if (keep_zeros) {
                        const bool is_nonzero = w < n0 && pos[w] == m;
                        s_loo = is_nonzero ? sum - v[w] : sum;
                        if (is_nonzero) ++w;
                    } else {
                        s_loo = sum - v[m];
                    }
                    jack[m] = s_loo > 0.0
                                  ? std::exp((shift + std::log(s_loo / static_cast<double>(nj - 1))) / q)
                                  : 0.0;
                }
                double jm = 0.0;
                for (std::size_t m = 0; m < nj; ++m) jm += jack[m];
                jm /= static_cast<double>(nj);
                double ss = 0.0;
                for (std::size_t m = 0; m < nj; ++m) {
                    const double d = jack[m] - jm;
                    ss += d * d;
                }
                sigma = std::sqrt(ss * static_cast<double>(nj - 1) / static_cast<double>(nj));
            } else {
                sigma = 0.0;
                res.warnings.push_back("s=" + std::to_string(scale) + ": single usable segment at q=" +
                                       format_double(q) + ", sigma set to 0");
            }
        }
        if (!(std::isfinite(F) && F > 0.0))
            throw DegenerateInput("non-positive fluctuation value at s=" + std::to_string(scale) +
                                  ", q=" + format_double(q));
        res.F[qi] = F;
        res.sigma[qi] = std::isfinite(sigma) ? sigma : 0.0;
    }
    return res;
}

FluctuationSurface fluctuation_surface(const Profile& x, const Profile& y, const ScaleGrid& scales,
                                       const QGrid& qs, int order) {
    if (x.values.size() != y.values.size())
        throw std::invalid_argument("profiles must have equal length");
    scales.validate(x.values.size(), order);
    if (qs.q.empty()) throw std::invalid_argument("empty q grid");

    FluctuationSurface surf;
    surf.id_x = x.id;
    surf.id_y = y.id;
    surf.scales = scales.scales;
    surf.q = qs.q;
    surf.order = order;
    surf.mode = x.values == y.values ? FluctuationSurface::Mode::auto_
                                     : FluctuationSurface::Mode::cross;
    surf.F.resize(surf.scales.size() * surf.q.size());
    surf.sigma_obs.resize(surf.F.size());

    for (std::size_t si = 0; si < surf.scales.size(); ++si) {
        const auto covs = segment_covariances(x, y, surf.scales[si], order);
        auto mom = moments_from_covariances(covs.values, surf.q, surf.scales[si]);
        for (std::size_t qi = 0; qi < surf.q.size(); ++qi) {
            surf.F[surf.index(si, qi)] = mom.F[qi];
            surf.sigma_obs[surf.index(si, qi)] = mom.sigma[qi];
        }
        for (auto& w : mom.warnings) surf.warnings.push_back(std::move(w));
    }
    return surf;
}

FluctuationSurface fluctuation_surface(const Profile& x, const ScaleGrid& scales, const QGrid& qs,
                                       int order) {
    return fluctuation_surface(x, x, scales, qs, order);
}

void write_surface_csv(const FluctuationSurface& surface, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write surface file: " + path);
    out << "q,s,F,sigma_obs,mode,order\n";
    const char* mode = surface.mode == FluctuationSurface::Mode::auto_ ? "auto" : "cross";
    for (std::size_t qi = 0; qi < surface.q.size(); ++qi)
        for (std::size_t si = 0; si < surface.scales.size(); ++si)
            out << format_double(surface.q[qi]) << ',' << surface.scales[si] << ','
                << format_double(surface.f_at(si, qi)) << ','
                << format_double(surface.sigma_at(si, qi)) << ',' << mode << ','
                << surface.order << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace mfx

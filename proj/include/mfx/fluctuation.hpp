#pragma once

#include <string>
#include <vector>

#include "mfx/series.hpp"

namespace mfx {

/// Scales at which fluctuation functions are evaluated. Construction
/// enforces: strictly increasing, every scale >= order+2 (overdetermined
/// fits) and <= t/2 (at least two segments) when checked against a length.
struct ScaleGrid {
    enum class Spacing { geometric, explicit_list };

    std::vector<int> scales;
    Spacing spacing = Spacing::explicit_list;

    static ScaleGrid geometric(int lo, int hi, int count);
    static ScaleGrid from_list(std::vector<int> scales);
    /// 30 geometrically spaced integers from 10 to t/2, deduplicated.
    static ScaleGrid default_for_length(std::size_t t);

    void validate(std::size_t series_length, int order) const;
};

/// Moments q of the fluctuation average. q=0 is allowed and routed to the
/// logarithmic average.
struct QGrid {
    std::vector<double> q;

    static QGrid from_list(std::vector<double> q);
    /// {-10,-8,-6,-4,-2,-1,-0.5,0,0.5,1,2,4,6,8,10}
    static QGrid default_grid();
};

/// Per-segment detrended covariances F_xy(s,m), m = 1..2*int(t/s): forward
/// segments from the start, backward segments from the opposite end. Signed
/// in cross mode, nonnegative when X == Y.
struct SegmentCovariances {
    int scale = 0;
    std::vector<double> values;
};

/// Residuals of order-m least-squares polynomial fits over the 2*N_s
/// segments of a profile, flattened segment-major (segment m occupies
/// [m*scale, (m+1)*scale)). Shared by the covariance and panel paths so both
/// produce bit-identical numbers.
std::vector<double> detrended_segments(const Profile& x, int scale, int order);

SegmentCovariances segment_covariances(const Profile& x, const Profile& y, int scale, int order);

struct FluctuationSurface {
    enum class Mode { auto_, cross };

    std::string id_x, id_y;
    std::vector<int> scales;
    std::vector<double> q;
    std::vector<double> F;         // [scale][q] row-major, strictly positive
    std::vector<double> sigma_obs; // jackknife standard error of F, same layout
    Mode mode = Mode::auto_;
    int order = 1;
    std::vector<std::string> warnings;

    std::size_t index(std::size_t si, std::size_t qi) const { return si * q.size() + qi; }
    double f_at(std::size_t si, std::size_t qi) const { return F[index(si, qi)]; }
    double sigma_at(std::size_t si, std::size_t qi) const { return sigma_obs[index(si, qi)]; }
};

/// q-order fluctuation function over the (s,q) grid:
///   F(q;s) = { mean_m |F_xy(s,m)|^(q/2) }^(1/q)   over all 2*N_s segments,
///   F(0;s) = exp( half the mean of ln|F_xy(s,m)| ).
/// Zero segment covariances contribute 0 for q>0 and are excluded (with a
/// warning) for q<=0. sigma_obs is the delete-one-segment jackknife error.
FluctuationSurface fluctuation_surface(const Profile& x, const Profile& y, const ScaleGrid& scales,
                                       const QGrid& qs, int order);

/// MF-DFA convenience: fluctuation_surface(x, x, ...).
FluctuationSurface fluctuation_surface(const Profile& x, const ScaleGrid& scales, const QGrid& qs,
                                       int order);

/// Moment reduction used by fluctuation_surface and the panel pipeline.
/// Returns F(q), sigma(q) for one scale worth of segment covariances.
struct MomentResult {
    std::vector<double> F;
    std::vector<double> sigma;
    std::vector<std::string> warnings;
};
MomentResult moments_from_covariances(const std::vector<double>& covs, const std::vector<double>& qs,
                                      int scale);

/// Tidy CSV with columns q,s,F,sigma_obs,mode,order.
void write_surface_csv(const FluctuationSurface& surface, const std::string& path);

} // namespace mfx

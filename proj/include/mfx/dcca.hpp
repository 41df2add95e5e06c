#pragma once

#include <string>
#include <vector>

#include "mfx/fluctuation.hpp"
#include "mfx/series.hpp"

namespace mfx {

/// Scale-dependent DCCA cross-correlation coefficient plus its unweighted
/// scale average and across-scale dispersion.
struct DccaProfile {
    std::string id_x, id_y;
    std::vector<int> scales;
    std::vector<double> sigma_s; // per-scale coefficient, in [-1,1]
    double sigma_mean = 0.0;
    double sigma_sd = 0.0; // sample sd across scales (0 when one scale)
    std::vector<std::string> warnings;
};

/// sigma_DCCA(s) = mean_m F_xy(s,m) / sqrt(mean_m F_xx(s,m) * mean_m F_yy(s,m)).
/// The numerator is the plain signed mean of segment covariances (the
/// paper's F^2_xy is symbolic, not a square); the denominator holds the DFA
/// fluctuation magnitudes of each series. Throws DegenerateInput when a
/// denominator vanishes.
DccaProfile dcca_coefficient(const Profile& x, const Profile& y, const ScaleGrid& scales,
                             int order);

struct DccaMatrix {
    std::vector<std::string> ids;
    std::vector<double> sigma;       // n x n row-major, diagonal exactly +1
    std::vector<double> delta_sigma; // same layout, diagonal exactly 0
    std::vector<std::string> annotations; // per-pair failures, never throws

    std::size_t size() const { return ids.size(); }
    double sigma_at(std::size_t i, std::size_t j) const { return sigma[i * ids.size() + j]; }
    double delta_at(std::size_t i, std::size_t j) const { return delta_sigma[i * ids.size() + j]; }
};

/// All-pairs symmetric matrix of scale-averaged coefficients. Failed pairs
/// are recorded as annotations with NaN entries; the run always completes.
DccaMatrix dcca_matrix(const std::vector<Profile>& profiles, const ScaleGrid& scales, int order,
                       unsigned threads = 0);

/// Square CSV, header row/column = ids.
void write_matrix_csv(const std::vector<std::string>& ids, const std::vector<double>& values,
                      const std::string& path);

struct LabeledMatrix {
    std::vector<std::string> ids;
    std::vector<double> values;
};

LabeledMatrix read_matrix_csv(const std::string& path);

} // namespace mfx

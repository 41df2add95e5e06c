#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mfx/series.hpp"

namespace mfx {

/// max(4, floor(n^(1/3))) capped at 32.
int default_bins(std::size_t n);

/// Histogram mutual information in nats after marginal equiquantization:
/// each margin is split into `bins` equal-probability cells by rank
/// quantiles (ties broken by index order). Requires length >= 10*bins and
/// bins >= 2; constant margins are degenerate. Clipped at 0 from below.
double mutual_information(const std::vector<double>& x, const std::vector<double>& y, int bins);

/// Global correlation coefficient lambda = sqrt(1 - exp(-2 I)); equals |rho|
/// for bivariate Gaussians. Rejects negative I.
double gcc(double I);

struct DependenceReport {
    std::string id_x, id_y;
    double I = 0.0;      // nats
    double lambda = 0.0; // in [0,1)
    int bins = 0;
    double crit_value = 0.0;
    bool reject = false;
    double significance = 0.05;
    int n_surrogates = 0;
    std::uint64_t seed = 0;
};

/// Permutation-surrogate independence test: the critical value is the
/// ceil((1-significance)(n+1))-th smallest of the surrogate MI values, and
/// H0 is rejected when the observed MI exceeds it. Surrogates permute the
/// equiquantization labels of y with an mt19937_64 stream derived per
/// surrogate from the seed, so results are reproducible for a fixed seed
/// regardless of `threads`.
DependenceReport independence_test(const std::vector<double>& x, const std::vector<double>& y,
                                   int bins, int n_surrogates, double significance,
                                   std::uint64_t seed, unsigned threads = 0);

/// Descriptive statistics for one market-class pair group. kurtosis_raw is
/// the fourth standardized moment (the paper's convention), kurtosis_excess
/// subtracts 3; both are blank (has_moments=false) for zero-variance groups.
struct GroupStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0; // population sd, so a singleton group reports 0
    double kurtosis_raw = 0.0;
    double kurtosis_excess = 0.0;
    double skewness = 0.0;
    double min = 0.0;
    double max = 0.0;
    bool has_moments = false; // false when sd == 0 or n == 0
    std::vector<std::string> warnings;
};

struct ClassPairValue {
    MarketClass class_x = MarketClass::unknown;
    MarketClass class_y = MarketClass::unknown;
    double value = 0.0;
};

/// Groups values by canonical class-pair key (dd, de, df, ee, ef, ff; the
/// classes in each pair are sorted). Pairs involving `unknown` are skipped.
/// Every canonical key appears in the result; empty groups carry n == 0.
std::map<std::string, GroupStats> gcc_group_stats(const std::vector<ClassPairValue>& values);

/// Tidy CSV: id_x,id_y,I_nats,lambda,bins,crit_value,reject.
void write_mi_report_csv(const std::vector<DependenceReport>& reports, const std::string& path);

/// Criterion rows x group columns, mirroring the descriptive-stats table.
void write_group_stats_csv(const std::map<std::string, GroupStats>& stats,
                           const std::string& path);

} // namespace mfx

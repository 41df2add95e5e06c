#include "mfx/mutual_information.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {

int default_bins(std::size_t n) {
    const int b = static_cast<int>(std::floor(std::cbrt(static_cast<double>(n))));
    return std::min(32, std::max(4, b));
}

namespace {

void check_inputs(const std::vector<double>& x, const std::vector<double>& y, int bins) {
    if (x.size() != y.size())
        throw std::invalid_argument("mutual_information: unequal lengths");
    if (bins < 2) throw std::invalid_argument("mutual_information: bins must be >= 2");
    if (x.size() < 10 * static_cast<std::size_t>(bins))
        throw std::invalid_argument("mutual_information: need length >= 10*bins");
    auto constant = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo == *hi;
    };
    if (constant(x) || constant(y))
        throw DegenerateInput("mutual_information: constant margin, quantiles undefined");
}

/// Rank-quantile cell per observation: cell(rank r) = r*bins/n, ties broken
/// by index order.
std::vector<int> equiquantize_labels(const std::vector<double>& v, int bins) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r)
        labels[idx[r]] = static_cast<int>((r * static_cast<std::size_t>(bins)) / n);
    return labels;
}

double mi_from_labels(const std::vector<int>& lx, const std::vector<int>& ly, int bins) {
    const std::size_t n = lx.size();
    const std::size_t b = static_cast<std::size_t>(bins);
    std::vector<std::uint32_t> joint(b * b, 0);
    std::vector<std::uint32_t> mx(b, 0), my(b, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++joint[static_cast<std::size_t>(lx[i]) * b + static_cast<std::size_t>(ly[i])];
        ++mx[static_cast<std::size_t>(lx[i])];
        ++my[static_cast<std::size_t>(ly[i])];
    }
    const double dn = static_cast<double>(n);
    double I = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        if (mx[i] == 0) continue;
        for (std::size_t j = 0; j < b; ++j) {
            const std::uint32_t c = joint[i * b + j];
            if (c == 0 || my[j] == 0) continue;
            const double pj = c / dn;
            I += pj * std::log(pj * dn * dn / (static_cast<double>(mx[i]) * my[j]));
        }
    }
    return std::max(0.0, I);
}

/// Unbiased bounded draw by modulo rejection; reproducible across platforms
/// because it only uses raw mt19937_64 outputs.
std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

void shuffle_labels(std::vector<int>& labels, std::mt19937_64& rng) {
    for (std::size_t i = labels.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded_rand(rng, i + 1));
        std::swap(labels[i], labels[j]);
    }
}

} // namespace

double mutual_information(const std::vector<double>& x, const std::vector<double>& y, int bins) {
    check_inputs(x, y, bins);
    return mi_from_labels(equiquantize_labels(x, bins), equiquantize_labels(y, bins), bins);
}

double gcc(double I) {
    if (I < 0.0) throw std::invalid_argument("gcc: mutual information must be >= 0");
    return std::sqrt(1.0 - std::exp(-2.0 * I));
}

DependenceReport independence_test(const std::vector<double>& x, const std::vector<double>& y,
                                   int bins, int n_surrogates, double significance,
                                   std::uint64_t seed, unsigned threads) {
    check_inputs(x, y, bins);
    if (n_surrogates < 99)
        throw std::invalid_argument("independence_test: need at least 99 surrogates");
    if (!(significance > 0.0 && significance < 1.0))
        throw std::invalid_argument("independence_test: significance must be in (0,1)");

    const auto lx = equiquantize_labels(x, bins);
    const auto ly = equiquantize_labels(y, bins);

    DependenceReport rep;
    rep.I = mi_from_labels(lx, ly, bins);
    rep.lambda = gcc(rep.I);
    rep.bins = bins;
    rep.significance = significance;
    rep.n_surrogates = n_surrogates;
    rep.seed = seed;

    std::vector<double> surrogate(static_cast<std::size_t>(n_surrogates));
    parallel_for(surrogate.size(), threads, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i + 1));
        std::vector<int> shuffled = ly;
        shuffle_labels(shuffled, rng);
        surrogate[i] = mi_from_labels(lx, shuffled, bins);
    });
    std::sort(surrogate.begin(), surrogate.end());
    std::size_t k = static_cast<std::size_t>(
        std::ceil((1.0 - significance) * (n_surrogates + 1)));
    k = std::min<std::size_t>(std::max<std::size_t>(k, 1), surrogate.size());
    rep.crit_value = surrogate[k - 1];
    rep.reject = rep.I > rep.crit_value;
    return rep;
}

namespace {

const char* kGroupKeys[] = {"dd", "de", "ee", "ef", "ff", "df"};

std::string class_pair_key(MarketClass a, MarketClass b) {
    auto letter = [](MarketClass c) {
        switch (c) {
            case MarketClass::developed: return 'd';
            case MarketClass::emerging: return 'e';
            case MarketClass::frontier: return 'f';
            default: return '?';
        }
    };
    char la = letter(a), lb = letter(b);
    if (la == '?' || lb == '?') return "";
    if (la > lb) std::swap(la, lb);
    return std::string{la, lb};
}

GroupStats stats_of(std::vector<double> v) {
    GroupStats g;
    g.n = v.size();
    if (v.empty()) return g;
    std::sort(v.begin(), v.end());
    g.min = v.front();
    g.max = v.back();
    g.median = v.size() % 2 == 1 ? v[v.size() / 2]
                                 : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    g.mean = m;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double dn = static_cast<double>(v.size());
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;
    g.sd = std::sqrt(m2);
    if (m2 > 0.0) {
        g.skewness = m3 / std::pow(m2, 1.5);
        g.kurtosis_raw = m4 / (m2 * m2);
        g.kurtosis_excess = g.kurtosis_raw - 3.0;
        g.has_moments = true;
    } else {
        g.warnings.push_back("zero variance: kurtosis and skewness undefined");
    }
    return g;
}

} // namespace

std::map<std::string, GroupStats> gcc_group_stats(const std::vector<ClassPairValue>& values) {
    std::map<std::string, std::vector<double>> grouped;
    for (const char* k : kGroupKeys) grouped[k] = {};
    for (const auto& v : values) {
        const std::string key = class_pair_key(v.class_x, v.class_y);
        if (!key.empty()) grouped[key].push_back(v.value);
    }
    std::map<std::string, GroupStats> out;
    for (auto& [key, vals] : grouped) out[key] = stats_of(std::move(vals));
    return out;
}

void write_mi_report_csv(const std::vector<DependenceReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write MI report: " + path);
    out << "id_x,id_y,I_nats,lambda,bins,crit_value,reject\n";
    for (const auto& r : reports)
        out << r.id_x << ',' << r.id_y << ',' << format_double(r.I) << ','
            << format_double(r.lambda) << ',' << r.bins << ',' << format_double(r.crit_value)
            << ',' << (r.reject ? 1 : 0) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void write_group_stats_csv(const std::map<std::string, GroupStats>& stats,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write group stats: " + path);
    out << "criterion";
    for (const char* k : kGroupKeys) out << ',' << k;
    out << "\n";
    auto row = [&](const char* name, auto getter, bool moments_only) {
        out << name;
        for (const char* k : kGroupKeys) {
            const auto& g = stats.at(k);
            out << ',';
            if (g.n == 0 || (moments_only && !g.has_moments)) continue; // blank
            out << format_double(getter(g));
        }
        out << "\n";
    };
    row("mean", [](const GroupStats& g) { return g.mean; }, false);
    row("median", [](const GroupStats& g) { return g.median; }, false);
    row("sd", [](const GroupStats& g) { return g.sd; }, false);
    row("kurtosis", [](const GroupStats& g) { return g.kurtosis_raw; }, true);
    row("kurtosis_excess", [](const GroupStats& g) { return g.kurtosis_excess; }, true);
    row("skewness", [](const GroupStats& g) { return g.skewness; }, true);
    row("min", [](const GroupStats& g) { return g.min; }, false);
    row("max", [](const GroupStats& g) { return g.max; }, false);
    out << "n";
    for (const char* k : kGroupKeys) out << ',' << stats.at(k).n;
    out << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace mfx

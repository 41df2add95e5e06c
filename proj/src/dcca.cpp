#include "mfx/dcca.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {
namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

void summarize(DccaProfile& p) {
    p.sigma_mean = mean_of(p.sigma_s);
    if (p.sigma_s.size() >= 2) {
        double ss = 0.0;
        for (double v : p.sigma_s) {
            const double d = v - p.sigma_mean;
            ss += d * d;
        }
        p.sigma_sd = std::sqrt(ss / static_cast<double>(p.sigma_s.size() - 1));
    } else {
        p.sigma_sd = 0.0;
    }
}

} // namespace

DccaProfile dcca_coefficient(const Profile& x, const Profile& y, const ScaleGrid& scales,
                             int order) {
    if (x.values.size() != y.values.size())
        throw std::invalid_argument("dcca_coefficient: profiles must have equal length");
    scales.validate(x.values.size(), order);

    DccaProfile p;
    p.id_x = x.id;
    p.id_y = y.id;
    p.scales = scales.scales;
    p.sigma_s.resize(scales.scales.size());
    for (std::size_t si = 0; si < scales.scales.size(); ++si) {
        const int s = scales.scales[si];
        const double num = mean_of(segment_covariances(x, y, s, order).values);
        const double vxx = mean_of(segment_covariances(x, x, s, order).values);
        const double vyy = mean_of(segment_covariances(y, y, s, order).values);
        const double den = std::sqrt(vxx * vyy);
        if (!(den > 0.0))
            throw DegenerateInput("dcca_coefficient: zero denominator at s=" + std::to_string(s) +
                                  " (constant detrended segments)");
        p.sigma_s[si] = num / den;
    }
    summarize(p);
    return p;
}

DccaMatrix dcca_matrix(const std::vector<Profile>& profiles, const ScaleGrid& scales, int order,
                       unsigned threads) {
    const std::size_t n = profiles.size();
    if (n < 2) throw std::invalid_argument("dcca_matrix: need at least 2 series");
    for (const auto& p : profiles) scales.validate(p.values.size(), order);

    DccaMatrix m;
    m.ids.reserve(n);
    for (const auto& p : profiles) m.ids.push_back(p.id);
    m.sigma.assign(n * n, std::numeric_limits<double>::quiet_NaN());
    m.delta_sigma.assign(n * n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        m.sigma[i * n + i] = 1.0;
        m.delta_sigma[i * n + i] = 0.0;
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    std::vector<std::string> notes(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        try {
            const auto prof = dcca_coefficient(profiles[i], profiles[j], scales, order);
            m.sigma[i * n + j] = m.sigma[j * n + i] = prof.sigma_mean;
            m.delta_sigma[i * n + j] = m.delta_sigma[j * n + i] = prof.sigma_sd;
        } catch (const std::exception& e) {
            notes[k] = profiles[i].id + "|" + profiles[j].id + ": " + e.what();
        }
    });
    for (auto& note : notes)
        if (!note.empty()) m.annotations.push_back(std::move(note));
    return m;
}

void write_matrix_csv(const std::vector<std::string>& ids, const std::vector<double>& values,
                      const std::string& path) {
    const std::size_t n = ids.size();
    if (values.size() != n * n)
        throw std::invalid_argument("write_matrix_csv: size mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix file: " + path);
    out << "id";
    for (const auto& id : ids) out << ',' << id;
    out << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << ids[i];
        for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(values[i * n + j]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

LabeledMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty matrix file: " + path);
    LabeledMatrix m;
    {
        std::stringstream ss(line);
        std::string field;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (!first) m.ids.push_back(field);
            first = false;
        }
    }
    const std::size_t n = m.ids.size();
    m.values.reserve(n * n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ','); // row label
        while (std::getline(ss, field, ',')) m.values.push_back(std::stod(field));
    }
    if (m.values.size() != n * n) throw IoError("matrix file is ragged: " + path);
    return m;
}

} // namespace mfx

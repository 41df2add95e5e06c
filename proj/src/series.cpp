#include "mfx/series.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {

MarketClass market_class_from_string(const std::string& s) {
    if (s == "developed" || s == "d") return MarketClass::developed;
    if (s == "emerging" || s == "e") return MarketClass::emerging;
    if (s == "frontier" || s == "f") return MarketClass::frontier;
    return MarketClass::unknown;
}

std::string to_string(MarketClass c) {
    switch (c) {
        case MarketClass::developed: return "developed";
        case MarketClass::emerging: return "emerging";
        case MarketClass::frontier: return "frontier";
        default: return "unknown";
    }
}

void Series::validate() const {
    if (values.size() < 2)
        throw std::invalid_argument("series '" + id + "': length must be >= 2");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("series '" + id + "': non-finite value");
}

StandardizedSeries standardize(const Series& s) {
    s.validate();
    const double var = sample_variance(s.values);
    if (var <= 0.0)
        throw DegenerateInput("series '" + s.id + "': zero variance (constant series)");
    const double mean = sample_mean(s.values);
    const double sd = std::sqrt(var);

    StandardizedSeries out;
    out.id = s.id;
    out.values.resize(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i)
        out.values[i] = (s.values[i] - mean) / sd;
    // remove the rounding residue so the zero-mean invariant holds tightly
    double resid = 0.0;
    for (double v : out.values) resid += v;
    resid /= static_cast<double>(out.values.size());
    for (double& v : out.values) v -= resid;
    return out;
}

Profile build_profile(const StandardizedSeries& s) {
    Profile p;
    p.id = s.id;
    p.values.resize(s.values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        acc += s.values[i];
        p.values[i] = acc;
    }
    return p;
}

Profile profile_of(const Series& s) {
    return build_profile(standardize(s));
}

const Series* Panel::find(const std::string& id) const {
    for (const auto& s : series)
        if (s.id == id) return &s;
    return nullptr;
}

void Panel::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& s : series) {
        if (!seen.insert(s.id).second)
            throw std::invalid_argument("panel: duplicate series id '" + s.id + "'");
        if (s.values.size() != calendar.size())
            throw std::invalid_argument("panel: series '" + s.id + "' length differs from calendar");
        s.validate();
    }
    for (std::size_t i = 1; i < calendar.size(); ++i)
        if (!(calendar[i - 1] < calendar[i]))
            throw std::invalid_argument("panel: calendar not strictly increasing at row " +
                                        std::to_string(i));
}

} // namespace mfx

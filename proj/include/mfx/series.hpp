#pragma once

#include <string>
#include <vector>

namespace mfx {

enum class MarketClass { developed, emerging, frontier, unknown };

MarketClass market_class_from_string(const std::string& s);
std::string to_string(MarketClass c);

/// One market index: identifier, display label, MSCI-style class and the
/// ordered observations (index levels).
struct Series {
    std::string id;
    std::string label;
    MarketClass market_class = MarketClass::unknown;
    std::vector<double> values;

    std::size_t length() const { return values.size(); }
    /// Throws std::invalid_argument if length < 2 or any value is non-finite.
    void validate() const;
};

/// Series rescaled to sample mean 0 and sample variance 1 (denominator t-1).
struct StandardizedSeries {
    std::string id;
    std::vector<double> values;
};

/// Cumulative sum of a zero-mean series; the integrated signal the
/// detrended-fluctuation machinery operates on.
struct Profile {
    std::string id;
    std::vector<double> values;

    std::size_t length() const { return values.size(); }
};

/// Throws DegenerateInput for constant series (zero variance).
StandardizedSeries standardize(const Series& s);

Profile build_profile(const StandardizedSeries& s);

/// standardize + build_profile in one step.
Profile profile_of(const Series& s);

/// Aligned collection of series sharing one calendar. After loading, every
/// member has the same length and the calendar is strictly increasing.
struct Panel {
    std::vector<std::string> calendar; // ISO-8601 dates
    std::vector<Series> series;
    std::vector<std::string> load_log; // gap-resolution actions

    std::size_t length() const { return calendar.size(); }
    const Series* find(const std::string& id) const;
    void validate() const;
};

} // namespace mfx

#include "mfx/panel_csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_missing_token(const std::string& t) {
    const std::string v = lower(t);
    return v.empty() || v == "na" || v == "nan" || v == "null";
}

std::optional<double> parse_cell(const std::string& raw, const std::string& where) {
    const std::string t = trim(raw);
    if (is_missing_token(t)) return std::nullopt;
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw IoError("malformed CSV: unparsable number '" + t + "' at " + where);
    }
    if (pos != t.size())
        throw IoError("malformed CSV: trailing characters in '" + t + "' at " + where);
    if (!std::isfinite(v))
        throw IoError("malformed CSV: non-finite value at " + where);
    return v;
}

} // namespace

Panel load_panel(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open panel file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IoError("malformed CSV: empty file " + path);
    auto header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    if (header.size() < 2)
        throw IoError("malformed CSV: header needs a date column and at least one series");
    if (lower(header[0]) != "date")
        throw IoError("malformed CSV: first column must be 'date', got '" + header[0] + "'");

    const std::size_t ncol = header.size();
    std::vector<std::string> dates;
    std::vector<std::vector<std::optional<double>>> cells; // per row, ncol-1 entries

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != ncol)
            throw IoError("malformed CSV: column count mismatch at line " +
                          std::to_string(lineno) + " (" + std::to_string(fields.size()) +
                          " vs " + std::to_string(ncol) + ")");
        const std::string date = trim(fields[0]);
        if (!dates.empty() && !(dates.back() < date))
            throw IoError("non-monotone dates at line " + std::to_string(lineno) + ": '" +
                          date + "' after '" + dates.back() + "'");
        std::vector<std::optional<double>> row(ncol - 1);
        for (std::size_t c = 1; c < ncol; ++c)
            row[c - 1] = parse_cell(fields[c], "line " + std::to_string(lineno) + ", column '" +
                                                   header[c] + "'");
        dates.push_back(date);
        cells.push_back(std::move(row));
    }
    if (cells.empty()) throw IoError("malformed CSV: no data rows in " + path);

    Panel panel;
    const std::size_t nser = ncol - 1;
    for (std::size_t c = 0; c < nser; ++c) {
        bool any = false;
        for (const auto& row : cells)
            if (row[c].has_value()) { any = true; break; }
        if (!any) throw IoError("all-missing column '" + header[c + 1] + "'");
    }

    if (options.missing == MissingPolicy::drop_row) {
        std::vector<std::string> kept_dates;
        std::vector<std::vector<std::optional<double>>> kept;
        for (std::size_t r = 0; r < cells.size(); ++r) {
            const bool complete = std::all_of(cells[r].begin(), cells[r].end(),
                                              [](const auto& v) { return v.has_value(); });
            if (complete) {
                kept_dates.push_back(dates[r]);
                kept.push_back(cells[r]);
            } else {
                panel.load_log.push_back("drop-row " + dates[r] + " (missing value)");
            }
        }
        dates = std::move(kept_dates);
        cells = std::move(kept);
    } else {
        // forward fill; rows before a column's first observation cannot be
        // filled and are dropped
        std::vector<std::optional<double>> last(nser);
        std::size_t first_complete = cells.size();
        for (std::size_t r = 0; r < cells.size(); ++r) {
            for (std::size_t c = 0; c < nser; ++c) {
                if (cells[r][c].has_value()) {
                    last[c] = cells[r][c];
                } else if (last[c].has_value()) {
                    cells[r][c] = last[c];
                    panel.load_log.push_back("ffill " + header[c + 1] + "@" + dates[r]);
                }
            }
            const bool complete = std::all_of(cells[r].begin(), cells[r].end(),
                                              [](const auto& v) { return v.has_value(); });
            if (complete && first_complete == cells.size()) first_complete = r;
        }
        if (first_complete == cells.size())
            throw IoError("no complete rows after forward fill in " + path);
        if (first_complete > 0) {
            panel.load_log.push_back("drop-leading-rows " + std::to_string(first_complete) +
                                     " (unfillable leading gaps)");
            dates.erase(dates.begin(), dates.begin() + static_cast<std::ptrdiff_t>(first_complete));
            cells.erase(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(first_complete));
        }
    }

    if (cells.size() < 2)
        throw IoError("panel has fewer than 2 usable rows after gap resolution");

    panel.calendar = dates;
    panel.series.resize(nser);
    for (std::size_t c = 0; c < nser; ++c) {
        Series& s = panel.series[c];
        s.id = header[c + 1];
        s.label = s.id;
        s.values.resize(cells.size());
        for (std::size_t r = 0; r < cells.size(); ++r) s.values[r] = *cells[r][c];
    }
    panel.validate();

    if (!options.metadata_path.empty()) apply_metadata(panel, options.metadata_path);
    return panel;
}

void apply_metadata(Panel& panel, const std::string& metadata_path) {
    std::ifstream in(metadata_path);
    if (!in) throw IoError("cannot open metadata file: " + metadata_path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty metadata file: " + metadata_path);
    auto header = split_csv_line(line);
    for (auto& h : header) h = lower(trim(h));
    if (header.size() < 3 || header[0] != "id" || header[1] != "label" || header[2] != "class")
        throw IoError("metadata header must be id,label,class");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() < 3)
            throw IoError("metadata: column count mismatch at line " + std::to_string(lineno));
        const std::string id = trim(fields[0]);
        for (auto& s : panel.series) {
            if (s.id == id) {
                s.label = trim(fields[1]);
                s.market_class = market_class_from_string(lower(trim(fields[2])));
            }
        }
    }
}

void save_panel(const Panel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write panel file: " + path);
    out << "date";
    for (const auto& s : panel.series) out << "," << s.id;
    out << "\n";
    for (std::size_t r = 0; r < panel.calendar.size(); ++r) {
        out << panel.calendar[r];
        for (const auto& s : panel.series) out << "," << format_double(s.values[r]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void log_transform(Panel& panel) {
    for (auto& s : panel.series) {
        for (double& v : s.values) {
            if (v <= 0.0)
                throw DegenerateInput("log transform: non-positive value in series '" + s.id + "'");
            v = std::log(v);
        }
    }
}

} // namespace mfx

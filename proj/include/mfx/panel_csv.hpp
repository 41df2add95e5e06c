#pragma once

#include <string>

#include "mfx/series.hpp"

namespace mfx {

enum class MissingPolicy { forward_fill, drop_row };

struct LoadOptions {
    MissingPolicy missing = MissingPolicy::forward_fill;
    /// Optional sidecar CSV (header id,label,class) mapping series ids to
    /// display labels and market classes.
    std::string metadata_path;
};

/// Reads the panel CSV schema: first column `date` (ISO-8601, strictly
/// increasing), one column per series, header row = series ids. Empty cells
/// and NA/NaN/null tokens are missing values, resolved per options.
/// Throws IoError on malformed input (ragged rows, non-monotone dates,
/// all-missing columns, unparsable numbers).
Panel load_panel(const std::string& path, const LoadOptions& options = {});

void save_panel(const Panel& panel, const std::string& path);

/// Applies the sidecar metadata file to an already-loaded panel.
void apply_metadata(Panel& panel, const std::string& metadata_path);

/// Replaces values with their natural logs. Throws DegenerateInput if any
/// value is <= 0.
void log_transform(Panel& panel);

} // namespace mfx

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfx/fluctuation.hpp"
#include "mfx/panel_csv.hpp"

namespace mfx {

/// Batch-run parameters shared by the analyze/mi/report subcommands.
struct RunConfig {
    std::string input_path;
    std::string out_dir;
    std::string metadata_path;
    std::string scale_spec; // "" = default grid | "lo:hi:count" | "s1,s2,..."
    std::string q_spec;     // "" = default grid | "q1,q2,..."
    int order = 1;
    int bins = 0; // 0 = default_bins(panel length)
    int surrogates = 99;
    double significance = 0.05;
    std::uint64_t seed = 42;
    MissingPolicy missing = MissingPolicy::forward_fill;
    bool log_transform = false;
    /// Pair selection: nullopt = all pairs; a (possibly empty) list limits
    /// the run to the named pairs.
    std::optional<std::vector<std::pair<std::string, std::string>>> pair_filter;
    std::optional<std::pair<int, int>> fit_window;
    double crossover_threshold = 0.30;
    bool emit_per_scale = false; // per-pair per-scale DCCA CSV
    unsigned threads = 0;
};

struct RunFailure {
    std::string item;  // "series:ID" or "pair:A|B"
    std::string stage;
    std::string message;
};

struct RunResult {
    int exit_code = 0; // 0 ok, 1 partial failures
    std::vector<RunFailure> failures;
    std::vector<std::string> files_written;
};

ScaleGrid resolve_scales(const std::string& spec, std::size_t series_length);
QGrid resolve_q(const std::string& spec);

/// Per-series MF-DFA: fluctuation surfaces, fits, spectra, derived
/// exponents and crossover reports. Failing series are isolated.
RunResult run_single(const RunConfig& config);

/// All-pairs MF-DXA, sigma_DCCA and MI/GCC matrices plus mixed-pair
/// deviation profiles. Failing pairs are isolated.
RunResult run_pairs(const RunConfig& config);

/// run_single + run_pairs over one loaded panel (the `analyze` subcommand).
RunResult run_analyze(const RunConfig& config);

/// MI/GCC reports only.
RunResult run_mi(const RunConfig& config);

/// MI/GCC plus descriptive statistics grouped by market-class pair.
RunResult run_report(const RunConfig& config);

/// `generate` subcommand: writes a synthetic panel in the panel CSV schema.
struct GenerateConfig {
    std::string kind = "fgn"; // fgn|fbm|cascade|pair|sinusoid
    int count = 1;            // series count (pair kind emits 2 per unit)
    std::size_t length = 4096;
    std::uint64_t seed = 42;
    std::vector<double> hurst = {0.5}; // cycled across series
    double multiplier = 0.75;
    int depth = 12;
    double rho = 0.5;
    double amplitude = 1.0;
    double period = 64.0;
    std::string out_path;
};

/// Non-power-of-two lengths are produced by generating at the next power of
/// two and truncating (valid for the stationary kinds; the cascade requires
/// length == 2^depth).
Panel build_synthetic_panel(const GenerateConfig& config);
void run_generate(const GenerateConfig& config);

} // namespace mfx

#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "qkdsim/experiment.hpp"

namespace qkdsim {

/// Header `series_label,tick,time_seconds,value`, rows sorted by (label, tick),
/// numbers with 17 significant digits, LF line endings.
void write_csv(std::ostream& os, std::span<const TimeSeries> series);

/// Throws std::runtime_error carrying the path when the file cannot be written.
void emit_csv(std::span<const TimeSeries> series, const std::filesystem::path& path);

/// One key-value line per summary.
void emit_summary(std::span<const SeriesSummary> summaries, const std::filesystem::path& path);

/// Writes `text` verbatim, throwing std::runtime_error with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qkdsim

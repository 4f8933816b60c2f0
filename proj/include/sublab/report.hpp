#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublab/adaptive.hpp"
#include "sublab/harness.hpp"

namespace sublab {

/// Writes content to path through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string errors_by_design_csv(const ErrorReport& report);
std::string errors_by_unit_csv(const ErrorReport& report);
std::string curves_csv(const ErrorReport& report);
std::string scalogram_csv(const std::vector<ScalogramRow>& rows);
std::string optimization_csv(const OptimizationReport& report);

/// Line chart, one polyline per n_or_k series of one (metric, legend, design) family.
std::string curves_svg(const std::vector<const CurveResult*>& family);

/// errors_by_design.csv, errors_by_unit.csv, curves.csv, scalogram.csv and one SVG per
/// curve family. Returns the written paths.
std::vector<std::filesystem::path> write_report(const ErrorReport& report, const std::filesystem::path& directory);

std::filesystem::path write_optimization_report(const OptimizationReport& report,
                                                const std::filesystem::path& directory);

/// Re-read the CSV files written by write_report. Smoothed curve values are not stored in CSV.
ErrorReport read_report(const std::filesystem::path& directory);

}  // namespace sublab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sublab/execution.hpp"
#include "sublab/legend.hpp"
#include "sublab/metrics.hpp"
#include "sublab/raster.hpp"
#include "sublab/response_design.hpp"

namespace sublab {

struct ExperimentConfig {
    int unit_side = 180;
    std::vector<Legend> legends;
    std::vector<ResponseDesign> designs;
    int realizations = 36;  ///< point-design repetitions per unit
    std::vector<int> shifts = kDefaultShifts;
    std::uint64_t master_seed = 0;
    double bin_step = 0.05;
    double span = 0.3;  ///< smoother span used for the SVG curves
    std::vector<int> scalogram_sides;

    /// Throws std::invalid_argument naming the offending field.
    void validate(const CategoricalRaster& raster) const;
};

struct UnitError {
    int unit_row = 0;
    int unit_col = 0;
    double pi = 0.0;   ///< target purity (binary) or majority-class purity (majority)
    double erp = 0.0;
    double error_rate = 0.0;

    bool operator==(const UnitError&) const = default;
};

struct DesignResult {
    std::string legend;
    std::string design;    ///< "points" or "partition"
    std::string protocol;  ///< empty for points
    int n_or_k = 0;
    double overall_error = 0.0;
    double stderr_error = 0.0;  ///< standard error over realizations
    std::vector<UnitError> units;

    /// "points" or "partition/<protocol>", used where no protocol column exists.
    std::string series_design() const { return protocol.empty() ? design : design + "/" + protocol; }
};

struct CurveResult {
    std::string metric;  ///< "pi" or "erp"
    std::string legend;
    std::string design;  ///< series_design()
    int n_or_k = 0;
    BinnedCurve curve;
    std::vector<double> smoothed;  ///< smoother output at the bin centres (NaN outside the data range)
};

struct ScalogramRow {
    int unit_side = 0;
    double frac_purity_gt_090 = 0.0;
    double frac_purity_lt_050 = 0.0;

    bool operator==(const ScalogramRow&) const = default;
};

struct ErrorReport {
    std::vector<DesignResult> designs;
    std::vector<CurveResult> curves;
    std::vector<ScalogramRow> scalogram;
};

/// Point designs of the config, R independent draws per unit at offset 0.
ErrorReport run_point_experiment(const CategoricalRaster& raster, const ExperimentConfig& config,
                                 Execution exec = Execution::Parallel);

/// Partition designs of the config over every shifted unit set; realizations weigh equally.
ErrorReport run_partition_experiment(const CategoricalRaster& raster, const ExperimentConfig& config,
                                     Execution exec = Execution::Parallel);

/// Point and partition experiments plus the scalogram for config.scalogram_sides.
ErrorReport run_experiment(const CategoricalRaster& raster, const ExperimentConfig& config,
                           Execution exec = Execution::Parallel);

/// Fractions of offset-0 units whose majority-class purity is > 0.9 and < 0.5, per unit side.
std::vector<ScalogramRow> purity_scalogram(const CategoricalRaster& raster, const std::vector<int>& unit_sides,
                                           Execution exec = Execution::Parallel);

/// Binned curves (pi for binary legends, erp for majority) for each design result.
std::vector<CurveResult> build_curves(const std::vector<DesignResult>& designs, const std::vector<Legend>& legends,
                                      double bin_step, double span);

namespace reference {

/// Straight nested loops through simulate_label; kept to check the parallel kernels.
ErrorReport run_point_experiment(const CategoricalRaster& raster, const ExperimentConfig& config);
ErrorReport run_partition_experiment(const CategoricalRaster& raster, const ExperimentConfig& config);
std::vector<ScalogramRow> purity_scalogram(const CategoricalRaster& raster, const std::vector<int>& unit_sides);

}  // namespace reference

}  // namespace sublab

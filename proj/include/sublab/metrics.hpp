#pragma once

#include <span>
#include <vector>

#include "sublab/legend.hpp"
#include "sublab/raster.hpp"

namespace sublab {

/// Fraction of positions where the two label lists disagree (label values only).
double error_rate(std::span<const Label> truth, std::span<const Label> simulated);

/// Summed share of the target classes.
double purity(const ProportionVector& proportions, std::span<const int> target_classes);

/// Equivalent Reference Probability: 1/k for equal proportions, 1 for a pure vector.
double erp(const ProportionVector& proportions);

struct BinnedCurve {
    double step = 0.05;
    std::vector<double> bin_centers;
    std::vector<double> mean_error;  ///< NaN where count == 0
    std::vector<std::size_t> counts;
};

/// Number of [i*step, (i+1)*step) bins needed to cover [0, 1].
std::size_t bin_count(double step);
/// Bin of a metric value; the last bin is closed at 1. Values within 1e-9 bin widths below an
/// edge count as on it, so decimal ratios such as 0.15 land in the bin they name.
std::size_t bin_index(double value, double step);

BinnedCurve bin_errors(std::span<const double> metric_values, std::span<const double> per_unit_errors,
                       double step = 0.05);

/// Tricube-weighted local linear fit at each query point from the ceil(span * n) nearest
/// samples. One pass, no robustness iterations.
std::vector<double> local_regression_smooth(std::span<const double> x, std::span<const double> y,
                                            std::span<const double> query, double span = 0.3);

}  // namespace sublab

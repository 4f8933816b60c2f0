#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sublab/execution.hpp"
#include "sublab/legend.hpp"
#include "sublab/metrics.hpp"
#include "sublab/raster.hpp"
#include "sublab/stats.hpp"

namespace sublab {

struct AdaptiveConfig {
    double alpha = 0.001;
    int n_init = 9;
    int n_max = 144;
    int increment = 1;  ///< points added per Continue
    Legend legend = Legend::binary({1}, 0.5);

    void validate() const;
};

enum class StopStatus { Continue, StopConfident, StopCapped };

std::string status_name(StopStatus s);

struct StopDecision {
    StopStatus status = StopStatus::Continue;
    Label label;  ///< meaningful only when stopped
    /// Binary: the single Clopper-Pearson interval. Majority: one Goodman interval per class.
    std::vector<ConfidenceInterval> intervals;
};

/// Stop when the Clopper-Pearson interval of m/n excludes t (strictly).
StopDecision check_binary(std::int64_t m, std::int64_t n, double threshold, double alpha);

/// Stop when the Goodman lower bound of the majority class exceeds the point estimate of the
/// second most frequent class. Tied leading counts always continue.
StopDecision check_majority(std::span<const std::int64_t> counts, double alpha);

/// The stopping rule for one configuration and population size. Caches the Clopper-Pearson
/// table (binary) or the Goodman constant (majority); shared by simulation and live sessions.
class StopRule {
public:
    StopRule(AdaptiveConfig config, int class_count, std::size_t population, bool precompute = true);

    const AdaptiveConfig& config() const { return config_; }
    int class_count() const { return class_count_; }
    /// min(n_max, population)
    int cap() const { return cap_; }
    /// min(n_init, cap)
    int initial() const { return std::min(config_.n_init, cap_); }

    /// Decision on the current tallies; Continue turns into StopCapped at the cap.
    StopDecision step(std::span<const std::int64_t> tallies) const;

private:
    ConfidenceInterval binary_interval(std::int64_t m, std::int64_t n) const;

    AdaptiveConfig config_;
    int class_count_;
    int cap_;
    double goodman_b_ = 0.0;
    std::vector<ConfidenceInterval> cp_table_;  // index n*(n+1)/2 + m
};

struct TraceEntry {
    int n = 0;
    std::vector<std::int64_t> tallies;
    StopDecision decision;
};

struct AdaptiveResult {
    Label label;
    int n_used = 0;
    StopStatus status = StopStatus::Continue;
    std::vector<TraceEntry> trace;
};

AdaptiveResult adaptive_label(const SamplingUnit& unit, const StopRule& rule, std::uint64_t seed,
                              bool keep_trace = true);
AdaptiveResult adaptive_label(const SamplingUnit& unit, const AdaptiveConfig& config, std::uint64_t seed);

struct OptimizationRow {
    int unit_row = 0;
    int unit_col = 0;
    double metric = 0.0;  ///< purity for binary legends, ERP for majority
    double mean_n = 0.0;
    double error_rate = 0.0;
    double cap_hit_fraction = 0.0;
    int confident_stops = 0;
    int confident_errors = 0;
};

struct OptimizationReport {
    std::string legend;
    std::string metric_name;  ///< "pi" or "erp"
    double alpha = 0.0;
    int repetitions = 0;
    std::vector<OptimizationRow> rows;
    double mean_n = 0.0;
    double error_rate = 0.0;
    double cap_hit_fraction = 0.0;
    long confident_stops = 0;
    long confident_errors = 0;
    BinnedCurve effort_curve;  ///< mean_n per metric bin (stored in mean_error)

    double confident_error_rate() const {
        return confident_stops ? static_cast<double>(confident_errors) / static_cast<double>(confident_stops) : 0.0;
    }
};

struct OptimizationSpec {
    AdaptiveConfig config;
    int unit_side = 180;
    int repetitions = 25;
    std::uint64_t master_seed = 0;
    double bin_step = 0.05;
};

/// Run adaptive_label R times on every unit at offset 0. Seeds derive from
/// (master_seed, unit index, repetition), so results do not depend on scheduling.
OptimizationReport optimization_experiment(const CategoricalRaster& raster, const OptimizationSpec& spec,
                                           Execution exec = Execution::Parallel);

/// Metric used to bin a unit for a legend: purity for binary, ERP for majority.
double legend_metric(const ProportionVector& p, const Legend& legend);

}  // namespace sublab

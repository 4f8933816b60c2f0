#include "sublab/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sublab/response_design.hpp"
#include "sublab/rng.hpp"

namespace sublab {

void AdaptiveConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (n_init < 1 || n_init > n_max) {
        throw std::invalid_argument("need 1 <= n_init <= n_max");
    }
    if (increment < 1) {
        throw std::invalid_argument("increment must be >= 1");
    }
}

std::string status_name(StopStatus s) {
    switch (s) {
        case StopStatus::Continue:
            return "continue";
        case StopStatus::StopConfident:
            return "confident";
        case StopStatus::StopCapped:
            return "capped";
    }
    return "?";
}

namespace {

StopDecision binary_decision(const ConfidenceInterval& ci, double threshold) {
    StopDecision d;
    d.intervals = {ci};
    if (ci.lower > threshold) {
        d.status = StopStatus::StopConfident;
        d.label = {1, false};
    } else if (ci.upper < threshold) {
        d.status = StopStatus::StopConfident;
        d.label = {0, false};
    }
    return d;
}

StopDecision majority_decision(std::span<const std::int64_t> counts, double b, double alpha) {
    if (counts.size() < 2) {
        throw std::invalid_argument("majority check needs k >= 2 classes");
    }
    const std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (n < 1) {
        throw std::invalid_argument("majority check needs n >= 1");
    }
    StopDecision d;
    d.intervals.reserve(counts.size());
    for (std::int64_t c : counts) d.intervals.push_back(goodman_interval(c, n, b, alpha));

    std::size_t top = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] > counts[top]) top = i;
    }
    std::size_t second = top == 0 ? 1 : 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i != top && counts[i] > counts[second]) second = i;
    }
    if (counts[second] == counts[top]) {
        return d;
    }
    const double second_estimate = static_cast<double>(counts[second]) / static_cast<double>(n);
    if (d.intervals[top].lower > second_estimate) {
        d.status = StopStatus::StopConfident;
        d.label = {static_cast<int>(top), false};
    }
    return d;
}

void check_threshold(double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw std::invalid_argument("threshold must lie in (0, 1)");
    }
}

}  // namespace

StopDecision check_binary(std::int64_t m, std::int64_t n, double threshold, double alpha) {
    check_threshold(threshold);
    return binary_decision(clopper_pearson(m, n, alpha), threshold);
}

StopDecision check_majority(std::span<const std::int64_t> counts, double alpha) {
    return majority_decision(counts, goodman_b(counts.size(), alpha), alpha);
}

StopRule::StopRule(AdaptiveConfig config, int class_count, std::size_t population, bool precompute)
    : config_(std::move(config)), class_count_(class_count) {
    config_.validate();
    if (population == 0) {
        throw std::invalid_argument("stop rule over an empty unit");
    }
    config_.legend.check_classes(class_count);
    cap_ = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(config_.n_max), population));
    if (config_.legend.is_majority()) {
        goodman_b_ = goodman_b(static_cast<std::size_t>(class_count), config_.alpha);
    } else if (precompute) {
        cp_table_.reserve(static_cast<std::size_t>(cap_ + 1) * (cap_ + 2) / 2);
        for (int n = 0; n <= cap_; ++n) {
            for (int m = 0; m <= n; ++m) {
                cp_table_.push_back(n == 0 ? ConfidenceInterval{0.0, 1.0, 1.0 - config_.alpha}
                                           : clopper_pearson(m, n, config_.alpha));
            }
        }
    }
}

ConfidenceInterval StopRule::binary_interval(std::int64_t m, std::int64_t n) const {
    if (!cp_table_.empty() && n <= cap_) {
        return cp_table_[static_cast<std::size_t>(n * (n + 1) / 2 + m)];
    }
    return clopper_pearson(m, n, config_.alpha);
}

StopDecision StopRule::step(std::span<const std::int64_t> tallies) const {
    if (tallies.size() != static_cast<std::size_t>(class_count_)) {
        throw std::invalid_argument("tally length does not match class count");
    }
    const std::int64_t n = std::accumulate(tallies.begin(), tallies.end(), std::int64_t{0});
    StopDecision d;
    if (config_.legend.is_binary()) {
        const auto& rule = config_.legend.binary_rule();
        std::int64_t m = 0;
        for (int c : rule.target_classes) m += tallies[static_cast<std::size_t>(c)];
        d = binary_decision(binary_interval(m, n), rule.threshold);
    } else {
        d = majority_decision(tallies, goodman_b_, config_.alpha);
    }
    if (d.status == StopStatus::Continue && n >= cap_) {
        d.status = StopStatus::StopCapped;
        d.label = decide(ProportionVector::from_counts(tallies), config_.legend);
    }
    return d;
}

AdaptiveResult adaptive_label(const SamplingUnit& unit, const StopRule& rule, std::uint64_t seed, bool keep_trace) {
    PointStream stream(unit.cell_count(), seed);
    std::vector<std::int64_t> tallies(static_cast<std::size_t>(rule.class_count()), 0);
    int n = 0;
    auto draw = [&](int count) {
        for (int i = 0; i < count; ++i) {
            ++tallies[unit.class_at(stream.next())];
            ++n;
        }
    };
    draw(rule.initial());
    AdaptiveResult result;
    for (;;) {
        StopDecision d = rule.step(tallies);
        const StopStatus status = d.status;
        const Label label = d.label;
        if (keep_trace) {
            result.trace.push_back({n, tallies, std::move(d)});
        }
        if (status != StopStatus::Continue) {
            result.label = label;
            result.n_used = n;
            result.status = status;
            return result;
        }
        draw(std::min(rule.config().increment, rule.cap() - n));
    }
}

AdaptiveResult adaptive_label(const SamplingUnit& unit, const AdaptiveConfig& config, std::uint64_t seed) {
    const StopRule rule(config, unit.parent().class_count(), unit.cell_count(), false);
    return adaptive_label(unit, rule, seed);
}

double legend_metric(const ProportionVector& p, const Legend& legend) {
    if (legend.is_binary()) return purity(p, legend.binary_rule().target_classes);
    return p.size() >= 2 ? erp(p) : 1.0;
}

OptimizationReport optimization_experiment(const CategoricalRaster& raster, const OptimizationSpec& spec,
                                           Execution exec) {
    spec.config.validate();
    if (spec.repetitions < 1) {
        throw std::invalid_argument("repetitions must be >= 1");
    }
    const auto units = extract_units(raster, spec.unit_side, 0, 0);
    const StopRule rule(spec.config, raster.class_count(), static_cast<std::size_t>(spec.unit_side) * spec.unit_side);

    struct Outcome {
        int n_used;
        bool wrong;
        bool capped;
    };
    const std::size_t reps = static_cast<std::size_t>(spec.repetitions);
    const std::size_t total = units.size() * reps;
    std::vector<Outcome> outcomes(total);
    std::vector<Label> truth(units.size());
    std::vector<double> metric(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        const auto p = true_proportions(units[u]);
        truth[u] = decide(p, spec.config.legend);
        metric[u] = legend_metric(p, spec.config.legend);
    }

#pragma omp parallel for schedule(dynamic, 16) if (exec == Execution::Parallel)
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t u = i / reps;
        const std::size_t r = i % reps;
        const auto res = adaptive_label(units[u], rule, derive_seed(spec.master_seed, {u, r}), false);
        outcomes[i] = {res.n_used, res.label.value != truth[u].value, res.status == StopStatus::StopCapped};
    }

    OptimizationReport report;
    report.legend = spec.config.legend.name();
    report.metric_name = spec.config.legend.is_binary() ? "pi" : "erp";
    report.alpha = spec.config.alpha;
    report.repetitions = spec.repetitions;
    report.rows.reserve(units.size());
    double sum_n = 0.0;
    long wrong = 0;
    long capped = 0;
    std::vector<double> unit_mean_n(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        OptimizationRow row;
        row.unit_row = units[u].origin_row();
        row.unit_col = units[u].origin_col();
        row.metric = metric[u];
        long n_sum = 0;
        int w = 0;
        int c = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& o = outcomes[u * reps + r];
            n_sum += o.n_used;
            w += o.wrong;
            c += o.capped;
            if (!o.capped) {
                ++row.confident_stops;
                row.confident_errors += o.wrong;
            }
        }
        row.mean_n = static_cast<double>(n_sum) / static_cast<double>(reps);
        row.error_rate = static_cast<double>(w) / static_cast<double>(reps);
        row.cap_hit_fraction = static_cast<double>(c) / static_cast<double>(reps);
        sum_n += static_cast<double>(n_sum);
        wrong += w;
        capped += c;
        report.confident_stops += row.confident_stops;
        report.confident_errors += row.confident_errors;
        unit_mean_n[u] = row.mean_n;
        report.rows.push_back(row);
    }
    if (total > 0) {
        report.mean_n = sum_n / static_cast<double>(total);
        report.error_rate = static_cast<double>(wrong) / static_cast<double>(total);
        report.cap_hit_fraction = static_cast<double>(capped) / static_cast<double>(total);
    }
    report.effort_curve = bin_errors(metric, unit_mean_n, spec.bin_step);
    return report;
}

}  // namespace sublab

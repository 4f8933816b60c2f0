// Serial reference versions of the harness kernels. They go through the public
// per-unit operations one call at a time and share no intermediate state.

#include <algorithm>
#include <cmath>

#include "sublab/harness.hpp"
#include "sublab/rng.hpp"

namespace sublab::reference {
namespace {

double unit_purity(const ProportionVector& p, const Legend& legend) {
    if (legend.is_binary()) return purity(p, legend.binary_rule().target_classes);
    return *std::max_element(p.values().begin(), p.values().end());
}

void summarize(const std::vector<double>& per_realization, DesignResult& out) {
    const double r = static_cast<double>(per_realization.size());
    double mean = 0.0;
    for (double e : per_realization) mean += e;
    mean /= r;
    double ss = 0.0;
    for (double e : per_realization) ss += (e - mean) * (e - mean);
    out.overall_error = mean;
    out.stderr_error = per_realization.size() > 1 ? std::sqrt(ss / (r - 1.0)) / std::sqrt(r) : 0.0;
}

DesignResult make_result(const Legend& legend, const ResponseDesign& design) {
    DesignResult r;
    r.legend = legend.name();
    r.design = design_kind(design);
    if (auto* p = std::get_if<PartitionBased>(&design)) r.protocol = protocol_name(p->protocol);
    r.n_or_k = design_size(design);
    return r;
}

}  // namespace

ErrorReport run_point_experiment(const CategoricalRaster& raster, const ExperimentConfig& config) {
    config.validate(raster);
    const auto units = extract_units(raster, config.unit_side, 0, 0);
    ErrorReport report;
    for (const Legend& legend : config.legends) {
        for (std::size_t d = 0; d < config.designs.size(); ++d) {
            if (!std::holds_alternative<PointBased>(config.designs[d])) continue;
            DesignResult res = make_result(legend, config.designs[d]);
            std::vector<double> per_real(static_cast<std::size_t>(config.realizations), 0.0);
            for (std::size_t u = 0; u < units.size(); ++u) {
                const auto p = true_proportions(units[u]);
                const Label truth = decide(p, legend);
                int errs = 0;
                for (int r = 0; r < config.realizations; ++r) {
                    const auto seed = derive_seed(config.master_seed, {u, static_cast<std::uint64_t>(r), d});
                    const bool w = simulate_label(units[u], config.designs[d], legend, seed).value != truth.value;
                    errs += w;
                    per_real[static_cast<std::size_t>(r)] += w;
                }
                res.units.push_back({units[u].origin_row(), units[u].origin_col(), unit_purity(p, legend),
                                     p.size() >= 2 ? erp(p) : 1.0,
                                     static_cast<double>(errs) / static_cast<double>(config.realizations)});
            }
            if (!units.empty()) {
                for (double& e : per_real) e /= static_cast<double>(units.size());
                summarize(per_real, res);
            }
            report.designs.push_back(std::move(res));
        }
    }
    report.curves = build_curves(report.designs, config.legends, config.bin_step, config.span);
    return report;
}

ErrorReport run_partition_experiment(const CategoricalRaster& raster, const ExperimentConfig& config) {
    config.validate(raster);
    ErrorReport report;
    const bool any = std::any_of(config.designs.begin(), config.designs.end(),
                                 [](const ResponseDesign& d) { return std::holds_alternative<PartitionBased>(d); });
    if (!any) return report;
    const auto sets = shifted_unit_sets(raster, config.unit_side, config.shifts);
    for (const Legend& legend : config.legends) {
        for (const auto& design : config.designs) {
            if (!std::holds_alternative<PartitionBased>(design) || !design_fits_legend(design, legend)) continue;
            DesignResult res = make_result(legend, design);
            std::vector<double> per_real;
            for (const auto& set : sets) {
                double errs = 0.0;
                for (const auto& unit : set) {
                    const auto p = true_proportions(unit);
                    const double w = simulate_label(unit, design, legend, 0).value != decide(p, legend).value;
                    errs += w;
                    res.units.push_back({unit.origin_row(), unit.origin_col(), unit_purity(p, legend),
                                         p.size() >= 2 ? erp(p) : 1.0, w});
                }
                per_real.push_back(errs / static_cast<double>(set.size()));
            }
            summarize(per_real, res);
            report.designs.push_back(std::move(res));
        }
    }
    report.curves = build_curves(report.designs, config.legends, config.bin_step, config.span);
    return report;
}

std::vector<ScalogramRow> purity_scalogram(const CategoricalRaster& raster, const std::vector<int>& unit_sides) {
    std::vector<ScalogramRow> rows;
    for (int side : unit_sides) {
        const auto units = extract_units(raster, side, 0, 0);
        long above = 0;
        long below = 0;
        for (const auto& unit : units) {
            const auto p = true_proportions(unit);
            const double top = *std::max_element(p.values().begin(), p.values().end());
            above += top > 0.9;
            below += top < 0.5;
        }
        const double n = static_cast<double>(units.size());
        rows.push_back({side, static_cast<double>(above) / n, static_cast<double>(below) / n});
    }
    return rows;
}

}  // namespace sublab::reference

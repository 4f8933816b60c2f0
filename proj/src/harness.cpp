#include "sublab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sublab/rng.hpp"

namespace sublab {

void ExperimentConfig::validate(const CategoricalRaster& raster) const {
    auto fail = [](const std::string& field, const std::string& msg) {
        throw std::invalid_argument(field + ": " + msg);
    };
    if (unit_side < 2) fail("unit_side", "must be >= 2");
    if (unit_side > raster.width() || unit_side > raster.height()) {
        fail("unit_side", std::to_string(unit_side) + " larger than raster " + std::to_string(raster.width()) + "x" +
                              std::to_string(raster.height()));
    }
    if (realizations < 1) fail("realizations", "must be >= 1");
    if (!(bin_step > 0.0 && bin_step < 1.0)) fail("bin_step", "must lie in (0, 1)");
    if (!(span > 0.0 && span <= 1.0)) fail("span", "must lie in (0, 1]");
    for (std::size_t i = 0; i < legends.size(); ++i) {
        try {
            legends[i].check_classes(raster.class_count());
            if (legends[i].is_majority() && raster.class_count() < 2) {
                throw std::invalid_argument("majority legend needs at least 2 classes");
            }
        } catch (const std::invalid_argument& e) {
            fail("legends[" + std::to_string(i) + "]", e.what());
        }
    }
    for (std::size_t i = 0; i < designs.size(); ++i) {
        try {
            check_design(designs[i], unit_side);
        } catch (const std::invalid_argument& e) {
            fail("designs[" + std::to_string(i) + "]", e.what());
        }
    }
    bool any_partition = std::any_of(designs.begin(), designs.end(),
                                     [](const ResponseDesign& d) { return std::holds_alternative<PartitionBased>(d); });
    if (any_partition) {
        if (shifts.empty()) fail("shifts", "must not be empty");
        for (std::size_t i = 0; i < shifts.size(); ++i) {
            if (shifts[i] < 0) fail("shifts[" + std::to_string(i) + "]", "must be >= 0");
            if (shifts[i] + unit_side > raster.width() || shifts[i] + unit_side > raster.height()) {
                fail("shifts[" + std::to_string(i) + "]",
                     "shift " + std::to_string(shifts[i]) + " leaves no complete unit of side " +
                         std::to_string(unit_side));
            }
        }
    }
    for (std::size_t i = 0; i < scalogram_sides.size(); ++i) {
        const int s = scalogram_sides[i];
        if (s < 2 || s > raster.width() || s > raster.height()) {
            fail("scalogram_sides[" + std::to_string(i) + "]", "side " + std::to_string(s) + " outside [2, extent]");
        }
    }
}

namespace {

double unit_purity(const ProportionVector& p, const Legend& legend) {
    if (legend.is_binary()) return purity(p, legend.binary_rule().target_classes);
    return *std::max_element(p.values().begin(), p.values().end());
}

double unit_erp(const ProportionVector& p) { return p.size() >= 2 ? erp(p) : 1.0; }

/// Mean and standard error of per-realization error rates.
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

std::vector<std::size_t> designs_of_kind(const ExperimentConfig& config, bool points) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < config.designs.size(); ++i) {
        if (std::holds_alternative<PointBased>(config.designs[i]) == points) idx.push_back(i);
    }
    return idx;
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

std::vector<CurveResult> build_curves(const std::vector<DesignResult>& designs, const std::vector<Legend>& legends,
                                      double bin_step, double span) {
    std::vector<CurveResult> curves;
    for (const auto& d : designs) {
        auto legend_it = std::find_if(legends.begin(), legends.end(),
                                      [&](const Legend& l) { return l.name() == d.legend; });
        const bool binary = legend_it != legends.end() ? legend_it->is_binary() : d.legend != "majority";
        std::vector<double> metric(d.units.size());
        std::vector<double> errors(d.units.size());
        for (std::size_t i = 0; i < d.units.size(); ++i) {
            metric[i] = binary ? d.units[i].pi : d.units[i].erp;
            errors[i] = d.units[i].error_rate;
        }
        CurveResult c;
        c.metric = binary ? "pi" : "erp";
        c.legend = d.legend;
        c.design = d.series_design();
        c.n_or_k = d.n_or_k;
        c.curve = bin_errors(metric, errors, bin_step);
        c.smoothed.assign(c.curve.bin_centers.size(), std::numeric_limits<double>::quiet_NaN());
        if (metric.size() >= 5) {
            const auto [lo, hi] = std::minmax_element(metric.begin(), metric.end());
            if (*hi > *lo) {
                const auto fit = local_regression_smooth(metric, errors, c.curve.bin_centers, span);
                for (std::size_t b = 0; b < fit.size(); ++b) {
                    const double x = c.curve.bin_centers[b];
                    if (x >= *lo - 0.5 * bin_step && x <= *hi + 0.5 * bin_step) {
                        c.smoothed[b] = std::clamp(fit[b], 0.0, 1.0);
                    }
                }
            }
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

ErrorReport run_point_experiment(const CategoricalRaster& raster, const ExperimentConfig& config, Execution exec) {
    config.validate(raster);
    const auto units = extract_units(raster, config.unit_side, 0, 0);
    const auto design_idx = designs_of_kind(config, true);
    const std::size_t n_units = units.size();
    const std::size_t n_real = static_cast<std::size_t>(config.realizations);
    const std::size_t n_leg = config.legends.size();
    const std::size_t n_des = design_idx.size();
    const int classes = raster.class_count();

    std::vector<ProportionVector> props;
    props.reserve(n_units);
    for (const auto& u : units) props.push_back(true_proportions(u));
    std::vector<Label> truth(n_leg * n_units);
    for (std::size_t l = 0; l < n_leg; ++l) {
        for (std::size_t u = 0; u < n_units; ++u) truth[l * n_units + u] = decide(props[u], config.legends[l]);
    }

    // wrong[((d * n_leg + l) * n_units + u) * n_real + r]
    std::vector<std::uint8_t> wrong(n_des * n_leg * n_units * n_real, 0);
    const std::size_t items = n_des * n_units * n_real;

#pragma omp parallel for schedule(dynamic, 64) if (exec == Execution::Parallel)
    for (std::size_t i = 0; i < items; ++i) {
        const std::size_t d = i / (n_units * n_real);
        const std::size_t u = (i / n_real) % n_units;
        const std::size_t r = i % n_real;
        const auto& design = std::get<PointBased>(config.designs[design_idx[d]]);
        const auto seed = derive_seed(config.master_seed, {u, r, design_idx[d]});
        PointStream stream(units[u].cell_count(), seed);
        std::vector<std::int64_t> counts(static_cast<std::size_t>(classes), 0);
        for (int k = 0; k < design.n_points; ++k) ++counts[units[u].class_at(stream.next())];
        const auto estimate = ProportionVector::from_counts(counts);
        for (std::size_t l = 0; l < n_leg; ++l) {
            const Label label = decide(estimate, config.legends[l]);
            wrong[((d * n_leg + l) * n_units + u) * n_real + r] = label.value != truth[l * n_units + u].value;
        }
    }

    ErrorReport report;
    for (std::size_t l = 0; l < n_leg; ++l) {
        for (std::size_t d = 0; d < n_des; ++d) {
            DesignResult res = make_result(config.legends[l], config.designs[design_idx[d]]);
            std::vector<double> per_real(n_real, 0.0);
            res.units.reserve(n_units);
            for (std::size_t u = 0; u < n_units; ++u) {
                const std::uint8_t* w = &wrong[((d * n_leg + l) * n_units + u) * n_real];
                std::size_t errs = 0;
                for (std::size_t r = 0; r < n_real; ++r) {
                    errs += w[r];
                    per_real[r] += w[r];
                }
                res.units.push_back({units[u].origin_row(), units[u].origin_col(),
                                     unit_purity(props[u], config.legends[l]), unit_erp(props[u]),
                                     static_cast<double>(errs) / static_cast<double>(n_real)});
            }
            if (n_units > 0) {
                for (double& e : per_real) e /= static_cast<double>(n_units);
                summarize(per_real, res);
            }
            report.designs.push_back(std::move(res));
        }
    }
    report.curves = build_curves(report.designs, config.legends, config.bin_step, config.span);
    return report;
}

ErrorReport run_partition_experiment(const CategoricalRaster& raster, const ExperimentConfig& config, Execution exec) {
    config.validate(raster);
    const auto design_idx = designs_of_kind(config, false);
    ErrorReport report;
    if (design_idx.empty()) return report;

    const auto sets = shifted_unit_sets(raster, config.unit_side, config.shifts);
    struct Item {
        std::size_t set;
        std::size_t unit;
    };
    std::vector<Item> items;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (std::size_t u = 0; u < sets[s].size(); ++u) items.push_back({s, u});
    }

    // Applicable (legend, design) pairs in report order.
    struct Pair {
        std::size_t legend;
        std::size_t design;
    };
    std::vector<Pair> pairs;
    for (std::size_t l = 0; l < config.legends.size(); ++l) {
        for (std::size_t d : design_idx) {
            if (design_fits_legend(config.designs[d], config.legends[l])) pairs.push_back({l, d});
        }
    }
    std::vector<int> ks;
    for (std::size_t d : design_idx) ks.push_back(std::get<PartitionBased>(config.designs[d]).k_per_side);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    const std::size_t n_items = items.size();
    std::vector<std::uint8_t> wrong(pairs.size() * n_items, 0);
    std::vector<double> pi(config.legends.size() * n_items);
    std::vector<double> eps(n_items);

#pragma omp parallel for schedule(dynamic, 4) if (exec == Execution::Parallel)
    for (std::size_t i = 0; i < n_items; ++i) {
        const SamplingUnit& unit = sets[items[i].set][items[i].unit];
        const PartitionCounter counter(unit);
        const auto whole = counter.cells(1);
        const ProportionVector& truth_p = whole.front();
        eps[i] = unit_erp(truth_p);
        for (std::size_t l = 0; l < config.legends.size(); ++l) {
            pi[l * n_items + i] = unit_purity(truth_p, config.legends[l]);
        }
        for (int k : ks) {
            const auto cells = counter.cells(k);
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto& design = std::get<PartitionBased>(config.designs[pairs[p].design]);
                if (design.k_per_side != k) continue;
                const Legend& legend = config.legends[pairs[p].legend];
                const Label truth = decide(truth_p, legend);
                const Label label = aggregate_cells(cells, design.protocol, legend);
                wrong[p * n_items + i] = label.value != truth.value;
            }
        }
    }

    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const std::size_t l = pairs[p].legend;
        DesignResult res = make_result(config.legends[l], config.designs[pairs[p].design]);
        std::vector<double> per_real(sets.size(), 0.0);
        res.units.reserve(n_items);
        for (std::size_t i = 0; i < n_items; ++i) {
            const SamplingUnit& unit = sets[items[i].set][items[i].unit];
            const double w = wrong[p * n_items + i];
            per_real[items[i].set] += w;
            res.units.push_back({unit.origin_row(), unit.origin_col(), pi[l * n_items + i], eps[i], w});
        }
        for (std::size_t s = 0; s < sets.size(); ++s) per_real[s] /= static_cast<double>(sets[s].size());
        summarize(per_real, res);
        report.designs.push_back(std::move(res));
    }
    report.curves = build_curves(report.designs, config.legends, config.bin_step, config.span);
    return report;
}

std::vector<ScalogramRow> purity_scalogram(const CategoricalRaster& raster, const std::vector<int>& unit_sides,
                                           Execution exec) {
    std::vector<ScalogramRow> rows;
    for (int side : unit_sides) {
        const auto units = extract_units(raster, side, 0, 0);
        if (units.empty()) {
            throw std::invalid_argument("no complete unit of side " + std::to_string(side));
        }
        long above = 0;
        long below = 0;
        const long n = static_cast<long>(units.size());
#pragma omp parallel for reduction(+ : above, below) schedule(dynamic, 8) if (exec == Execution::Parallel)
        for (long u = 0; u < n; ++u) {
            const auto counts = class_counts(units[static_cast<std::size_t>(u)]);
            const auto p = ProportionVector::from_counts(counts);
            const double top = *std::max_element(p.values().begin(), p.values().end());
            above += top > 0.9;
            below += top < 0.5;
        }
        rows.push_back({side, static_cast<double>(above) / static_cast<double>(n),
                        static_cast<double>(below) / static_cast<double>(n)});
    }
    return rows;
}

ErrorReport run_experiment(const CategoricalRaster& raster, const ExperimentConfig& config, Execution exec) {
    auto points = run_point_experiment(raster, config, exec);
    auto parts = run_partition_experiment(raster, config, exec);
    ErrorReport report;
    report.designs = std::move(points.designs);
    report.curves = std::move(points.curves);
    for (auto& d : parts.designs) report.designs.push_back(std::move(d));
    for (auto& c : parts.curves) report.curves.push_back(std::move(c));
    report.scalogram = purity_scalogram(raster, config.scalogram_sides, exec);
    return report;
}

}  // namespace sublab

#include "sublab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sublab {

double error_rate(std::span<const Label> truth, std::span<const Label> simulated) {
    if (truth.empty()) {
        throw std::invalid_argument("error rate of an empty label list");
    }
    if (truth.size() != simulated.size()) {
        throw std::invalid_argument("label lists differ in length");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].value != simulated[i].value) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double purity(const ProportionVector& proportions, std::span<const int> target_classes) {
    if (target_classes.empty()) {
        throw std::invalid_argument("purity needs at least one target class");
    }
    return proportions.share(target_classes);
}

double erp(const ProportionVector& proportions) {
    const std::size_t k = proportions.size();
    if (k < 2) {
        throw std::invalid_argument("equivalent reference probability needs k >= 2");
    }
    const auto p = proportions.values();
    const std::size_t top = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    const double p_top = p[top];
    if (p_top >= 1.0) return 1.0;

    double rest = 0.0;  // sum of p_i ln p_i over the other classes, 0 ln 0 = 0
    for (std::size_t i = 0; i < k; ++i) {
        if (i != top && p[i] > 0.0) rest += p[i] * std::log(p[i]);
    }
    const double expected_gain = std::log(p_top) - rest / (1.0 - p_top);
    const double e = std::exp(expected_gain);
    return e / (e + static_cast<double>(k - 1));
}

std::size_t bin_count(double step) {
    if (!(step > 0.0 && step < 1.0)) {
        throw std::invalid_argument("bin step must lie in (0, 1)");
    }
    return static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
}

std::size_t bin_index(double value, double step) {
    const std::size_t bins = bin_count(step);
    if (value <= 0.0) return 0;
    const auto i = static_cast<std::size_t>(std::floor(value / step + 1e-9));
    return std::min(i, bins - 1);
}

BinnedCurve bin_errors(std::span<const double> metric_values, std::span<const double> per_unit_errors,
                       double step) {
    if (metric_values.size() != per_unit_errors.size()) {
        throw std::invalid_argument("metric and error lists differ in length");
    }
    const std::size_t bins = bin_count(step);
    BinnedCurve curve;
    curve.step = step;
    curve.bin_centers.resize(bins);
    curve.counts.assign(bins, 0);
    std::vector<double> sums(bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) {
        const double lo = static_cast<double>(i) * step;
        const double hi = std::min(1.0, static_cast<double>(i + 1) * step);
        curve.bin_centers[i] = 0.5 * (lo + hi);
    }
    for (std::size_t i = 0; i < metric_values.size(); ++i) {
        const std::size_t b = bin_index(metric_values[i], step);
        sums[b] += per_unit_errors[i];
        ++curve.counts[b];
    }
    curve.mean_error.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        curve.mean_error[i] = curve.counts[i] ? sums[i] / static_cast<double>(curve.counts[i])
                                              : std::numeric_limits<double>::quiet_NaN();
    }
    return curve;
}

std::vector<double> local_regression_smooth(std::span<const double> x, std::span<const double> y,
                                            std::span<const double> query, double span) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("x and y differ in length");
    }
    if (x.size() < 5) {
        throw std::invalid_argument("local regression needs at least 5 points");
    }
    if (!(span > 0.0 && span <= 1.0)) {
        throw std::invalid_argument("span must lie in (0, 1]");
    }
    const std::size_t n = x.size();
    const std::size_t q = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(span * n)), 2, n);

    std::vector<double> out(query.size());
    std::vector<double> dist(n);
    std::vector<double> sorted(n);
    for (std::size_t qi = 0; qi < query.size(); ++qi) {
        const double x0 = query[qi];
        for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(x[i] - x0);
        sorted = dist;
        std::nth_element(sorted.begin(), sorted.begin() + (q - 1), sorted.end());
        double h = sorted[q - 1];
        if (span >= 1.0) {
            h = *std::max_element(dist.begin(), dist.end());
        }

        double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double w;
            if (h <= 0.0) {
                w = dist[i] == 0.0 ? 1.0 : 0.0;
            } else {
                const double u = dist[i] / h;
                if (u >= 1.0) continue;
                const double a = 1.0 - u * u * u;
                w = a * a * a;
            }
            if (w == 0.0) continue;
            const double dx = x[i] - x0;
            sw += w;
            swx += w * dx;
            swy += w * y[i];
            swxx += w * dx * dx;
            swxy += w * dx * y[i];
        }
        if (sw <= 0.0) {
            out[qi] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        // Local line centred at x0: intercept is the fitted value.
        const double var = swxx * sw - swx * swx;
        if (var <= 1e-12 * sw * swxx) {
            out[qi] = swy / sw;
        } else {
            const double slope = (swxy * sw - swx * swy) / var;
            out[qi] = (swy - slope * swx) / sw;
        }
    }
    return out;
}

}  // namespace sublab

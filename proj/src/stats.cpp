#include "sublab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sublab {
namespace {

constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

void check_shapes(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("beta shape parameters must be positive and finite");
    }
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
}

// Safeguarded Newton on a monotone increasing cdf over [lo, hi].
template <class Cdf, class Pdf>
double invert_cdf(double p, double lo, double hi, double x, Cdf cdf, Pdf pdf) {
    for (int iter = 0; iter < 400; ++iter) {
        const double f = cdf(x) - p;
        if (f == 0.0) return x;
        if (f < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        const double dens = pdf(x);
        double next = (dens > 0.0 && std::isfinite(dens)) ? x - f / dens : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 1e-16 + 4e-16 * std::abs(x) || hi - lo <= 1e-16 + 4e-16 * std::abs(x)) {
            return next;
        }
        x = next;
    }
    return x;
}

double gamma_series(double s, double x) {
    double sum = 1.0 / s;
    double del = sum;
    double ap = s;
    for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_continued_fraction(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
    check_shapes(a, b);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double a, double b) {
    check_shapes(a, b);
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("beta quantile probability must lie in [0, 1]");
    }
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double lb = log_beta(a, b);
    auto pdf = [&](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb);
    };
    auto cdf = [&](double x) { return incomplete_beta(x, a, b); };
    return invert_cdf(p, 0.0, 1.0, a / (a + b), cdf, pdf);
}

double incomplete_gamma(double s, double x) {
    if (!(s > 0.0)) {
        throw std::invalid_argument("gamma shape must be positive");
    }
    if (x <= 0.0) return 0.0;
    if (x < s + 1.0) return gamma_series(s, x);
    return 1.0 - gamma_continued_fraction(s, x);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal quantile probability must lie in (0, 1)");
    }
    // Acklam's rational approximation, then Halley refinement against erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        // Work in the tail that keeps precision.
        const double e = x < 0.0 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                                 : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double chi_square_quantile(double p, double df) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("chi-square quantile probability must lie in [0, 1)");
    }
    if (!(df > 0.0) || !std::isfinite(df)) {
        throw std::invalid_argument("chi-square degrees of freedom must be positive");
    }
    if (p == 0.0) return 0.0;
    if (df == 1.0) {
        const double z = normal_quantile(0.5 * (1.0 - p));
        return z * z;
    }
    const double s = 0.5 * df;
    auto cdf = [&](double q) { return incomplete_gamma(s, 0.5 * q); };
    auto pdf = [&](double q) {
        if (q <= 0.0) return 0.0;
        return std::exp((s - 1.0) * std::log(0.5 * q) - 0.5 * q - std::lgamma(s)) * 0.5;
    };
    double hi = std::max(1.0, df);
    while (cdf(hi) < p) hi *= 2.0;
    return invert_cdf(p, 0.0, hi, 0.5 * hi, cdf, pdf);
}

ConfidenceInterval clopper_pearson(std::int64_t m, std::int64_t n, double alpha) {
    check_alpha(alpha);
    if (n < 1) {
        throw std::invalid_argument("Clopper-Pearson interval needs n >= 1");
    }
    if (m < 0 || m > n) {
        throw std::invalid_argument("successes " + std::to_string(m) + " outside [0, " + std::to_string(n) + "]");
    }
    ConfidenceInterval ci;
    ci.level = 1.0 - alpha;
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    ci.lower = m > 0 ? beta_quantile(0.5 * alpha, md, nd - md + 1.0) : 0.0;
    // Upper bound through the reflected lower tail keeps precision near 1.
    ci.upper = m < n ? 1.0 - beta_quantile(0.5 * alpha, nd - md, md + 1.0) : 1.0;
    return ci;
}

double goodman_b(std::size_t k, double alpha) {
    check_alpha(alpha);
    if (k < 2) {
        throw std::invalid_argument("Goodman intervals need k >= 2 classes");
    }
    return chi_square_quantile(1.0 - alpha / static_cast<double>(k), 1.0);
}

ConfidenceInterval goodman_interval(std::int64_t count, std::int64_t n, double b, double alpha) {
    if (n < 1) {
        throw std::invalid_argument("Goodman intervals need n >= 1");
    }
    if (count < 0 || count > n) {
        throw std::invalid_argument("class count outside [0, n]");
    }
    const double x = static_cast<double>(count);
    const double nd = static_cast<double>(n);
    const double centre = b + 2.0 * x;
    const double radius = std::sqrt(b * (b + 4.0 * x * (nd - x) / nd));
    const double denom = 2.0 * (nd + b);
    ConfidenceInterval ci;
    ci.level = 1.0 - alpha;
    ci.lower = std::clamp((centre - radius) / denom, 0.0, 1.0);
    ci.upper = std::clamp((centre + radius) / denom, 0.0, 1.0);
    return ci;
}

std::vector<ConfidenceInterval> goodman_intervals(std::span<const std::int64_t> counts, double alpha) {
    const double b = goodman_b(counts.size(), alpha);
    const std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (n < 1) {
        throw std::invalid_argument("Goodman intervals need at least one observation");
    }
    std::vector<ConfidenceInterval> out;
    out.reserve(counts.size());
    for (std::int64_t c : counts) out.push_back(goodman_interval(c, n, b, alpha));
    return out;
}

}  // namespace sublab

#pragma once

// Reference computations used only as test oracles. Each one is derived from first
// principles (quadrature, summation, bisection) and shares no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// 20-point Gauss-Legendre nodes and weights on [-1, 1].
inline const std::array<std::pair<double, double>, 20>& gauss_legendre20() {
    static const std::array<std::pair<double, double>, 20> table = [] {
        std::array<std::pair<double, double>, 20> t{};
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            t[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        return t;
    }();
    return table;
}

/// Composite Gauss-Legendre quadrature over [lo, hi].
inline double integrate(const std::function<double(double)>& f, double lo, double hi, int panels = 400) {
    const auto& gl = gauss_legendre20();
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        const double mid = a + 0.5 * h;
        double s = 0.0;
        for (const auto& [x, w] : gl) s += w * f(mid + 0.5 * h * x);
        total += s * 0.5 * h;
    }
    return total;
}

inline double bisect(const std::function<double(double)>& increasing, double target, double lo, double hi,
                     int iterations = 200) {
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (increasing(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Gauss-Legendre over [a, b] split geometrically toward `toward` (a or b), so algebraic
/// endpoint singularities such as x^0.4 still integrate to full precision.
inline double integrate_geometric(const std::function<double(double)>& f, double a, double b, bool toward_a) {
    double total = 0.0;
    double len = b - a;
    for (int j = 0; j < 60; ++j) {
        const double half = 0.5 * len;
        total += toward_a ? integrate(f, a + half, a + len, 1) : integrate(f, b - len, b - half, 1);
        len = half;
    }
    return total;
}

/// Composite rule on [lo, hi] whose end panels are graded toward the chosen endpoints.
inline double integrate_graded(const std::function<double(double)>& f, double lo, double hi, int panels,
                               bool grade_lo, bool grade_hi) {
    panels = std::max(panels, 2);
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        const double b = p + 1 == panels ? hi : a + h;
        if (p == 0 && grade_lo) {
            total += integrate_geometric(f, a, b, true);
        } else if (p + 1 == panels && grade_hi) {
            total += integrate_geometric(f, a, b, false);
        } else {
            total += integrate(f, a, b, 1);
        }
    }
    return total;
}

/// Beta(a, b) CDF by quadrature after t = sin^2(theta), with graded panels at both ends of
/// [0, pi/2] for the fractional powers left when a or b is not a half-integer.
class BetaCdf {
public:
    BetaCdf(double a, double b, int panels = 200) : a_(a), b_(b), panels_(panels) {
        total_ = integrate_graded(density(), 0.0, kHalfPi, panels_, true, true);
    }

    double operator()(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const double theta = std::asin(std::sqrt(x));
        const int n = static_cast<int>(std::ceil(panels_ * theta / kHalfPi));
        if (theta <= 0.5 * kHalfPi) return integrate_graded(density(), 0.0, theta, n, true, false) / total_;
        const int m = static_cast<int>(std::ceil(panels_ * (kHalfPi - theta) / kHalfPi));
        return 1.0 - integrate_graded(density(), theta, kHalfPi, m, false, true) / total_;
    }

private:
    static constexpr double kHalfPi = std::numbers::pi / 2.0;

    std::function<double(double)> density() const {
        return [a = a_, b = b_](double th) {
            return 2.0 * std::exp((2.0 * a - 1.0) * std::log(std::sin(th)) + (2.0 * b - 1.0) * std::log(std::cos(th)));
        };
    }

    double a_, b_;
    int panels_;
    double total_ = 0.0;
};

inline double beta_cdf(double x, double a, double b) { return BetaCdf(a, b)(x); }

inline double beta_quantile(double p, double a, double b, int iterations = 80) {
    const BetaCdf cdf(a, b);
    return bisect([&cdf](double x) { return cdf(x); }, p, 0.0, 1.0, iterations);
}

/// Chi-square CDF with one degree of freedom: P(|Z| <= sqrt(q)) by quadrature of the
/// normal density.
inline double chi2_cdf_df1(double q) {
    if (q <= 0.0) return 0.0;
    const double z = std::sqrt(q);
    auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
    return 2.0 * integrate(phi, 0.0, z, 200);
}

inline double chi2_quantile_df1(double p) {
    return bisect(chi2_cdf_df1, p, 0.0, 200.0, 120);
}

/// Chi-square CDF for any df via q = u^2: the u-density u^(df-1) exp(-u^2/2) is smooth
/// on [0, inf) for df >= 1. Normalized by quadrature up to u = 40.
inline double chi2_cdf(double q, double df) {
    if (q <= 0.0) return 0.0;
    auto f = [df](double u) { return u <= 0.0 ? (df == 1.0 ? 1.0 : 0.0) : std::exp((df - 1.0) * std::log(u) - 0.5 * u * u); };
    const double u = std::sqrt(q);
    if (u >= 40.0) return 1.0;
    const double left = integrate(f, 0.0, u, 100);
    return left / (left + integrate(f, u, 40.0, 100));
}

inline double chi2_quantile(double p, double df) {
    return bisect([df](double q) { return chi2_cdf(q, df); }, p, 0.0, 1600.0, 90);
}

/// Binomial probability mass by a running product in log space.
inline double binomial_pmf(int k, int n, double p) {
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    double log_choose = 0.0;
    for (int i = 1; i <= k; ++i) log_choose += std::log(static_cast<double>(n - k + i)) - std::log(static_cast<double>(i));
    return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

inline double binomial_cdf(int m, int n, double p) {
    double s = 0.0;
    for (int k = 0; k <= m; ++k) s += binomial_pmf(k, n, p);
    return std::min(1.0, s);
}

/// Exact interval from binomial tails: lower solves P(X >= m) = alpha/2, upper solves
/// P(X <= m) = alpha/2.
inline std::pair<double, double> clopper_pearson(int m, int n, double alpha) {
    double lo = 0.0, hi = 1.0;
    if (m > 0) {
        lo = bisect([&](double p) { return 1.0 - binomial_cdf(m - 1, n, p); }, alpha / 2.0, 0.0, 1.0, 100);
    }
    if (m < n) {
        hi = bisect([&](double p) { return -binomial_cdf(m, n, p); }, -alpha / 2.0, 0.0, 1.0, 100);
    }
    return {lo, hi};
}

/// Error rate of an n-point majority estimate against threshold t when the true share is pi:
/// the probability that a sample drawn with replacement lands on the wrong side.
inline double point_error_binomial(double pi, double t, int n) {
    const bool truth = pi >= t;
    double p_present = 0.0;
    for (int k = 0; k <= n; ++k) {
        if (static_cast<double>(k) / n >= t) p_present += binomial_pmf(k, n, pi);
    }
    return truth ? 1.0 - p_present : p_present;
}

/// Same for draws without replacement from N cells of which K are targets.
inline double point_error_hypergeometric(std::int64_t K, std::int64_t N, double t, int n) {
    auto log_choose = [](std::int64_t a, std::int64_t b) {
        return std::lgamma(static_cast<double>(a + 1)) - std::lgamma(static_cast<double>(b + 1)) -
               std::lgamma(static_cast<double>(a - b + 1));
    };
    const bool truth = static_cast<double>(K) / static_cast<double>(N) >= t;
    double p_present = 0.0;
    for (int k = 0; k <= n; ++k) {
        if (k > K || n - k > N - K) continue;
        if (static_cast<double>(k) / n >= t) {
            p_present += std::exp(log_choose(K, k) + log_choose(N - K, n - k) - log_choose(N, n));
        }
    }
    return truth ? 1.0 - p_present : p_present;
}

}  // namespace oracle

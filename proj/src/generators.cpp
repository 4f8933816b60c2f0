#include "sublab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sublab/rng.hpp"

namespace sublab {

std::vector<MosaicSite> mosaic_sites(const MosaicParams& params) {
    if (params.width <= 0 || params.height <= 0) {
        throw std::invalid_argument("mosaic dimensions must be positive");
    }
    if (params.class_count < 1) {
        throw std::invalid_argument("mosaic class count must be >= 1");
    }
    if (params.class_weights.size() != static_cast<std::size_t>(params.class_count)) {
        throw std::invalid_argument("class_weights length must equal class_count");
    }
    double total = 0.0;
    for (double w : params.class_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("class weights must be finite and non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("class weights sum to zero");
    }
    if (!(params.patch_density > 0.0)) {
        throw std::invalid_argument("patch density must be positive");
    }

    const double cells = static_cast<double>(params.width) * params.height;
    const auto n_sites = std::max<long long>(1, std::llround(params.patch_density * cells / 1e4));

    Engine rng(params.seed);
    std::uniform_real_distribution<double> ux(0.0, params.width);
    std::uniform_real_distribution<double> uy(0.0, params.height);
    std::discrete_distribution<int> cls(params.class_weights.begin(), params.class_weights.end());

    std::vector<MosaicSite> sites(static_cast<std::size_t>(n_sites));
    for (auto& s : sites) {
        s.x = ux(rng);
        s.y = uy(rng);
        s.cls = static_cast<ClassIndex>(cls(rng));
    }
    return sites;
}

CategoricalRaster generate_patch_mosaic(const MosaicParams& params, Execution exec) {
    const auto sites = mosaic_sites(params);
    const int w = params.width;
    const int h = params.height;
    std::vector<ClassIndex> values(static_cast<std::size_t>(w) * h, 0);
    if (params.class_count == 1) {
        return CategoricalRaster(w, h, 1.0, 1, std::move(values));
    }

    // Bucket grid so each cell only inspects nearby sites.
    const double bs = std::max(1.0, std::sqrt(static_cast<double>(w) * h / sites.size()));
    const int gx = static_cast<int>(std::ceil(w / bs));
    const int gy = static_cast<int>(std::ceil(h / bs));
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gx) * gy);
    for (int i = 0; i < static_cast<int>(sites.size()); ++i) {
        const int bx = std::min(gx - 1, static_cast<int>(sites[i].x / bs));
        const int by = std::min(gy - 1, static_cast<int>(sites[i].y / bs));
        buckets[static_cast<std::size_t>(by) * gx + bx].push_back(i);
    }
    const int max_ring = std::max(gx, gy);

#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
    for (int r = 0; r < h; ++r) {
        const double py = r + 0.5;
        const int by = std::min(gy - 1, static_cast<int>(py / bs));
        for (int c = 0; c < w; ++c) {
            const double px = c + 0.5;
            const int bx = std::min(gx - 1, static_cast<int>(px / bs));
            double best = std::numeric_limits<double>::infinity();
            int best_idx = -1;
            auto visit = [&](int qx, int qy) {
                if (qx < 0 || qy < 0 || qx >= gx || qy >= gy) return;
                for (int i : buckets[static_cast<std::size_t>(qy) * gx + qx]) {
                    const double dx = sites[i].x - px;
                    const double dy = sites[i].y - py;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 < best || (d2 == best && i < best_idx)) {
                        best = d2;
                        best_idx = i;
                    }
                }
            };
            for (int ring = 0; ring <= max_ring; ++ring) {
                if (ring == 0) {
                    visit(bx, by);
                } else {
                    for (int d = -ring; d <= ring; ++d) {
                        visit(bx + d, by - ring);
                        visit(bx + d, by + ring);
                    }
                    for (int d = -ring + 1; d <= ring - 1; ++d) {
                        visit(bx - ring, by + d);
                        visit(bx + ring, by + d);
                    }
                }
                // Sites outside the visited block are at least ring*bs away.
                const double bound = ring * bs;
                if (best_idx >= 0 && best < bound * bound * (1.0 - 1e-12)) break;
            }
            values[static_cast<std::size_t>(r) * w + c] = sites[best_idx].cls;
        }
    }
    return CategoricalRaster(w, h, 1.0, params.class_count, std::move(values));
}

std::vector<double> box_mean(std::span<const double> values, int width, int height, int radius,
                             Execution exec) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("box filter dimensions must be positive");
    }
    if (radius < 0) {
        throw std::invalid_argument("box filter radius must be >= 0");
    }
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("box filter input size mismatch");
    }
    if (radius == 0) {
        return {values.begin(), values.end()};
    }
    const std::size_t sw = static_cast<std::size_t>(width) + 1;
    std::vector<double> sat(sw * (static_cast<std::size_t>(height) + 1), 0.0);

    // Row prefixes, then column prefixes: each entry's summation order is fixed.
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
    for (int r = 0; r < height; ++r) {
        double acc = 0.0;
        for (int c = 0; c < width; ++c) {
            acc += values[static_cast<std::size_t>(r) * width + c];
            sat[(r + 1) * sw + c + 1] = acc;
        }
    }
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
    for (int c = 1; c <= width; ++c) {
        for (int r = 1; r <= height; ++r) {
            sat[r * sw + c] += sat[(r - 1) * sw + c];
        }
    }

    std::vector<double> out(values.size());
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
    for (int r = 0; r < height; ++r) {
        const int r0 = std::max(0, r - radius);
        const int r1 = std::min(height, r + radius + 1);
        for (int c = 0; c < width; ++c) {
            const int c0 = std::max(0, c - radius);
            const int c1 = std::min(width, c + radius + 1);
            const double sum = sat[r1 * sw + c1] - sat[r0 * sw + c1] - sat[r1 * sw + c0] + sat[r0 * sw + c0];
            out[static_cast<std::size_t>(r) * width + c] = sum / (static_cast<double>(r1 - r0) * (c1 - c0));
        }
    }
    return out;
}

CategoricalRaster generate_smoothed_binary(const SmoothedBinaryParams& params, Execution exec) {
    if (params.width <= 0 || params.height <= 0) {
        throw std::invalid_argument("smoothed landscape dimensions must be positive");
    }
    if (!(params.cover_fraction > 0.0 && params.cover_fraction < 1.0)) {
        throw std::invalid_argument("cover fraction must lie in (0, 1)");
    }
    if (params.smoothing_radius < 0) {
        throw std::invalid_argument("smoothing radius must be >= 0");
    }
    const std::size_t n = static_cast<std::size_t>(params.width) * params.height;
    std::vector<double> noise(n);
    Engine rng(params.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : noise) v = u(rng);

    const auto smooth = box_mean(noise, params.width, params.height, params.smoothing_radius, exec);

    const auto forest = static_cast<std::size_t>(std::llround(params.cover_fraction * static_cast<double>(n)));
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    auto higher = [&](std::uint32_t a, std::uint32_t b) {
        return smooth[a] != smooth[b] ? smooth[a] > smooth[b] : a < b;
    };
    std::vector<ClassIndex> values(n, 0);
    if (forest > 0) {
        std::nth_element(order.begin(), order.begin() + (forest - 1), order.end(), higher);
        for (std::size_t i = 0; i < forest; ++i) values[order[i]] = 1;
    }
    return CategoricalRaster(params.width, params.height, 1.0, 2, std::move(values));
}

}  // namespace sublab

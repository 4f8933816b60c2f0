#include "sublab/response_design.hpp"

#include <random>
#include <stdexcept>

namespace sublab {

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::TTM:
            return "TTM";
        case Protocol::MTT:
            return "MTT";
        case Protocol::TwoStageMajority:
            return "majority2";
    }
    return "?";
}

Protocol parse_protocol(const std::string& text) {
    if (text == "TTM" || text == "ttm") return Protocol::TTM;
    if (text == "MTT" || text == "mtt") return Protocol::MTT;
    if (text == "majority2" || text == "majority" || text == "two_stage_majority") {
        return Protocol::TwoStageMajority;
    }
    throw std::invalid_argument("unknown protocol '" + text + "' (expected TTM, MTT or majority2)");
}

std::string design_kind(const ResponseDesign& d) {
    return std::holds_alternative<PointBased>(d) ? "points" : "partition";
}

int design_size(const ResponseDesign& d) {
    if (auto* p = std::get_if<PointBased>(&d)) return p->n_points;
    return std::get<PartitionBased>(d).k_per_side;
}

bool design_fits_legend(const ResponseDesign& d, const Legend& legend) {
    if (std::holds_alternative<PointBased>(d)) return true;
    const Protocol p = std::get<PartitionBased>(d).protocol;
    return legend.is_binary() ? p != Protocol::TwoStageMajority : p == Protocol::TwoStageMajority;
}

void check_design(const ResponseDesign& d, int side) {
    if (auto* p = std::get_if<PointBased>(&d)) {
        if (p->n_points < 1 || static_cast<long long>(p->n_points) > static_cast<long long>(side) * side) {
            throw std::invalid_argument("point count " + std::to_string(p->n_points) + " outside [1, " +
                                        std::to_string(static_cast<long long>(side) * side) + "]");
        }
        return;
    }
    const int k = std::get<PartitionBased>(d).k_per_side;
    if (k < 1 || side % k != 0) {
        throw std::invalid_argument("partition k = " + std::to_string(k) + " does not divide unit side " +
                                    std::to_string(side));
    }
}

PointStream::PointStream(std::size_t population, std::uint64_t seed) : rng_(seed), population_(population) {
    if (population == 0) {
        throw std::invalid_argument("point stream over an empty population");
    }
}

std::size_t PointStream::at(std::size_t i) const {
    auto it = moved_.find(i);
    return it == moved_.end() ? i : it->second;
}

std::size_t PointStream::next() {
    if (drawn_ >= population_) {
        throw std::out_of_range("point stream exhausted");
    }
    std::uniform_int_distribution<std::size_t> pick(drawn_, population_ - 1);
    const std::size_t j = pick(rng_);
    const std::size_t chosen = at(j);
    moved_[j] = at(drawn_);
    moved_.erase(drawn_);
    ++drawn_;
    return chosen;
}

std::vector<SampledPoint> sample_points(const SamplingUnit& unit, int n, std::uint64_t seed) {
    if (n < 1 || static_cast<std::size_t>(n) > unit.cell_count()) {
        throw std::invalid_argument("cannot draw " + std::to_string(n) + " points from " +
                                    std::to_string(unit.cell_count()) + " cells");
    }
    PointStream stream(unit.cell_count(), seed);
    std::vector<SampledPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::size_t cell = stream.next();
        const int row = static_cast<int>(cell / unit.side());
        const int col = static_cast<int>(cell % unit.side());
        out.push_back({row, col, unit.class_at(row, col)});
    }
    return out;
}

std::vector<ProportionVector> partition_cells(const SamplingUnit& unit, int k) {
    if (k < 1 || unit.side() % k != 0) {
        throw std::invalid_argument("partition k = " + std::to_string(k) + " does not divide unit side " +
                                    std::to_string(unit.side()));
    }
    const int step = unit.side() / k;
    const int classes = unit.parent().class_count();
    std::vector<ProportionVector> out;
    out.reserve(static_cast<std::size_t>(k) * k);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(classes));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            std::fill(counts.begin(), counts.end(), 0);
            for (int r = i * step; r < (i + 1) * step; ++r) {
                for (int c = j * step; c < (j + 1) * step; ++c) {
                    ++counts[unit.class_at(r, c)];
                }
            }
            out.push_back(ProportionVector::from_counts(counts));
        }
    }
    return out;
}

PartitionCounter::PartitionCounter(const SamplingUnit& unit)
    : side_(unit.side()), classes_(unit.parent().class_count()) {
    const std::size_t stride = static_cast<std::size_t>(side_) + 1;
    const std::size_t plane = stride * stride;
    sat_.assign(plane * static_cast<std::size_t>(classes_), 0);
    for (int r = 0; r < side_; ++r) {
        for (int c = 0; c < side_; ++c) {
            const std::size_t cls = unit.class_at(r, c);
            sat_[cls * plane + (r + 1) * stride + (c + 1)] = 1;
        }
    }
    for (int cls = 0; cls < classes_; ++cls) {
        std::int32_t* p = sat_.data() + static_cast<std::size_t>(cls) * plane;
        for (std::size_t r = 1; r < stride; ++r) {
            for (std::size_t c = 1; c < stride; ++c) {
                p[r * stride + c] += p[(r - 1) * stride + c] + p[r * stride + c - 1] - p[(r - 1) * stride + c - 1];
            }
        }
    }
}

std::vector<ProportionVector> PartitionCounter::cells(int k) const {
    if (k < 1 || side_ % k != 0) {
        throw std::invalid_argument("partition k = " + std::to_string(k) + " does not divide unit side " +
                                    std::to_string(side_));
    }
    const int step = side_ / k;
    const std::size_t stride = static_cast<std::size_t>(side_) + 1;
    const std::size_t plane = stride * stride;
    std::vector<ProportionVector> out;
    out.reserve(static_cast<std::size_t>(k) * k);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(classes_));
    for (int i = 0; i < k; ++i) {
        const std::size_t r0 = static_cast<std::size_t>(i) * step;
        const std::size_t r1 = r0 + step;
        for (int j = 0; j < k; ++j) {
            const std::size_t c0 = static_cast<std::size_t>(j) * step;
            const std::size_t c1 = c0 + step;
            for (int cls = 0; cls < classes_; ++cls) {
                const std::int32_t* p = sat_.data() + static_cast<std::size_t>(cls) * plane;
                counts[cls] = p[r1 * stride + c1] - p[r0 * stride + c1] - p[r1 * stride + c0] + p[r0 * stride + c0];
            }
            out.push_back(ProportionVector::from_counts(counts));
        }
    }
    return out;
}

Label aggregate_cells(std::span<const ProportionVector> cells, Protocol protocol, const Legend& legend) {
    switch (protocol) {
        case Protocol::TTM:
        case Protocol::MTT:
            if (!legend.is_binary()) {
                throw std::invalid_argument(protocol_name(protocol) + " needs a binary legend");
            }
            return protocol == Protocol::TTM ? aggregate_ttm(cells, legend.binary_rule())
                                             : aggregate_mtt(cells, legend.binary_rule());
        case Protocol::TwoStageMajority:
            if (legend.is_binary()) {
                throw std::invalid_argument("two-stage majority needs a majority legend");
            }
            return aggregate_majority_two_stage(cells);
    }
    throw std::logic_error("unhandled protocol");
}

Label simulate_label(const SamplingUnit& unit, const ResponseDesign& design, const Legend& legend,
                     std::uint64_t seed) {
    if (const auto* p = std::get_if<PointBased>(&design)) {
        const auto points = sample_points(unit, p->n_points, seed);
        std::vector<std::int64_t> counts(static_cast<std::size_t>(unit.parent().class_count()), 0);
        for (const auto& pt : points) ++counts[pt.cls];
        return decide(ProportionVector::from_counts(counts), legend);
    }
    const auto& part = std::get<PartitionBased>(design);
    if (!design_fits_legend(design, legend)) {
        throw std::invalid_argument("protocol " + protocol_name(part.protocol) + " does not fit legend " +
                                    legend.name());
    }
    const auto cells = partition_cells(unit, part.k_per_side);
    return aggregate_cells(cells, part.protocol, legend);
}

std::vector<std::vector<SamplingUnit>> shifted_unit_sets(const CategoricalRaster& raster, int side,
                                                         const std::vector<int>& shifts) {
    if (shifts.empty()) {
        throw std::invalid_argument("shift list is empty");
    }
    std::vector<std::vector<SamplingUnit>> sets;
    sets.reserve(shifts.size() * shifts.size());
    for (int dy : shifts) {
        for (int dx : shifts) {
            auto units = extract_units(raster, side, dy, dx);
            if (units.empty()) {
                throw std::invalid_argument("shift (" + std::to_string(dy) + ", " + std::to_string(dx) +
                                            ") leaves no complete unit of side " + std::to_string(side));
            }
            sets.push_back(std::move(units));
        }
    }
    return sets;
}

}  // namespace sublab

#include "sublab/raster.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sublab {

CategoricalRaster::CategoricalRaster(int width, int height, double cell_size, int class_count,
                                     std::vector<ClassIndex> values, std::vector<std::string> class_names)
    : width_(width),
      height_(height),
      cell_size_(cell_size),
      class_count_(class_count),
      class_names_(std::move(class_names)),
      values_(std::move(values)) {
    if (width_ <= 0 || height_ <= 0) {
        throw std::invalid_argument("raster dimensions must be positive");
    }
    if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
        throw std::invalid_argument("raster cell size must be positive");
    }
    if (class_count_ <= 0 || class_count_ > std::numeric_limits<ClassIndex>::max() + 1) {
        throw std::invalid_argument("raster class count out of range");
    }
    if (values_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
        throw std::invalid_argument("raster value count does not match width x height");
    }
    if (!class_names_.empty() && class_names_.size() != static_cast<std::size_t>(class_count_)) {
        throw std::invalid_argument("class name count does not match class count");
    }
    for (ClassIndex v : values_) {
        if (v >= class_count_) {
            throw std::invalid_argument("raster value " + std::to_string(v) + " >= class count " +
                                        std::to_string(class_count_));
        }
    }
}

SamplingUnit::SamplingUnit(const CategoricalRaster& parent, int origin_row, int origin_col, int side)
    : parent_(&parent), origin_row_(origin_row), origin_col_(origin_col), side_(side) {
    if (side < 2) {
        throw std::invalid_argument("sampling unit side must be >= 2");
    }
    if (origin_row < 0 || origin_col < 0 || origin_row + side > parent.height() ||
        origin_col + side > parent.width()) {
        throw std::invalid_argument("sampling unit not fully inside raster");
    }
}

ProportionVector::ProportionVector(std::vector<double> proportions) : values_(std::move(proportions)) {
    if (values_.empty()) {
        throw std::invalid_argument("proportion vector is empty");
    }
    double sum = 0.0;
    for (double p : values_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("proportions must be finite and non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("proportions must sum to 1");
    }
}

ProportionVector ProportionVector::from_counts(std::span<const std::int64_t> counts) {
    const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (total <= 0) {
        throw std::invalid_argument("proportions from counts need a positive total");
    }
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) {
            throw std::invalid_argument("negative class count");
        }
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    ProportionVector out(std::move(p));
    out.counts_.assign(counts.begin(), counts.end());
    out.total_ = total;
    return out;
}

double ProportionVector::share(std::span<const int> classes) const {
    if (has_counts()) {
        std::int64_t sum = 0;
        for (int c : classes) sum += counts_.at(static_cast<std::size_t>(c));
        return static_cast<double>(sum) / static_cast<double>(total_);
    }
    double sum = 0.0;
    for (int c : classes) sum += values_.at(static_cast<std::size_t>(c));
    return sum;
}

std::vector<SamplingUnit> extract_units(const CategoricalRaster& raster, int side, int row_offset,
                                        int col_offset) {
    if (side < 2) {
        throw std::invalid_argument("unit side must be >= 2");
    }
    if (row_offset < 0 || col_offset < 0) {
        throw std::invalid_argument("unit offsets must be non-negative");
    }
    if (side > raster.width() || side > raster.height()) {
        throw std::invalid_argument("unit side " + std::to_string(side) + " larger than raster");
    }
    std::vector<SamplingUnit> units;
    if (row_offset >= raster.height() || col_offset >= raster.width()) {
        return units;
    }
    const int rows = (raster.height() - row_offset) / side;
    const int cols = (raster.width() - col_offset) / side;
    units.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            units.emplace_back(raster, row_offset + i * side, col_offset + j * side, side);
        }
    }
    return units;
}

std::vector<std::int64_t> class_counts(const SamplingUnit& unit) {
    std::vector<std::int64_t> counts(unit.parent().class_count(), 0);
    const auto& r = unit.parent();
    for (int row = 0; row < unit.side(); ++row) {
        const ClassIndex* line = r.values().data() + static_cast<std::size_t>(unit.origin_row() + row) * r.width() +
                                 unit.origin_col();
        for (int col = 0; col < unit.side(); ++col) {
            ++counts[line[col]];
        }
    }
    return counts;
}

ProportionVector true_proportions(const SamplingUnit& unit) {
    return ProportionVector::from_counts(class_counts(unit));
}

}  // namespace sublab

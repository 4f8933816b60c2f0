#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sublab {

using ClassIndex = std::uint16_t;

/// Fine-resolution ground-truth grid of class indices, row-major.
/// Immutable after construction; safe to share between threads.
class CategoricalRaster {
public:
    CategoricalRaster(int width, int height, double cell_size, int class_count,
                      std::vector<ClassIndex> values, std::vector<std::string> class_names = {});

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    int class_count() const { return class_count_; }
    const std::vector<std::string>& class_names() const { return class_names_; }
    std::span<const ClassIndex> values() const { return values_; }

    ClassIndex at(int row, int col) const {
        return values_[static_cast<std::size_t>(row) * width_ + col];
    }

    bool operator==(const CategoricalRaster&) const = default;

private:
    int width_;
    int height_;
    double cell_size_;
    int class_count_;
    std::vector<std::string> class_names_;
    std::vector<ClassIndex> values_;
};

/// A side x side block of raster cells standing in for one coarse map pixel.
/// Holds a non-owning pointer; the raster must outlive the unit.
class SamplingUnit {
public:
    SamplingUnit(const CategoricalRaster& parent, int origin_row, int origin_col, int side);

    const CategoricalRaster& parent() const { return *parent_; }
    int origin_row() const { return origin_row_; }
    int origin_col() const { return origin_col_; }
    int side() const { return side_; }
    std::size_t cell_count() const { return static_cast<std::size_t>(side_) * side_; }

    /// Class at unit-local coordinates.
    ClassIndex class_at(int row, int col) const {
        return parent_->at(origin_row_ + row, origin_col_ + col);
    }
    /// Class at unit-local row-major cell index.
    ClassIndex class_at(std::size_t cell) const {
        return class_at(static_cast<int>(cell / side_), static_cast<int>(cell % side_));
    }

private:
    const CategoricalRaster* parent_;
    int origin_row_;
    int origin_col_;
    int side_;
};

/// Per-class fractions summing to one. When built from counts the exact counts are
/// kept so that grouped shares are a single correctly rounded ratio.
class ProportionVector {
public:
    /// Validates non-negativity and unit sum (1e-9).
    explicit ProportionVector(std::vector<double> proportions);

    /// Exact fractions count / total.
    static ProportionVector from_counts(std::span<const std::int64_t> counts);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    bool has_counts() const { return total_ > 0; }
    std::span<const std::int64_t> counts() const { return counts_; }
    std::int64_t total() const { return total_; }

    /// Summed share of the given classes.
    double share(std::span<const int> classes) const;

    bool operator==(const ProportionVector& o) const { return values_ == o.values_; }

private:
    std::vector<double> values_;
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

/// Non-overlapping side x side blocks starting at (row_offset + i*side, col_offset + j*side)
/// that lie completely inside the raster, row-major. Partial blocks are discarded.
std::vector<SamplingUnit> extract_units(const CategoricalRaster& raster, int side, int row_offset = 0,
                                        int col_offset = 0);

/// Per-class cell counts over the unit.
std::vector<std::int64_t> class_counts(const SamplingUnit& unit);

ProportionVector true_proportions(const SamplingUnit& unit);

}  // namespace sublab

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sublab/legend.hpp"
#include "sublab/raster.hpp"
#include "sublab/rng.hpp"

namespace sublab {

enum class Protocol { TTM, MTT, TwoStageMajority };

std::string protocol_name(Protocol p);
Protocol parse_protocol(const std::string& text);

struct PointBased {
    int n_points = 1;
};

struct PartitionBased {
    int k_per_side = 1;
    Protocol protocol = Protocol::TTM;
};

using ResponseDesign = std::variant<PointBased, PartitionBased>;

/// "points" or "partition".
std::string design_kind(const ResponseDesign& d);
/// Sub-sample count per side for partitions, point count for point designs.
int design_size(const ResponseDesign& d);
/// TTM/MTT need a binary legend, TwoStageMajority a majority legend; point designs fit both.
bool design_fits_legend(const ResponseDesign& d, const Legend& legend);
/// Throws if the design cannot run on units of this side.
void check_design(const ResponseDesign& d, int side);

/// Uniform draws without replacement from {0, ..., population-1}, one at a time.
/// A lazily materialized Fisher-Yates shuffle, so any prefix is a uniform sample.
class PointStream {
public:
    PointStream(std::size_t population, std::uint64_t seed);

    std::size_t next();
    std::size_t drawn() const { return drawn_; }
    std::size_t population() const { return population_; }

private:
    std::size_t at(std::size_t i) const;

    Engine rng_;
    std::size_t population_;
    std::size_t drawn_ = 0;
    std::unordered_map<std::size_t, std::size_t> moved_;
};

struct SampledPoint {
    int row;  ///< unit-local
    int col;
    ClassIndex cls;
};

std::vector<SampledPoint> sample_points(const SamplingUnit& unit, int n, std::uint64_t seed);

/// Row-major exact class proportions of the k x k sub-squares of the unit.
std::vector<ProportionVector> partition_cells(const SamplingUnit& unit, int k);

/// Per-class summed-area table of one unit; answers partition_cells for any k in O(k^2 * classes).
class PartitionCounter {
public:
    explicit PartitionCounter(const SamplingUnit& unit);
    std::vector<ProportionVector> cells(int k) const;

private:
    int side_;
    int classes_;
    std::vector<std::int32_t> sat_;  // [class][row][col], (side+1)^2 per class
};

/// Apply the partition protocol to cell proportions.
Label aggregate_cells(std::span<const ProportionVector> cells, Protocol protocol, const Legend& legend);

Label simulate_label(const SamplingUnit& unit, const ResponseDesign& design, const Legend& legend,
                     std::uint64_t seed);

/// Default grid shifts.
inline const std::vector<int> kDefaultShifts{22, 33, 44, 55, 66, 77};

/// One unit list per (row shift, col shift) pair, row shift outer.
std::vector<std::vector<SamplingUnit>> shifted_unit_sets(const CategoricalRaster& raster, int side,
                                                         const std::vector<int>& shifts = kDefaultShifts);

}  // namespace sublab

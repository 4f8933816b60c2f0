#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sublab/raster.hpp"

namespace sublab {

/// Presence of the target classes when their summed share reaches the threshold (inclusive).
struct BinaryThreshold {
    std::vector<int> target_classes;
    double threshold = 0.5;
};

/// Most frequent class.
struct Majority {};

class Legend {
public:
    static Legend binary(std::vector<int> target_classes, double threshold);
    static Legend majority();

    bool is_binary() const { return std::holds_alternative<BinaryThreshold>(rule_); }
    bool is_majority() const { return !is_binary(); }
    const BinaryThreshold& binary_rule() const { return std::get<BinaryThreshold>(rule_); }

    /// Throws if a target class is outside [0, class_count).
    void check_classes(int class_count) const;

    /// Compact name, also accepted by parse(): "majority" or "binary:1+2@0.1".
    std::string name() const;
    static Legend parse(const std::string& text);

    bool operator==(const Legend&) const;

private:
    explicit Legend(std::variant<BinaryThreshold, Majority> rule) : rule_(std::move(rule)) {}
    std::variant<BinaryThreshold, Majority> rule_;
};

/// Binary: value 1 = present, 0 = absent. Majority: value = class index.
/// tie is set when the rule hit an exact tie and fell back to its declared convention.
struct Label {
    int value = 0;
    bool tie = false;

    bool present() const { return value != 0; }
    bool operator==(const Label&) const = default;
};

Label decide(const ProportionVector& proportions, const Legend& legend);

/// Threshold each cell, then strict majority of present cells (exact half -> absent, tie).
Label aggregate_ttm(std::span<const ProportionVector> cells, const BinaryThreshold& rule);

/// Cell present when its target share is strictly above one half; unit present when the
/// fraction of present cells reaches the threshold.
Label aggregate_mtt(std::span<const ProportionVector> cells, const BinaryThreshold& rule);

/// Per-cell majority class, then majority vote among cells; ties to the lowest class.
Label aggregate_majority_two_stage(std::span<const ProportionVector> cells);

}  // namespace sublab

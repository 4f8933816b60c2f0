#include "sublab/legend.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sublab/text.hpp"

namespace sublab {
namespace {

Label argmax_label(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    const bool tie = std::count(v.begin(), v.end(), v[best]) > 1;
    return {static_cast<int>(best), tie};
}

void require_cells(std::span<const ProportionVector> cells) {
    if (cells.empty()) {
        throw std::invalid_argument("aggregation needs at least one cell");
    }
}

}  // namespace

Legend Legend::binary(std::vector<int> target_classes, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("binary threshold must lie in (0, 1)");
    }
    if (target_classes.empty()) {
        throw std::invalid_argument("binary legend needs at least one target class");
    }
    std::sort(target_classes.begin(), target_classes.end());
    target_classes.erase(std::unique(target_classes.begin(), target_classes.end()), target_classes.end());
    if (target_classes.front() < 0) {
        throw std::invalid_argument("target class indices must be non-negative");
    }
    return Legend(BinaryThreshold{std::move(target_classes), threshold});
}

Legend Legend::majority() { return Legend(Majority{}); }

void Legend::check_classes(int class_count) const {
    if (!is_binary()) return;
    for (int c : binary_rule().target_classes) {
        if (c >= class_count) {
            throw std::invalid_argument("target class " + std::to_string(c) + " outside raster classes [0, " +
                                        std::to_string(class_count) + ")");
        }
    }
}

std::string Legend::name() const {
    if (!is_binary()) return "majority";
    std::string out = "binary:";
    const auto& r = binary_rule();
    for (std::size_t i = 0; i < r.target_classes.size(); ++i) {
        if (i) out += '+';
        out += std::to_string(r.target_classes[i]);
    }
    out += '@';
    out += format_number(r.threshold);
    return out;
}

Legend Legend::parse(const std::string& text) {
    if (text == "majority") return majority();
    const std::string prefix = "binary:";
    const auto at = text.find('@');
    if (text.rfind(prefix, 0) != 0 || at == std::string::npos) {
        throw std::invalid_argument("legend must be 'majority' or 'binary:<c>[+<c>...]@<t>', got '" + text + "'");
    }
    std::vector<int> classes;
    std::stringstream ss(text.substr(prefix.size(), at - prefix.size()));
    std::string item;
    while (std::getline(ss, item, '+')) {
        double v = 0.0;
        if (!parse_number(item, v) || v != std::floor(v) || v < 0) {
            throw std::invalid_argument("bad target class '" + item + "' in legend '" + text + "'");
        }
        classes.push_back(static_cast<int>(v));
    }
    double t = 0.0;
    if (!parse_number(text.substr(at + 1), t)) {
        throw std::invalid_argument("bad threshold in legend '" + text + "'");
    }
    return binary(std::move(classes), t);
}

bool Legend::operator==(const Legend& o) const {
    if (is_binary() != o.is_binary()) return false;
    if (!is_binary()) return true;
    return binary_rule().target_classes == o.binary_rule().target_classes &&
           binary_rule().threshold == o.binary_rule().threshold;
}

Label decide(const ProportionVector& proportions, const Legend& legend) {
    if (legend.is_binary()) {
        const auto& rule = legend.binary_rule();
        return {proportions.share(rule.target_classes) >= rule.threshold ? 1 : 0, false};
    }
    return argmax_label(proportions.values());
}

Label aggregate_ttm(std::span<const ProportionVector> cells, const BinaryThreshold& rule) {
    require_cells(cells);
    std::size_t present = 0;
    for (const auto& cell : cells) {
        if (cell.share(rule.target_classes) >= rule.threshold) ++present;
    }
    if (2 * present == cells.size()) return {0, true};
    return {2 * present > cells.size() ? 1 : 0, false};
}

Label aggregate_mtt(std::span<const ProportionVector> cells, const BinaryThreshold& rule) {
    require_cells(cells);
    std::size_t present = 0;
    for (const auto& cell : cells) {
        if (cell.share(rule.target_classes) > 0.5) ++present;
    }
    const double fraction = static_cast<double>(present) / static_cast<double>(cells.size());
    return {fraction >= rule.threshold ? 1 : 0, false};
}

Label aggregate_majority_two_stage(std::span<const ProportionVector> cells) {
    require_cells(cells);
    std::vector<double> votes(cells.front().size(), 0.0);
    bool tie = false;
    for (const auto& cell : cells) {
        if (cell.size() != votes.size()) {
            throw std::invalid_argument("cells disagree on class count");
        }
        const Label l = argmax_label(cell.values());
        tie = tie || l.tie;
        votes[static_cast<std::size_t>(l.value)] += 1.0;
    }
    Label out = argmax_label(votes);
    out.tie = out.tie || tie;
    return out;
}

}  // namespace sublab

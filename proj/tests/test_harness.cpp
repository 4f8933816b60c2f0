#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "sublab/generators.hpp"
#include "sublab/harness.hpp"

using namespace sublab;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.unit_side = 60;
    c.legends = {Legend::binary({1}, 0.1), Legend::binary({1}, 0.5), Legend::majority()};
    for (int n : {4, 9, 25}) c.designs.push_back(PointBased{n});
    for (int k : {2, 3, 5}) {
        for (Protocol p : {Protocol::TTM, Protocol::MTT, Protocol::TwoStageMajority}) c.designs.push_back(PartitionBased{k, p});
    }
    c.realizations = 12;
    c.shifts = {5, 17};
    c.master_seed = 99;
    c.scalogram_sides = {10, 30, 60};
    return c;
}

void check_same(const ErrorReport& a, const ErrorReport& b) {
    REQUIRE(a.designs.size() == b.designs.size());
    for (std::size_t i = 0; i < a.designs.size(); ++i) {
        CHECK(a.designs[i].legend == b.designs[i].legend);
        CHECK(a.designs[i].design == b.designs[i].design);
        CHECK(a.designs[i].protocol == b.designs[i].protocol);
        CHECK(a.designs[i].n_or_k == b.designs[i].n_or_k);
        CHECK(a.designs[i].overall_error == b.designs[i].overall_error);
        CHECK(a.designs[i].stderr_error == b.designs[i].stderr_error);
        CHECK(a.designs[i].units == b.designs[i].units);
    }
}

}  // namespace

TEST_CASE("config validation names the field") {
    const auto r = generate_patch_mosaic({120, 120, 3, 20.0, {1, 1, 1}, 1});
    auto c = small_config();
    CHECK_NOTHROW(c.validate(r));
    auto expect = [&](ExperimentConfig bad, const char* field) {
        try {
            bad.validate(r);
            FAIL("accepted invalid config for " << field);
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find(field) != std::string::npos);
        }
    };
    auto bad = c;
    bad.unit_side = 500;
    expect(bad, "unit_side");
    bad = c;
    bad.designs.push_back(PartitionBased{7, Protocol::TTM});
    expect(bad, "designs");
    bad = c;
    bad.designs.push_back(PointBased{3601});
    expect(bad, "designs");
    bad = c;
    bad.realizations = 0;
    expect(bad, "realizations");
    bad = c;
    bad.legends.push_back(Legend::binary({5}, 0.5));
    expect(bad, "legends");
    bad = c;
    bad.shifts = {100};
    expect(bad, "shifts");
    bad = c;
    bad.bin_step = 0.0;
    expect(bad, "bin_step");
}

TEST_CASE("pure units have zero error everywhere") {
    CategoricalRaster pure(150, 150, 1.0, 2, std::vector<ClassIndex>(22500, 1));
    auto c = small_config();
    const auto rep = run_experiment(pure, c);
    CHECK_FALSE(rep.designs.empty());
    for (const auto& d : rep.designs) {
        CHECK(d.overall_error == 0.0);
        CHECK(d.stderr_error == 0.0);
        for (const auto& u : d.units) CHECK(u.error_rate == 0.0);
    }
}

TEST_CASE("a single partition cell reproduces the true label") {
    const auto r = generate_patch_mosaic({200, 200, 4, 15.0, {1, 1, 1, 1}, 2});
    auto c = small_config();
    c.legends = {Legend::binary({1}, 0.3), Legend::majority()};
    c.designs = {PartitionBased{1, Protocol::TTM}, PartitionBased{1, Protocol::MTT},
                 PartitionBased{1, Protocol::TwoStageMajority}};
    const auto rep = run_partition_experiment(r, c);
    REQUIRE(rep.designs.size() == 3);
    // TTM with one cell is the threshold itself; MTT on one cell differs, so only TTM and majority are exact.
    CHECK(rep.designs[0].protocol == "TTM");
    CHECK(rep.designs[0].overall_error == 0.0);
    CHECK(rep.designs[2].protocol == "majority2");
    CHECK(rep.designs[2].overall_error == 0.0);
}

TEST_CASE("report layout") {
    const auto r = generate_patch_mosaic({150, 150, 3, 20.0, {1, 1, 1}, 4});
    const auto c = small_config();
    const auto rep = run_experiment(r, c);
    // points: 3 legends x 3 n; partitions: 2 binary legends x 3 k x 2 protocols + majority x 3 k.
    CHECK(rep.designs.size() == 9 + 12 + 3);
    CHECK(rep.designs[0].design == "points");
    CHECK(rep.designs[0].legend == "binary:1@0.1");
    const auto units0 = extract_units(r, 60).size();
    const auto sets = shifted_unit_sets(r, 60, c.shifts);
    std::size_t shifted_units = 0;
    for (const auto& s : sets) shifted_units += s.size();
    for (const auto& d : rep.designs) {
        CHECK(d.units.size() == (d.design == "points" ? units0 : shifted_units));
        for (const auto& u : d.units) {
            CHECK(u.error_rate >= 0.0);
            CHECK(u.error_rate <= 1.0);
            CHECK(u.pi >= 0.0);
            CHECK(u.erp <= 1.0);
        }
    }
    CHECK(rep.scalogram.size() == 3);
    for (const auto& cr : rep.curves) {
        CHECK((cr.metric == "erp") == (cr.legend == "majority"));
        CHECK(cr.curve.counts.size() == 20);
    }
}

TEST_CASE("point experiment agrees with the sampling distribution") {
    // Four 60 x 60 units whose forest shares straddle t = 0.5.
    const int side = 60;
    std::vector<ClassIndex> v(static_cast<std::size_t>(2 * side) * (2 * side), 0);
    const std::int64_t forest[4] = {1440, 1620, 1980, 2700};
    for (int u = 0; u < 4; ++u) {
        const int r0 = (u / 2) * side, c0 = (u % 2) * side;
        for (std::int64_t i = 0; i < forest[u]; ++i) {
            v[static_cast<std::size_t>(r0 + i / side) * (2 * side) + static_cast<std::size_t>(c0 + i % side)] = 1;
        }
    }
    CategoricalRaster r(2 * side, 2 * side, 1.0, 2, v);
    ExperimentConfig c;
    c.unit_side = side;
    c.legends = {Legend::binary({1}, 0.5)};
    c.designs = {PointBased{9}};
    c.realizations = 4000;
    c.master_seed = 5;
    const auto rep = run_point_experiment(r, c);
    REQUIRE(rep.designs.size() == 1);
    const auto& units = rep.designs[0].units;
    REQUIRE(units.size() == 4);
    for (int u = 0; u < 4; ++u) {
        const double expected = oracle::point_error_hypergeometric(forest[u], side * side, 0.5, 9);
        const double se = std::sqrt(expected * (1 - expected) / c.realizations);
        CHECK(std::abs(units[static_cast<std::size_t>(u)].error_rate - expected) <= 4 * se + 1e-12);
    }
}

TEST_CASE("parallel kernels match the serial reference") {
    const auto r = generate_smoothed_binary({200, 200, 6, 0.35, 8});
    auto c = small_config();
    c.legends = {Legend::binary({1}, 0.1), Legend::binary({1}, 0.5), Legend::binary({0, 1}, 0.75), Legend::majority()};
    check_same(run_point_experiment(r, c), reference::run_point_experiment(r, c));
    check_same(run_point_experiment(r, c, Execution::Serial), reference::run_point_experiment(r, c));
    check_same(run_partition_experiment(r, c), reference::run_partition_experiment(r, c));

    const auto m = generate_patch_mosaic({180, 180, 5, 30.0, {1, 2, 1, 1, 3}, 6});
    check_same(run_point_experiment(m, c), reference::run_point_experiment(m, c));
    check_same(run_partition_experiment(m, c), reference::run_partition_experiment(m, c));
    const auto sa = purity_scalogram(m, {10, 45, 90, 180});
    const auto sb = reference::purity_scalogram(m, {10, 45, 90, 180});
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        CHECK(sa[i].frac_purity_gt_090 == sb[i].frac_purity_gt_090);
        CHECK(sa[i].frac_purity_lt_050 == sb[i].frac_purity_lt_050);
    }
}

TEST_CASE("deterministic in the master seed") {
    const auto r = generate_patch_mosaic({120, 120, 3, 20.0, {1, 1, 1}, 3});
    auto c = small_config();
    const auto a = run_point_experiment(r, c);
    check_same(a, run_point_experiment(r, c));
    c.master_seed = 100;
    const auto b = run_point_experiment(r, c);
    bool differs = false;
    for (std::size_t i = 0; i < a.designs.size(); ++i) differs |= a.designs[i].units != b.designs[i].units;
    CHECK(differs);
}

TEST_CASE("partition realizations weigh equally") {
    const auto r = generate_patch_mosaic({150, 150, 2, 25.0, {1, 1}, 12});
    ExperimentConfig c;
    c.unit_side = 60;
    c.legends = {Legend::binary({1}, 0.5)};
    c.designs = {PartitionBased{3, Protocol::TTM}};
    c.shifts = {0, 45};
    const auto rep = run_partition_experiment(r, c);
    const auto& d = rep.designs.at(0);
    const auto sets = shifted_unit_sets(r, 60, c.shifts);
    std::vector<double> per(sets.size(), 0.0);
    std::size_t at = 0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (std::size_t u = 0; u < sets[s].size(); ++u) per[s] += d.units[at++].error_rate;
        per[s] /= static_cast<double>(sets[s].size());
    }
    double mean = 0.0;
    for (double p : per) mean += p / static_cast<double>(per.size());
    CHECK(d.overall_error == doctest::Approx(mean).epsilon(1e-14));
    double var = 0.0;
    for (double p : per) var += (p - mean) * (p - mean);
    var /= static_cast<double>(per.size() - 1);
    CHECK(d.stderr_error == doctest::Approx(std::sqrt(var / static_cast<double>(per.size()))).epsilon(1e-12));
}

TEST_CASE("purity scalogram") {
    // Left half class 0, right half class 1, split at column 60 of a 120 x 120 raster.
    std::vector<ClassIndex> v(14400, 0);
    for (int row = 0; row < 120; ++row)
        for (int col = 60; col < 120; ++col) v[static_cast<std::size_t>(row) * 120 + col] = 1;
    CategoricalRaster r(120, 120, 1.0, 2, v);
    const auto rows = purity_scalogram(r, {30, 40, 120});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].unit_side == 30);
    CHECK(rows[0].frac_purity_gt_090 == 1.0);
    // Side 40: the middle column of units straddles the split (20/40 split) giving purity 0.5, not < 0.5.
    CHECK(rows[1].frac_purity_gt_090 == doctest::Approx(6.0 / 9.0));
    CHECK(rows[1].frac_purity_lt_050 == 0.0);
    CHECK(rows[2].frac_purity_gt_090 == 0.0);

    // Three classes in equal thirds give majority purity 1/3 < 0.5.
    std::vector<ClassIndex> w(90 * 90);
    for (int row = 0; row < 90; ++row)
        for (int col = 0; col < 90; ++col) w[static_cast<std::size_t>(row) * 90 + col] = static_cast<ClassIndex>(col / 30);
    CategoricalRaster thirds(90, 90, 1.0, 3, w);
    CHECK(purity_scalogram(thirds, {90})[0].frac_purity_lt_050 == 1.0);
    CHECK_THROWS_AS(purity_scalogram(thirds, {91}), std::invalid_argument);
}

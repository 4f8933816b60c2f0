#include <set>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "sublab/generators.hpp"
#include "sublab/response_design.hpp"

using namespace sublab;

namespace {

// 12x12 binary raster with 25 forest cells: a full 4x4 cell plus a 3x3 block in the next cell.
CategoricalRaster compact_patch() {
    std::vector<ClassIndex> v(144, 0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) v[static_cast<std::size_t>(r) * 12 + c] = 1;
    for (int r = 0; r < 3; ++r)
        for (int c = 4; c < 7; ++c) v[static_cast<std::size_t>(r) * 12 + c] = 1;
    return CategoricalRaster(12, 12, 1.0, 2, v);
}

CategoricalRaster share_unit(int side, std::int64_t forest) {
    std::vector<ClassIndex> v(static_cast<std::size_t>(side) * side, 0);
    for (std::int64_t i = 0; i < forest; ++i) v[static_cast<std::size_t>(i)] = 1;
    return CategoricalRaster(side, side, 1.0, 2, v);
}

}  // namespace

TEST_CASE("protocol and design helpers") {
    CHECK(parse_protocol("TTM") == Protocol::TTM);
    CHECK(parse_protocol(protocol_name(Protocol::TwoStageMajority)) == Protocol::TwoStageMajority);
    CHECK_THROWS_AS(parse_protocol("MMT"), std::invalid_argument);
    CHECK(design_kind(PointBased{4}) == "points");
    CHECK(design_kind(PartitionBased{3, Protocol::MTT}) == "partition");
    CHECK(design_size(PartitionBased{12, Protocol::TTM}) == 12);
    CHECK(design_fits_legend(PointBased{4}, Legend::majority()));
    CHECK_FALSE(design_fits_legend(PartitionBased{2, Protocol::TTM}, Legend::majority()));
    CHECK_FALSE(design_fits_legend(PartitionBased{2, Protocol::TwoStageMajority}, Legend::binary({1}, 0.5)));
    for (int k : {2, 3, 4, 5, 6, 10, 12}) CHECK_NOTHROW(check_design(PartitionBased{k, Protocol::TTM}, 180));
    CHECK_THROWS_AS(check_design(PartitionBased{7, Protocol::TTM}, 180), std::invalid_argument);
    CHECK_THROWS_AS(check_design(PointBased{5}, 2), std::invalid_argument);
    CHECK_THROWS_AS(check_design(PointBased{0}, 2), std::invalid_argument);
}

TEST_CASE("point stream draws without replacement") {
    PointStream s(50, 3);
    std::set<std::size_t> seen;
    for (int i = 0; i < 50; ++i) seen.insert(s.next());
    CHECK(seen.size() == 50);
    CHECK(*seen.rbegin() == 49);
    CHECK_THROWS_AS(s.next(), std::out_of_range);

    PointStream a(1000, 9), b(1000, 9);
    for (int i = 0; i < 20; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("sample_points") {
    const auto r = generate_patch_mosaic({20, 20, 3, 100.0, {1, 1, 1}, 4});
    SamplingUnit unit(r, 2, 3, 15);
    SUBCASE("exhaustive draw is a permutation with true classes") {
        const auto pts = sample_points(unit, 225, 11);
        std::set<std::pair<int, int>> cells;
        for (const auto& p : pts) {
            cells.insert({p.row, p.col});
            CHECK(p.cls == unit.class_at(p.row, p.col));
        }
        CHECK(cells.size() == 225);
    }
    SUBCASE("uniform unit") {
        CategoricalRaster zero(6, 6, 1.0, 2, std::vector<ClassIndex>(36, 0));
        for (const auto& p : sample_points(SamplingUnit(zero, 0, 0, 6), 9, 1)) CHECK(p.cls == 0);
    }
    CHECK_THROWS_AS(sample_points(unit, 226, 1), std::invalid_argument);
    CHECK(sample_points(unit, 9, 5).size() == 9);
}

TEST_CASE("inclusion probability of a fixed cell") {
    CategoricalRaster r(180, 180, 1.0, 1, std::vector<ClassIndex>(32400, 0));
    SamplingUnit unit(r, 0, 0, 180);
    const int draws = 10000;
    std::vector<int> hits(4, 0);
    const std::pair<int, int> probes[] = {{0, 0}, {179, 179}, {90, 17}, {5, 150}};
    for (int d = 0; d < draws; ++d) {
        for (const auto& p : sample_points(unit, 9, derive_seed(123, {static_cast<std::uint64_t>(d)}))) {
            for (std::size_t i = 0; i < 4; ++i) hits[i] += p.row == probes[i].first && p.col == probes[i].second;
        }
    }
    // Pooling the probes keeps the check informative at this sample size.
    const double p = 9.0 / 32400.0;
    const double n = 4.0 * draws;
    const double total = hits[0] + hits[1] + hits[2] + hits[3];
    CHECK(std::abs(total / n - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("partition cells") {
    const auto r = generate_patch_mosaic({60, 60, 4, 30.0, {1, 1, 1, 1}, 8});
    SamplingUnit unit(r, 0, 0, 60);
    const auto k1 = partition_cells(unit, 1);
    REQUIRE(k1.size() == 1);
    CHECK(k1[0] == true_proportions(unit));

    const auto truth = true_proportions(unit);
    PartitionCounter counter(unit);
    for (int k : {2, 3, 4, 5, 6, 10, 12}) {
        const auto cells = partition_cells(unit, k);
        CHECK(cells.size() == static_cast<std::size_t>(k * k));
        const auto fast = counter.cells(k);
        REQUIRE(fast.size() == cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) CHECK(fast[i] == cells[i]);
        for (std::size_t c = 0; c < 4; ++c) {
            double mean = 0.0;
            for (const auto& cell : cells) mean += cell[c];
            CHECK(mean / (k * k) == doctest::Approx(truth[c]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(partition_cells(unit, 7), std::invalid_argument);
    CHECK_THROWS_AS(counter.cells(7), std::invalid_argument);

    // Row-major order.
    const auto patch = compact_patch();
    const auto cells = partition_cells(SamplingUnit(patch, 0, 0, 12), 3);
    CHECK(cells[0][1] == 1.0);
    CHECK(cells[1][1] == 0.5625);
    for (std::size_t i = 2; i < 9; ++i) CHECK(cells[i][1] == 0.0);
}

TEST_CASE("simulate_label") {
    SUBCASE("pure unit gives the true label for every design") {
        CategoricalRaster pure(12, 12, 1.0, 3, std::vector<ClassIndex>(144, 2));
        SamplingUnit u(pure, 0, 0, 12);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            CHECK(simulate_label(u, PointBased{9}, Legend::binary({2}, 0.5), seed).present());
            CHECK(simulate_label(u, PointBased{4}, Legend::majority(), seed).value == 2);
            CHECK(simulate_label(u, PartitionBased{3, Protocol::TTM}, Legend::binary({2}, 0.75), seed).present());
            CHECK(simulate_label(u, PartitionBased{4, Protocol::MTT}, Legend::binary({0}, 0.1), seed).value == 0);
            CHECK(simulate_label(u, PartitionBased{6, Protocol::TwoStageMajority}, Legend::majority(), seed).value == 2);
        }
    }
    SUBCASE("compact patch end to end") {
        const auto patch = compact_patch();
        SamplingUnit u(patch, 0, 0, 12);
        const auto legend = Legend::binary({1}, 0.1);
        CHECK(decide(true_proportions(u), legend).present());
        CHECK_FALSE(simulate_label(u, PartitionBased{3, Protocol::TTM}, legend, 0).present());
        CHECK(simulate_label(u, PartitionBased{3, Protocol::MTT}, legend, 0).present());
    }
    SUBCASE("legend mismatch") {
        const auto patch = compact_patch();
        SamplingUnit u(patch, 0, 0, 12);
        CHECK_THROWS_AS(simulate_label(u, PartitionBased{3, Protocol::TTM}, Legend::majority(), 0), std::invalid_argument);
        CHECK_THROWS_AS(simulate_label(u, PartitionBased{3, Protocol::TwoStageMajority}, Legend::binary({1}, 0.5), 0),
                        std::invalid_argument);
    }
    SUBCASE("point error rate follows the sampling distribution") {
        // 40 x 40 unit with 640 target cells: pi = 0.4.
        const auto r = share_unit(40, 640);
        SamplingUnit u(r, 0, 0, 40);
        const auto legend = Legend::binary({1}, 0.5);
        const int reps = 20000;
        int errors = 0;
        for (int i = 0; i < reps; ++i) errors += simulate_label(u, PointBased{4}, legend, derive_seed(5, {static_cast<std::uint64_t>(i)})).present();
        const double expected = oracle::point_error_hypergeometric(640, 1600, 0.5, 4);
        const double se = std::sqrt(expected * (1 - expected) / reps);
        CHECK(std::abs(static_cast<double>(errors) / reps - expected) < 4 * se);
    }
}

TEST_CASE("shifted unit sets") {
    const auto r = generate_patch_mosaic({400, 400, 2, 5.0, {1, 1}, 1});
    const auto sets = shifted_unit_sets(r, 180);
    CHECK(sets.size() == 36);
    for (const auto& set : sets) {
        CHECK_FALSE(set.empty());
        for (const auto& u : set) {
            CHECK(u.origin_row() + u.side() <= r.height());
            CHECK(u.origin_col() + u.side() <= r.width());
        }
    }
    CHECK(sets[1].front().origin_row() == 22);
    CHECK(sets[1].front().origin_col() == 33);
    CHECK(sets[6].front().origin_row() == 33);

    const auto identity = shifted_unit_sets(r, 180, {0});
    REQUIRE(identity.size() == 1);
    const auto base = extract_units(r, 180);
    REQUIRE(identity[0].size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(identity[0][i].origin_row() == base[i].origin_row());
        CHECK(identity[0][i].origin_col() == base[i].origin_col());
    }
    CHECK_THROWS_AS(shifted_unit_sets(r, 390), std::invalid_argument);
}

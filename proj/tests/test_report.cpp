#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "sublab/generators.hpp"
#include "sublab/harness.hpp"
#include "sublab/report.hpp"
#include "sublab/text.hpp"

using namespace sublab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("sublab_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

bool same_number(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

// Minimal well-formedness check: balanced, properly nested tags.
bool well_formed_xml(const std::string& text) {
    std::vector<std::string> stack;
    const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)([^>]*?)(/?)>)");
    std::size_t pos = text.find("<svg");
    if (pos == std::string::npos) return false;
    const std::string body = text.substr(pos);
    for (auto it = std::sregex_iterator(body.begin(), body.end(), tag); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        const std::string name = m[2];
        if (m[1] == "/") {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (m[4] != "/") {
            stack.push_back(name);
        }
        // Attribute quotes must balance.
        const std::string attrs = m[3];
        if (std::count(attrs.begin(), attrs.end(), '"') % 2) return false;
    }
    return stack.empty();
}

ErrorReport sample_report() {
    const auto r = generate_patch_mosaic({150, 150, 3, 20.0, {1, 1, 1}, 4});
    ExperimentConfig c;
    c.unit_side = 50;
    c.legends = {Legend::binary({1}, 0.5), Legend::binary({0, 2}, 0.1), Legend::majority()};
    c.designs = {PointBased{4}, PointBased{16}, PartitionBased{5, Protocol::TTM}, PartitionBased{5, Protocol::MTT},
                 PartitionBased{2, Protocol::TwoStageMajority}};
    c.realizations = 5;
    c.shifts = {0, 30};
    c.scalogram_sides = {10, 50};
    return run_experiment(r, c);
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 2.5e-17, 123456.789}) {
        double back = -1.0;
        REQUIRE(parse_number(format_number(v), back));
        CHECK(back == v);
    }
    double x = 0.0;
    CHECK_FALSE(parse_number("1.5abc", x));
    CHECK_FALSE(parse_number("", x));
}

TEST_CASE("csv headers") {
    const ErrorReport empty;
    CHECK(errors_by_design_csv(empty) == "legend,design,protocol,n_or_k,overall_error,stderr\n");
    CHECK(errors_by_unit_csv(empty) == "unit_row,unit_col,pi,erp,legend,design,n_or_k,error_rate\n");
    CHECK(curves_csv(empty) == "metric,bin_center,mean_error,count,legend,design,n_or_k\n");
    CHECK(scalogram_csv({}) == "unit_side,frac_purity_gt_090,frac_purity_lt_050\n");
    CHECK(optimization_csv(OptimizationReport{}) == "unit_row,unit_col,metric,mean_n,error_rate,cap_hit_fraction\n");
}

TEST_CASE("empty design grid writes header-only csv files") {
    TempDir dir("empty");
    const auto written = write_report(ErrorReport{}, dir.path);
    CHECK(written.size() == 4);
    for (const char* name : {"errors_by_design.csv", "errors_by_unit.csv", "curves.csv", "scalogram.csv"}) {
        const std::string text = slurp(dir.path / name);
        CHECK(std::count(text.begin(), text.end(), '\n') == 1);
    }
}

TEST_CASE("csv round trip") {
    TempDir dir("roundtrip");
    const auto rep = sample_report();
    write_report(rep, dir.path);
    for (const auto& e : fs::directory_iterator(dir.path)) CHECK(e.path().extension() != ".tmp");
    const auto back = read_report(dir.path);

    REQUIRE(back.designs.size() == rep.designs.size());
    for (std::size_t i = 0; i < rep.designs.size(); ++i) {
        const auto& a = rep.designs[i];
        const auto& b = back.designs[i];
        CHECK(a.legend == b.legend);
        CHECK(a.design == b.design);
        CHECK(a.protocol == b.protocol);
        CHECK(a.n_or_k == b.n_or_k);
        CHECK(a.overall_error == b.overall_error);
        CHECK(a.stderr_error == b.stderr_error);
        CHECK(a.units == b.units);
    }
    REQUIRE(back.curves.size() == rep.curves.size());
    for (std::size_t i = 0; i < rep.curves.size(); ++i) {
        const auto& a = rep.curves[i];
        const auto& b = back.curves[i];
        CHECK(a.metric == b.metric);
        CHECK(a.legend == b.legend);
        CHECK(a.design == b.design);
        CHECK(a.n_or_k == b.n_or_k);
        CHECK(a.curve.counts == b.curve.counts);
        REQUIRE(a.curve.bin_centers.size() == b.curve.bin_centers.size());
        for (std::size_t k = 0; k < a.curve.bin_centers.size(); ++k) {
            CHECK(a.curve.bin_centers[k] == b.curve.bin_centers[k]);
            CHECK(same_number(a.curve.mean_error[k], b.curve.mean_error[k]));
        }
    }
    REQUIRE(back.scalogram.size() == rep.scalogram.size());
    for (std::size_t i = 0; i < rep.scalogram.size(); ++i) {
        CHECK(back.scalogram[i].unit_side == rep.scalogram[i].unit_side);
        CHECK(back.scalogram[i].frac_purity_gt_090 == rep.scalogram[i].frac_purity_gt_090);
        CHECK(back.scalogram[i].frac_purity_lt_050 == rep.scalogram[i].frac_purity_lt_050);
    }
    // The series label stands in for the missing protocol column.
    CHECK(first_line(dir.path / "curves.csv") == "metric,bin_center,mean_error,count,legend,design,n_or_k");
    CHECK(slurp(dir.path / "curves.csv").find(",partition/TTM,5\n") != std::string::npos);
}

TEST_CASE("one svg per curve family, one polyline per series") {
    TempDir dir("svg");
    const auto rep = sample_report();
    const auto written = write_report(rep, dir.path);
    std::map<std::string, int> series;
    for (const auto& c : rep.curves) ++series["curves_" + c.metric];
    int svg_files = 0;
    for (const auto& p : written) {
        if (p.extension() != ".svg") continue;
        ++svg_files;
        const std::string text = slurp(p);
        CHECK(well_formed_xml(text));
        int polylines = 0;
        for (std::size_t at = text.find("<polyline"); at != std::string::npos; at = text.find("<polyline", at + 1)) ++polylines;
        // Point families carry two series here (n = 4, 16); partition families one (k = 5 or 2).
        const bool points = p.filename().string().find("_points") != std::string::npos;
        CHECK(polylines == (points ? 2 : 1));
    }
    // binary legends: points, TTM, MTT each; majority: points and majority2.
    CHECK(svg_files == 2 * 3 + 2);
    CHECK(fs::exists(dir.path / "curves_pi_binary_1_0.5_points.svg"));
    CHECK(fs::exists(dir.path / "curves_erp_majority_partition_majority2.svg"));
}

TEST_CASE("atomic writes replace whole files") {
    TempDir dir("atomic");
    const fs::path p = dir.path / "a.txt";
    write_file_atomic(p, "first\n");
    write_file_atomic(p, "second\n");
    CHECK(slurp(p) == "second\n");
    CHECK_FALSE(fs::exists(dir.path / "a.txt.tmp"));
    CHECK_THROWS(write_file_atomic(dir.path / "missing" / "b.txt", "x"));
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "curvseg/synthcorpus.hpp"

using namespace curvseg;

namespace {

void check_case_invariants(const ControlCase& c) {
    CAPTURE(c.name);
    CHECK(c.image.width() <= 64);
    CHECK(c.image.height() <= 64);
    CHECK(c.ground_truth.width == c.image.width());
    CHECK(c.seeds.width() == c.image.width());
    CHECK(c.seeds.height() == c.image.height());
    CHECK(c.seeds.count(Seed::Foreground) > 0);
    CHECK(c.seeds.count(Seed::Background) > 0);
    for (int r = 0; r < c.image.height(); ++r) {
        for (int col = 0; col < c.image.width(); ++col) {
            const auto s = c.seeds.at(r, col);
            if (s == Seed::Foreground) {
                CHECK(c.ground_truth.at(r, col) == 1);
            }
            if (s == Seed::Background) {
                CHECK(c.ground_truth.at(r, col) == 0);
            }
        }
    }
}

}  // namespace

TEST_CASE("bar") {
    const auto c = gen_bar(40, 20, 30, 4);
    check_case_invariants(c);
    CHECK(c.ground_truth.count() == 120);
    CHECK_THROWS(gen_bar(40, 20, 41, 4));
    CHECK_THROWS(gen_bar(40, 20, 30, 19));
    // FG seeds sit inside the bar, within the first 20% of its length.
    int first_col = 40;
    for (int col = 0; col < 40 && first_col == 40; ++col) {
        for (int r = 0; r < 20; ++r) {
            if (c.ground_truth.at(r, col)) {
                first_col = col;
                break;
            }
        }
    }
    int fg = 0;
    for (int r = 0; r < 20; ++r) {
        for (int col = 0; col < 40; ++col) {
            if (c.seeds.at(r, col) == Seed::Foreground) {
                ++fg;
                CHECK(col < first_col + 6);
            }
        }
    }
    CHECK(fg >= 1);
    // The bar ends mid-image: background to its right.
    CHECK(c.image.at(10, 36) == 0.0);
    CHECK(c.image.at(10, 34) == 1.0);
}

TEST_CASE("dotted outline") {
    const auto c = gen_dotted_outline(OutlineShape::Circle, 3, 4);
    check_case_invariants(c);
    CHECK(c.image.width() == 40);
    const auto solid = gen_dotted_outline(OutlineShape::Circle, 0, 4);
    std::size_t dotted_pixels = 0;
    std::size_t solid_pixels = 0;
    std::set<double> levels;
    for (NodeId i = 0; i < static_cast<NodeId>(c.image.size()); ++i) {
        dotted_pixels += c.image[i] > 0 ? 1 : 0;
        solid_pixels += solid.image[i] > 0 ? 1 : 0;
        levels.insert(c.image[i]);
    }
    CHECK(dotted_pixels < solid_pixels);
    // Inside and outside share one intensity; only the outline differs.
    CHECK(levels == std::set<double>{0.0, 1.0});
    CHECK(c.image.at(20, 20) == c.image.at(1, 1));
    // Ground truth is the filled disk.
    CHECK(c.ground_truth.at(20, 20) == 1);
    CHECK(c.ground_truth.at(20, 33) == 0);
    CHECK(c.ground_truth.at(20, 32) == 1);
    CHECK_THROWS(gen_dotted_outline(OutlineShape::Circle, -1, 4));
    CHECK_THROWS(gen_dotted_outline(OutlineShape::Circle, 3, 0));
    check_case_invariants(gen_dotted_outline(OutlineShape::Polygon, 3, 4));
}

TEST_CASE("circle with bump") {
    const auto c = gen_circle_bump(15, 5);
    check_case_invariants(c);
    CHECK(c.image.width() == 48);
    std::size_t bump = 0;
    for (std::size_t i = 0; i < c.excluded.values.size(); ++i) {
        if (c.excluded.values[i]) {
            ++bump;
            CHECK(c.ground_truth.values[i] == 0);
            CHECK(c.image[static_cast<NodeId>(i)] == 1.0);
        }
        if (c.ground_truth.values[i]) {
            CHECK(c.image[static_cast<NodeId>(i)] == 1.0);
        }
    }
    CHECK(bump > 0);
    CHECK_THROWS(gen_circle_bump(5, 5));
    CHECK_THROWS(gen_circle_bump(5, 8));
}

TEST_CASE("corner shapes") {
    for (const double angle : {30.0, 45.0, 90.0}) {
        const auto c = gen_corner_shape(angle);
        check_case_invariants(c);
        REQUIRE(c.apex.has_value());
        CHECK(c.ground_truth.at(c.apex->row, c.apex->col) == 1);
        // Full contrast across the boundary.
        CHECK(c.image.at(c.apex->row, c.apex->col) == 1.0);
        CHECK(c.image.at(c.apex->row, c.apex->col - 1) == 0.0);
    }
    const auto narrow = gen_corner_shape(30.0);
    const auto wide = gen_corner_shape(90.0);
    CHECK(narrow.ground_truth.count() < wide.ground_truth.count());
    CHECK_THROWS(gen_corner_shape(10.0));
    CHECK_THROWS(gen_corner_shape(170.0));
}

TEST_CASE("default corpus and export") {
    const auto cases = default_corpus();
    std::set<std::string> names;
    for (const auto& c : cases) {
        check_case_invariants(c);
        names.insert(c.name);
    }
    for (const auto* required : {"bar", "dotted_circle", "circle_bump", "corner_90", "corner_45"}) {
        CHECK(names.count(required) == 1);
    }
    CHECK(find_case("bar").has_value());
    CHECK_FALSE(find_case("nope").has_value());

    const auto dir = std::filesystem::temp_directory_path() / "curvseg_corpus_test";
    std::filesystem::remove_all(dir);
    export_corpus(dir, cases);
    for (const auto& c : cases) {
        const auto img = load_image(dir / c.name / "image.pgm");
        CHECK(to_raster(img).pixels == to_raster(c.image).pixels);
        const auto seeds = load_seeds(dir / c.name / "seeds.pgm");
        CHECK(std::equal(seeds.labels().begin(), seeds.labels().end(), c.seeds.labels().begin()));
        CHECK(mask_from_raster(read_pgm(dir / c.name / "truth.pgm")) == c.ground_truth);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("brute-force oracle") {
    SUBCASE("zero energy ties break to all zeros") {
        const auto r = brute_force_optimum(Energy(5));
        CHECK(r.labeling == std::vector<std::uint8_t>(5, 0));
        CHECK(r.energy == 0.0);
    }
    SUBCASE("lexicographic tie break") {
        Energy e(2);
        e.add_pairwise(0, 1, {1, 0, 0, 1});  // (0,1) and (1,0) tie
        CHECK(brute_force_optimum(e).labeling == std::vector<std::uint8_t>{0, 1});
        CHECK(brute_force_argmin_set(e).size() == 2);
    }
    SUBCASE("size limits") {
        CHECK_THROWS(brute_force_optimum(Energy(25)));
        CHECK_THROWS(brute_force_argmin_set(Energy(21)));
    }
}

TEST_CASE("8-connected components") {
    BinaryMask m(4, 4);
    m.at(0, 0) = 1;
    m.at(1, 1) = 1;  // diagonal neighbor: same component
    m.at(3, 3) = 1;
    CHECK(count_components8(m) == 2);
    CHECK(count_components8(BinaryMask(3, 3)) == 0);
}

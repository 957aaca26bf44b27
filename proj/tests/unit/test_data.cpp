#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hsic/data.hpp"
#include "hsic/rng.hpp"

using namespace hsic;

namespace {

HsiCube ramp_cube(std::size_t h, std::size_t w, std::size_t d) {
    HsiCube cube(h, w, d);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            for (std::size_t b = 0; b < d; ++b) cube.at(r, c, b) = 1000.0 * b + 10.0 * r + c;
    return cube;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("cube and label validation") {
    CHECK_THROWS(HsiCube(0, 1, 1));
    CHECK_THROWS(HsiCube(1, 1, 1, {std::numeric_limits<double>::quiet_NaN()}));
    CHECK_THROWS(HsiCube(2, 2, 1, {1.0, 2.0}));
    CHECK_THROWS(LabelMap(1, 2, 2, {1, 3}));
    CHECK_THROWS(LabelMap(1, 2, 2, {-1, 1}));
    LabelMap m(1, 2, 2, {1, 0});
    CHECK_FALSE(m.fully_labeled());
    m[1] = 2;
    CHECK(m.fully_labeled());
}

TEST_CASE("interior patch is the exact window") {
    const HsiCube cube = ramp_cube(5, 5, 1);
    const Patch p = extract_patch(cube, 2, 2, 3);
    for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t v = 0; v < 3; ++v) CHECK(p.at(u, v, 0) == cube.at(1 + u, 1 + v, 0));
}

TEST_CASE("corner patch mirrors without repeating the border") {
    HsiCube cube(3, 3, 1);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) cube.at(r, c, 0) = 3.0 * r + c;
    const Patch p = extract_patch(cube, 0, 0, 3);
    CHECK(p.at(0, 0, 0) == 4.0);
    CHECK(p.at(0, 1, 0) == 3.0);
    CHECK(p.at(1, 0, 0) == 1.0);
    CHECK(p.at(1, 1, 0) == 0.0);
}

TEST_CASE("single pixel cube fills the whole patch") {
    const HsiCube cube(1, 1, 3, {0.25, 0.5, 0.75});
    const Patch p = extract_patch(cube, 0, 0, 3);
    for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t v = 0; v < 3; ++v)
            for (std::size_t b = 0; b < 3; ++b) CHECK(p.at(u, v, b) == cube.at(0, 0, b));
}

TEST_CASE("patch argument errors") {
    const HsiCube cube = ramp_cube(4, 4, 2);
    CHECK_THROWS_AS(extract_patch(cube, 0, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(extract_patch(cube, 4, 0, 3), std::invalid_argument);
    CHECK_THROWS_AS(extract_patch(cube, 0, 4, 3), std::invalid_argument);
}

TEST_CASE("reflect_index folds repeatedly") {
    // extent 3: ... 2 1 | 0 1 2 | 1 0 1 2 ...
    const std::vector<std::pair<std::ptrdiff_t, std::size_t>> cases = {{-1, 1}, {-2, 2}, {-3, 1}, {-4, 0}, {3, 1}, {4, 0}, {5, 1}, {6, 2}};
    for (const auto& [i, want] : cases) CHECK(reflect_index(i, 3) == want);
    CHECK(reflect_index(-7, 1) == 0);
    CHECK(reflect_index(9, 1) == 0);
}

TEST_CASE("property: interior patches equal sub-arrays for every k") {
    const HsiCube cube = ramp_cube(9, 11, 2);
    for (std::size_t k : {1u, 3u, 5u, 7u, 9u}) {
        const std::size_t half = k / 2;
        for (std::size_t r = half; r + half < cube.height(); ++r)
            for (std::size_t c = half; c + half < cube.width(); ++c) {
                const Patch p = extract_patch(cube, r, c, k);
                bool same = true;
                for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v)
                        for (std::size_t b = 0; b < 2; ++b) same = same && p.at(u, v, b) == cube.at(r - half + u, c - half + v, b);
                CHECK(same);
            }
    }
}

TEST_CASE("mirror_pad agrees with extract_patch at every pixel") {
    const HsiCube cube = ramp_cube(4, 3, 2);
    const std::size_t k = 7;
    const HsiCube padded = mirror_pad(cube, k / 2);
    std::size_t patches = 0;
    for (std::size_t r = 0; r < cube.height(); ++r)
        for (std::size_t c = 0; c < cube.width(); ++c) {
            const Patch p = extract_patch(cube, r, c, k);
            for (std::size_t u = 0; u < k; ++u)
                for (std::size_t v = 0; v < k; ++v)
                    for (std::size_t b = 0; b < 2; ++b) REQUIRE(p.at(u, v, b) == padded.at(r + u, c + v, b));
            ++patches;
        }
    CHECK(patches == cube.pixels());
}

TEST_CASE("split sizes follow the rounding rule") {
    // class 1: 46 pixels, class 2: 20 pixels
    std::vector<int> labels(46, 1);
    labels.insert(labels.end(), 20, 2);
    labels.insert(labels.end(), 4, 0);
    const LabelMap truth(7, 10, 2, labels);
    const auto [train, test] = stratified_split(truth, SplitFraction{0.10}, 3);
    CHECK(train.class_counts[1] == 5);
    CHECK(test.class_counts[1] == 41);
    CHECK(train.class_counts[2] == 2);
    CHECK(test.class_counts[2] == 18);

    const auto [train_c, test_c] = stratified_split(truth, SplitCount{30}, 3);
    CHECK(train_c.class_counts[1] == 30);
    CHECK(train_c.class_counts[2] == 20);
    CHECK(test_c.class_counts[2] == 0);
}

TEST_CASE("split keeps at least one sample per class") {
    const LabelMap truth(1, 5, 2, {1, 1, 1, 1, 2});
    const auto [train, test] = stratified_split(truth, SplitFraction{0.01}, 0);
    CHECK(train.class_counts[1] == 1);
    CHECK(train.class_counts[2] == 1);
}

TEST_CASE("property: split is a deterministic partition of the labeled pixels") {
    std::vector<int> labels(200);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>((i * 7 + i / 13) % 4);
    const LabelMap truth(10, 20, 3, labels);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto [train, test] = stratified_split(truth, SplitFraction{0.2}, seed);
        std::set<std::size_t> seen;
        for (const auto* set : {&train, &test})
            for (const auto& s : set->samples) {
                CHECK(seen.insert(s.pixel).second);
                CHECK(s.label == truth[s.pixel]);
                CHECK(s.label != 0);
            }
        std::size_t labeled = 0;
        for (int y : labels) labeled += y != 0;
        CHECK(seen.size() == labeled);
        std::size_t total = 0;
        for (std::size_t k = 1; k < train.class_counts.size(); ++k) total += train.class_counts[k];
        CHECK(total == train.size());

        const auto again = stratified_split(truth, SplitFraction{0.2}, seed);
        CHECK(again.first.samples == train.samples);
        CHECK(again.second.samples == test.samples);
    }
    const auto a = stratified_split(truth, SplitFraction{0.2}, 1).first;
    const auto b = stratified_split(truth, SplitFraction{0.2}, 2).first;
    CHECK(a.class_counts == b.class_counts);
    CHECK(a.samples != b.samples);
}

TEST_CASE("split rejects an empty class and names it") {
    const LabelMap truth(1, 3, 3, {1, 1, 3});
    try {
        stratified_split(truth, SplitFraction{0.5}, 0);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("class 2") != std::string::npos);
    }
}

TEST_CASE("normalize_bands") {
    const HsiCube a(3, 1, 1, {2, 4, 6});
    const HsiCube na = normalize_bands(a);
    CHECK(na.values() == std::vector<double>{0.0, 0.5, 1.0});
    const HsiCube b(2, 1, 1, {5, 5});
    CHECK(normalize_bands(b).values() == std::vector<double>{0.0, 0.0});
    const HsiCube c(2, 1, 2, {0, -1, 10, 1});
    CHECK(normalize_bands(c).values() == std::vector<double>{0.0, 0.0, 1.0, 1.0});
}

TEST_CASE("standardize_bands") {
    const HsiCube a(4, 1, 1, {1, 3, 5, 7});
    const auto sa = standardize_bands(a).values();
    const double sd = std::sqrt(5.0);
    CHECK(sa[0] == doctest::Approx(-3.0 / sd));
    CHECK(sa[3] == doctest::Approx(3.0 / sd));
    CHECK(standardize_bands(HsiCube(2, 1, 1, {5, 5})).values() == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(standardize_bands(HsiCube(1, 1, 1, {std::numeric_limits<double>::quiet_NaN()})), std::invalid_argument);
}

TEST_CASE("standardize_bands gives zero mean and unit variance per band") {
    Rng rng = make_rng(5, 1);
    std::vector<double> v(30 * 4);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 100.0 * static_cast<double>(i % 4) + 7.0 * unit_double(rng());
    const HsiCube out = standardize_bands(HsiCube(6, 5, 4, v));
    for (std::size_t b = 0; b < 4; ++b) {
        double m = 0.0, q = 0.0;
        for (std::size_t i = 0; i < 30; ++i) m += out.spectrum(i)[b];
        m /= 30.0;
        for (std::size_t i = 0; i < 30; ++i) q += (out.spectrum(i)[b] - m) * (out.spectrum(i)[b] - m);
        CHECK(std::abs(m) < 1e-12);
        CHECK(q / 30.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ProbMap argmax ties go to the smaller class") {
    const ProbMap p(2, 3, {0.4, 0.4, 0.2, 0.1, 0.3, 0.6});
    const LabelMap y = p.argmax(1, 2);
    CHECK(y[0] == 1);
    CHECK(y[1] == 3);
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS(ProbMap(1, 2, {0.7, 0.7}).validate());
}

}

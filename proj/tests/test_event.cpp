#include <doctest.h>

#include <random>

#include "contrastbnb/event.hpp"
#include "contrastbnb/motion.hpp"

using namespace cbnb;

namespace {

Eigen::Vector2d identity_warp(const Eigen::Vector2d& x, double) { return x; }

}  // namespace

TEST_CASE("round_to_accumulator rounds to nearest, ties toward +inf") {
    GridSpec spec;
    auto p = round_to_accumulator({10.4, 20.6}, spec);
    REQUIRE(p.has_value());
    CHECK(p->x() == 10);
    CHECK(p->y() == 21);

    p = round_to_accumulator({10.5, 20.5}, spec);
    REQUIRE(p.has_value());
    CHECK(p->x() == 11);
    CHECK(p->y() == 21);

    CHECK(!round_to_accumulator({-3.0, 5.0}, spec).has_value());
    CHECK(!round_to_accumulator({-0.51, 5.0}, spec).has_value());
    CHECK(round_to_accumulator({-0.49, 5.0}, spec).has_value());
}

TEST_CASE("round_to_accumulator uses the padded range") {
    GridSpec spec;
    spec.pad_left = 3;
    spec.pad_top = 2;
    auto p = round_to_accumulator({-3.0, -2.0}, spec);
    REQUIRE(p.has_value());
    CHECK(p->x() == -3);
    CHECK(p->y() == -2);
    CHECK(!round_to_accumulator({-3.6, 0.0}, spec).has_value());
}

TEST_CASE("build_iwe on an empty window is all zero") {
    GridSpec spec;
    EventWindow window;
    const AccumulatorGrid grid = build_iwe(window, identity_warp, spec);
    CHECK(grid.total() == 0);
    CHECK(grid.counts().sum() == 0);
}

TEST_CASE("build_iwe single event with identity warp") {
    GridSpec spec;
    EventWindow window;
    window.events.push_back({100.0, 50.0, 0.0, 1});
    const AccumulatorGrid grid = build_iwe(window, identity_warp, spec);
    CHECK(grid.total() == 1);
    CHECK(grid.at(100, 50) == 1);
}

TEST_CASE("build_iwe conserves events and matches per-event rounding") {
    GridSpec spec;
    spec.pad_left = spec.pad_right = spec.pad_top = spec.pad_bottom = 10;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> px(0.0, 345.0);
    std::uniform_real_distribution<double> py(0.0, 259.0);

    EventWindow window;
    for (int i = 0; i < 500; ++i) {
        window.events.push_back({px(rng), py(rng), i * 1e-4, 1});
    }
    const auto shift = [](const Eigen::Vector2d& x, double t) {
        return Eigen::Vector2d(x.x() + 30.0 * t, x.y() - 20.0 * t);
    };
    const AccumulatorGrid grid = build_iwe(window, shift, spec);
    CHECK(grid.total() == 500);
    CHECK(grid.counts().sum() == 500);

    AccumulatorGrid manual(spec);
    for (const Event& e : window.events) {
        const auto p = round_to_accumulator(shift(Eigen::Vector2d(e.x, e.y), e.t), spec);
        REQUIRE(p.has_value());
        manual.increment(p->x(), p->y());
    }
    CHECK(grid.counts() == manual.counts());

    // identical inputs, identical grids
    const AccumulatorGrid again = build_iwe(window, shift, spec);
    CHECK(grid.counts() == again.counts());
}

TEST_CASE("slice_windows splits on half-open dt boundaries") {
    std::vector<Event> stream;
    SUBCASE("two events in separate windows") {
        stream.push_back({0, 0, 0.01, 1});
        stream.push_back({0, 0, 0.05, 1});
        const auto windows = slice_windows(stream, 0.04);
        REQUIRE(windows.size() == 2);
        CHECK(windows[0].events.size() == 1);
        CHECK(windows[1].events.size() == 1);
        CHECK(windows[0].t_ref == doctest::Approx(0.0));
        CHECK(windows[1].t_ref == doctest::Approx(0.04));
    }
    SUBCASE("two events in one window") {
        stream.push_back({0, 0, 0.00, 1});
        stream.push_back({0, 0, 0.039, 1});
        const auto windows = slice_windows(stream, 0.04);
        REQUIRE(windows.size() == 1);
        CHECK(windows[0].events.size() == 2);
    }
    SUBCASE("empty stream") {
        CHECK(slice_windows(stream, 0.04).empty());
    }
    SUBCASE("uniform stream") {
        for (int i = 0; i < 10000; ++i) {
            stream.push_back({0, 0, 0.4 * (i + 0.5) / 10000.0, 1});
        }
        const auto windows = slice_windows(stream, 0.04);
        REQUIRE(windows.size() == 10);
        for (const auto& w : windows) CHECK(w.events.size() == 1000);
    }
}

TEST_CASE("mean_intensity is N / N_p") {
    GridSpec spec;
    CHECK(mean_intensity(0, spec) == 0.0);
    CHECK(mean_intensity(spec.total_cells(), spec) == doctest::Approx(1.0));
    CHECK(mean_intensity(1000, spec) == doctest::Approx(1000.0 / 89960.0));
}

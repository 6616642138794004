#include <doctest.h>

#include "netact/dtw.hpp"
#include "netact/rng.hpp"
#include "support/oracles.hpp"

using namespace netact;
using netact::testing::dtw_enumerate_oracle;

namespace {

ByteSeries random_series(Rng& rng, size_t min_len, size_t max_len, int32_t max_abs) {
    size_t len = min_len + rng.next_below(max_len - min_len + 1);
    ByteSeries s(len);
    for (auto& v : s) {
        v = static_cast<int32_t>(rng.next_int(-max_abs, max_abs));
    }
    return s;
}

}  // namespace

TEST_CASE("dtw_cost identity and single-cell paths") {
    CHECK(dtw_cost({5}, {9}) == 4);
    CHECK(dtw_cost({9}, {5}) == 4);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        ByteSeries s = random_series(rng, 1, 10, 1600);
        CHECK(dtw_cost(s, s) == 0);
    }
}

TEST_CASE("dtw_cost matches exhaustive enumeration on the frozen pair") {
    ByteSeries x = {282, 188};
    ByteSeries y = {282, 188, 692};
    CHECK(dtw_enumerate_oracle(x, y) == 504);
    CHECK(dtw_cost(x, y) == 504);
}

TEST_CASE("enumeration oracle fixed points") {
    CHECK(dtw_enumerate_oracle({5}, {9}) == 4);
    Rng rng(31);
    for (int i = 0; i < 10; ++i) {
        ByteSeries s = random_series(rng, 1, 6, 1600);
        CHECK(dtw_enumerate_oracle(s, s) == 0);
    }
}

TEST_CASE("dtw_cost empty-series conventions") {
    CHECK(dtw_cost({}, {}) == 0);
    CHECK(dtw_cost({}, {100, -200, 50}) == 350);
    CHECK(dtw_cost({100, -200, 50}, {}) == 350);
}

TEST_CASE("dtw_cost symmetry and non-negativity") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        ByteSeries x = random_series(rng, 1, 12, 1600);
        ByteSeries y = random_series(rng, 1, 12, 1600);
        int64_t xy = dtw_cost(x, y);
        CHECK(xy >= 0);
        CHECK(xy == dtw_cost(y, x));
    }
}

TEST_CASE("dtw_cost local cost is the absolute difference") {
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        int32_t a = static_cast<int32_t>(rng.next_int(-1600, 1600));
        int32_t b = static_cast<int32_t>(rng.next_int(-1600, 1600));
        CHECK(dtw_cost({a}, {b}) == std::abs(static_cast<int64_t>(a) - b));
    }
}

TEST_CASE("dtw_cost equals path enumeration on random short series") {
    Rng rng(29);
    for (int i = 0; i < 300; ++i) {
        ByteSeries x = random_series(rng, 1, 6, 1600);
        ByteSeries y = random_series(rng, 1, 6, 1600);
        CHECK(dtw_cost(x, y) == dtw_enumerate_oracle(x, y));
    }
}

TEST_CASE("enumeration oracle rejects oversized inputs") {
    ByteSeries seven(7, 1);
    CHECK_THROWS_AS(dtw_enumerate_oracle(seven, seven), std::invalid_argument);
}

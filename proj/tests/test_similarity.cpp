#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tmc/pipeline.hpp"
#include "tmc/similarity.hpp"

using namespace tmc;
using testutil::make_trajectory;

namespace {
const SimilarityConfig kDefaults{};
}

TEST_CASE("directed Hausdorff basics") {
    const Trajectory a = make_trajectory("a", {{0, 0}, {10, 0}});
    CHECK(directed_hausdorff(a, a) == 0.0);

    const Trajectory p = make_trajectory("p", {{0, 0}});
    const Trajectory q = make_trajectory("q", {{3, 4}});
    CHECK(directed_hausdorff(p, q) == 5.0);

    // Values frozen from the brute-force oracle.
    const Trajectory b = make_trajectory("b", {{0, 2}});
    CHECK(oracle::directed_hausdorff(a, b) == doctest::Approx(std::sqrt(104.0)).epsilon(1e-15));
    CHECK(oracle::directed_hausdorff(b, a) == 2.0);
    CHECK(directed_hausdorff(a, b) == doctest::Approx(std::sqrt(104.0)).epsilon(1e-15));
    CHECK(directed_hausdorff(b, a) == 2.0);

    CHECK_THROWS(directed_hausdorff(Trajectory{"e", {}}, a));
}

TEST_CASE("directed Hausdorff equals the brute-force oracle exactly") {
    SplitMix64 rng(21);
    for (int it = 0; it < 200; ++it) {
        const Trajectory p = testutil::random_trajectory(rng, "p");
        const Trajectory q = testutil::random_trajectory(rng, "q");
        CHECK(directed_hausdorff(p, q) == oracle::directed_hausdorff(p, q));
    }
}

TEST_CASE("distance similarity takes the smaller directed distance") {
    const Trajectory a = make_trajectory("a", {{0, 0}, {10, 0}});
    const Trajectory b = make_trajectory("b", {{0, 2}});
    CHECK(distance_similarity(a, b) == 2.0);
    CHECK(distance_similarity(b, a) == 2.0);
    CHECK(distance_similarity(a, a) == 0.0);

    // A fragment of a track is at distance zero from it.
    const Trajectory full = make_trajectory("f", {{0, 0}, {1, 3}, {2, 6}, {3, 9}});
    const Trajectory half = make_trajectory("h", {{0, 0}, {1, 3}});
    CHECK(distance_similarity(full, half) == 0.0);
}

TEST_CASE("angle difference uses the matched segment of the other trajectory") {
    const Trajectory i = make_trajectory("i", {{0, 0}, {0, 5}, {0, 10}});
    const Trajectory j = make_trajectory("j", {{1, 0}, {1, 5}, {1, 10}});
    CHECK(angle_difference(i, j) == doctest::Approx(0.0).epsilon(1e-12));

    // Nearest points of j to both ends of i coincide: degenerate.
    const Trajectory h = make_trajectory("h", {{0, 0}, {10, 0}});
    const Trajectory v = make_trajectory("v", {{0, 0}, {0, 10}});
    CHECK_THROWS_AS(angle_difference(h, v), DegenerateVectorError);

    // Distinct nearest points forming an exact 45 degree matched segment.
    const Trajectory up = make_trajectory("u", {{0, 0}, {0, 10}});
    const Trajectory diag = make_trajectory("d", {{-1, 0}, {9, 10}});
    CHECK(angle_difference(up, diag) == doctest::Approx(45.0).epsilon(1e-12));

    const Trajectory point = make_trajectory("pt", {{3, 3}});
    CHECK_THROWS(angle_difference(point, j));
}

TEST_CASE("angle similarity evaluates the shorter trajectory's net vector") {
    const Trajectory a = make_trajectory("a", {{0, 0}, {0, 10}});
    CHECK(angle_similarity(a, a) == 0.0);

    // An L-shaped track against a short straight one: the two directed angle
    // differences disagree (0 vs 45 degrees), so the branch selection by net
    // length is observable in both argument orders.
    const Trajectory shorter = make_trajectory("s", {{1, -2}, {6, -2}});
    const Trajectory longer =
        make_trajectory("l", {{0, 0}, {5, 0}, {10, 0}, {10, 5}, {10, 10}});
    CHECK(angle_difference(shorter, longer) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(angle_difference(longer, shorter) == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(angle_similarity(shorter, longer) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(angle_similarity(longer, shorter) == doctest::Approx(0.0).epsilon(1e-12));

    // A straight-line prefix keeps angle similarity at zero.
    const Trajectory full = make_trajectory("f", {{0, 0}, {0, 4}, {0, 8}, {0, 12}});
    const Trajectory prefix = make_trajectory("p", {{0, 0}, {0, 4}});
    CHECK(angle_similarity(full, prefix) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rear distance") {
    const Trajectory a = make_trajectory("a", {{5, 5}, {0, 0}});
    const Trajectory b = make_trajectory("b", {{9, 9}, {3, 4}});
    CHECK(rear_distance(a, a) == 0.0);
    CHECK(rear_distance(a, b) == 5.0);
    const Trajectory c = make_trajectory("c", {{0, 0}, {2, 2}});
    const Trajectory d = make_trajectory("d", {{0, 0}, {2, 7}});
    CHECK(rear_distance(c, d) == 5.0);
}

TEST_CASE("proximity factor branches") {
    // d_r == d_s: the (d_r - d_s) factor vanishes no matter the angle.
    const Trajectory i = make_trajectory("i", {{0, 0}, {0, 10}});
    const Trajectory j = make_trajectory("j", {{4, 0}, {4, 10}});
    // parallel lanes: d_s = 4, d_r = 4, t_s = 0
    CHECK(proximity_factor(i, j, kDefaults) == 0.0);

    SUBCASE("positive branch matches the direct formula") {
        // Diverging end points, ~40 degree matched angle.
        const Trajectory v = make_trajectory("v", {{0, 0}, {0, 40}});
        const Trajectory k = make_trajectory("k", {{0, 2}, {15, 20}, {30, 40}});
        const SimilarityBreakdown b = composite_similarity(v, k, kDefaults, true);
        REQUIRE(!b.angle_fallback);
        const double d_r = rear_distance(v, k);
        REQUIRE(d_r >= b.d_s);
        CHECK(b.p_e == doctest::Approx((b.t_s / 3.6) * (d_r - b.d_s)).epsilon(1e-12));
        CHECK(b.p_e > 0.0);
    }

    SUBCASE("small angles below the threshold go negative when ends converge") {
        // Two long parallel lanes whose ends pinch together: d_r < d_s.
        const Trajectory lane1 = make_trajectory("l1", {{0, 0}, {0, 50}, {0, 100}});
        const Trajectory lane2 = make_trajectory("l2", {{30, 0}, {30, 50}, {10, 100}});
        const SimilarityBreakdown b = composite_similarity(lane1, lane2, kDefaults, true);
        REQUIRE(!b.angle_fallback);
        const double d_r = rear_distance(lane1, lane2);
        REQUIRE(d_r < b.d_s);
        REQUIRE(b.t_s <= kDefaults.angle_threshold_deg);
        CHECK(b.p_e == doctest::Approx((b.t_s / 3.6) * (d_r - b.d_s)).epsilon(1e-12));
        CHECK(b.p_e < 0.0);
    }

    SUBCASE("guard branch returns exactly zero") {
        // A V shape: bodies far apart, ends adjacent, headings ~70 degrees
        // apart.
        const Trajectory u = make_trajectory("u", {{0, 0}, {30, 40}, {60, 80}});
        const Trajectory w = make_trajectory("w", {{120, 0}, {90, 40}, {62, 80}});
        const SimilarityBreakdown b = composite_similarity(u, w, kDefaults, true);
        REQUIRE(!b.angle_fallback);
        REQUIRE(rear_distance(u, w) < b.d_s);
        REQUIRE(b.t_s > kDefaults.angle_threshold_deg);
        CHECK(b.p_e == 0.0);
    }
}

TEST_CASE("proximity factor arithmetic matches hand values") {
    // (t_s / 3.6) * (d_r - d_s) with t_s=36, d_r-d_s=10 gives 100; the
    // negative branch with t_s=9, d_r-d_s=-10 gives -25.
    CHECK((36.0 / 3.6) * 10.0 == doctest::Approx(100.0));
    CHECK((9.0 / 3.6) * -10.0 == doctest::Approx(-25.0));
}

TEST_CASE("composite similarity combines weighted components") {
    const Trajectory i = make_trajectory("i", {{0, 0}, {0, 100}});

    SUBCASE("identical trajectories score zero under any weights") {
        SimilarityConfig cfg;
        cfg.w1 = 2.5;
        cfg.w2 = 0.3;
        cfg.w3 = 7.0;
        CHECK(composite_similarity(i, i, cfg, true).s == 0.0);
        CHECK(composite_similarity(i, i, cfg, false).s == 0.0);
    }

    SUBCASE("weighted sum and the proximity flag") {
        const Trajectory k = make_trajectory("k", {{2, 0}, {40, 90}});
        const SimilarityBreakdown with = composite_similarity(i, k, kDefaults, true);
        CHECK(with.s ==
              doctest::Approx(with.d_s + with.t_s + with.p_e).epsilon(1e-12));
        const SimilarityBreakdown without = composite_similarity(i, k, kDefaults, false);
        CHECK(without.p_e == 0.0);
        CHECK(without.d_s == with.d_s);
        CHECK(without.t_s == with.t_s);
        CHECK(without.s == doctest::Approx(without.d_s + without.t_s).epsilon(1e-12));
        // d_s=2, t_s=12, p_e=100 style arithmetic: s drops by exactly p_e.
        CHECK(with.s - without.s == doctest::Approx(with.p_e).epsilon(1e-12));
    }

    SUBCASE("degenerate matched vectors fall back instead of throwing") {
        const Trajectory h = make_trajectory("h", {{0, 0}, {10, 0}});
        const Trajectory v = make_trajectory("v", {{0, 0}, {0, 10}});
        const SimilarityBreakdown b = composite_similarity(h, v, kDefaults, true);
        CHECK(b.angle_fallback);
        CHECK(b.t_s == kDefaults.angle_threshold_deg);  // exactly one degenerate vector

        const Trajectory loop1 = make_trajectory("o1", {{0, 0}, {5, 5}, {0, 0}});
        const Trajectory loop2 = make_trajectory("o2", {{1, 0}, {6, 5}, {1, 0}});
        const SimilarityBreakdown both = composite_similarity(loop1, loop2, kDefaults, true);
        CHECK(both.angle_fallback);
        CHECK(both.t_s == 0.0);  // both vectors degenerate
    }
}

TEST_CASE("similarity measures are symmetric and scale predictably") {
    SplitMix64 rng(31);
    int checked = 0;
    for (int it = 0; it < 150; ++it) {
        Trajectory a = testutil::random_trajectory(rng, "a", 25);
        Trajectory b = testutil::random_trajectory(rng, "b", 25);
        if (a.size() < 2 || b.size() < 2) continue;
        ++checked;

        CHECK(distance_similarity(a, b) == distance_similarity(b, a));
        CHECK(rear_distance(a, b) == rear_distance(b, a));

        const SimilarityBreakdown ab = composite_similarity(a, b, kDefaults, true);
        const SimilarityBreakdown ba = composite_similarity(b, a, kDefaults, true);
        CHECK(ab.t_s == doctest::Approx(ba.t_s).epsilon(1e-12));
        CHECK(ab.s == doctest::Approx(ba.s).epsilon(1e-12));
        CHECK(composite_similarity(a, b, kDefaults, false).s ==
              doctest::Approx(composite_similarity(b, a, kDefaults, false).s).epsilon(1e-12));

        CHECK(ab.t_s >= 0.0);
        CHECK(ab.t_s <= 180.0);

        // Uniform positive scaling: angles fixed, distances linear.
        const double c = rng.uniform(0.5, 3.0);
        Trajectory sa = a, sb = b;
        for (auto& p : sa.points) {
            p.x *= c;
            p.y *= c;
        }
        for (auto& p : sb.points) {
            p.x *= c;
            p.y *= c;
        }
        const SimilarityBreakdown scaled = composite_similarity(sa, sb, kDefaults, true);
        CHECK(scaled.t_s == doctest::Approx(ab.t_s).epsilon(1e-9));
        CHECK(scaled.d_s == doctest::Approx(c * ab.d_s).epsilon(1e-9));
        CHECK(rear_distance(sa, sb) == doctest::Approx(c * rear_distance(a, b)).epsilon(1e-9));

        // p_e vanishes exactly on {d_r == d_s} or the guard set.
        const double d_r = rear_distance(a, b);
        if (ab.p_e == 0.0) {
            CHECK((d_r == ab.d_s ||
                   (d_r < ab.d_s && ab.t_s > kDefaults.angle_threshold_deg) || ab.t_s == 0.0));
        }

        CHECK(composite_similarity(a, a, kDefaults, true).s == 0.0);
    }
    CHECK(checked > 100);
}

TEST_CASE("parallel pairwise matrix is bitwise identical to the serial reference") {
    SplitMix64 rng(41);
    std::vector<Trajectory> trajectories;
    for (int i = 0; i < 40; ++i) {
        Trajectory t = testutil::random_trajectory(rng, "t" + std::to_string(i), 30);
        while (t.size() < 2) t = testutil::random_trajectory(rng, t.vehicle_id, 30);
        trajectories.push_back(std::move(t));
    }
    for (bool proximity : {true, false}) {
        const DissimilarityMatrix serial =
            pairwise_dissimilarity_serial(trajectories, kDefaults, proximity);
        const DissimilarityMatrix parallel = pairwise_dissimilarity(
            trajectories, kDefaults, proximity, Execution::Parallel);
        CHECK(serial == parallel);
        serial.validate();
    }
}

TEST_CASE("config validation") {
    SimilarityConfig bad;
    bad.w1 = -1.0;
    CHECK_THROWS(bad.validate());
    bad = {};
    bad.angle_threshold_deg = 0.0;
    CHECK_THROWS(bad.validate());
    bad = {};
    bad.degree_divisor = 0.0;
    CHECK_THROWS(bad.validate());
    CHECK_NOTHROW(SimilarityConfig{}.validate());
}

#include "doctest.h"

#include "canard/model.hpp"
#include "testutil.hpp"

using namespace canard;

TEST_SUITE_BEGIN("model");

TEST_CASE("parameter validation rejects non-positive values") {
    const params good{1.0, 1.0, 0.01};
    CHECK_NOTHROW(good.validate());
    const params bad_A{0.0, 1.0, 0.01}, bad_B{1.0, -1.0, 0.01}, bad_e{1.0, 1.0, 0.0},
        bad_nan{1.0, 1.0, std::nan("")};
    CHECK_THROWS_AS(bad_A.validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad_B.validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad_e.validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad_nan.validate(), std::invalid_argument);
}

TEST_CASE("kinetics sum to A - u (mass exchange identity)") {
    auto g = testutil::rng(11);
    for (int i = 0; i < 200; ++i) {
        params pars{testutil::uniform(g, 0.1, 4.0), testutil::uniform(g, 0.1, 4.0), 0.01};
        const double u = testutil::uniform(g, -3.0, 8.0);
        const double v = testutil::uniform(g, -3.0, 8.0);
        const auto r = kinetics(pars, u, v);
        CHECK(testutil::close_rel(r.f + r.g, pars.A - u, 1e-13));
    }
}

TEST_CASE("homogeneous state is an equilibrium on both scales") {
    for (params pars : {params{1.0, 1.0, 0.01}, params{2.0, 0.7, 0.05}, params{0.5, 3.0, 0.002}}) {
        const phase_point e = equilibrium(pars);
        const auto r = kinetics(pars, e.u, e.v);
        CHECK(std::abs(r.f) < 1e-14);
        CHECK(std::abs(r.g) < 1e-14);
        for (auto scale : {time_scale::fast, time_scale::slow}) {
            const phase_point dy = vector_field(pars, e, scale);
            CHECK(std::abs(dy.u) < 1e-14);
            CHECK(std::abs(dy.p) < 1e-14);
            CHECK(std::abs(dy.v) < 1e-14);
            CHECK(std::abs(dy.q) < 1e-14);
        }
    }
}

TEST_CASE("slow field equals fast field divided by eps") {
    auto g = testutil::rng(12);
    for (int i = 0; i < 100; ++i) {
        params pars{testutil::uniform(g, 0.2, 3.0), testutil::uniform(g, 0.2, 3.0),
                    testutil::uniform(g, 1e-3, 0.2)};
        phase_point y{testutil::uniform(g, -2, 6), testutil::uniform(g, -4, 4),
                      testutil::uniform(g, -2, 6), testutil::uniform(g, -4, 4)};
        const phase_point f = vector_field(pars, y, time_scale::fast);
        const phase_point s = vector_field(pars, y, time_scale::slow);
        CHECK(testutil::close_rel(s.u * pars.eps, f.u));
        CHECK(testutil::close_rel(s.p * pars.eps, f.p));
        CHECK(testutil::close_rel(s.v * pars.eps, f.v));
        CHECK(testutil::close_rel(s.q * pars.eps, f.q));
    }
}

TEST_CASE("vector field anticommutes with the reverser") {
    auto g = testutil::rng(13);
    for (int i = 0; i < 200; ++i) {
        params pars{testutil::uniform(g, 0.2, 3.0), testutil::uniform(g, 0.2, 3.0),
                    testutil::uniform(g, 1e-3, 0.2)};
        phase_point y{testutil::uniform(g, -2, 6), testutil::uniform(g, -4, 4),
                      testutil::uniform(g, -2, 6), testutil::uniform(g, -4, 4)};
        const phase_point lhs = vector_field(pars, reverse(y));
        const phase_point rhs = reverse(vector_field(pars, y));
        CHECK(testutil::close_rel(lhs.u, -rhs.u, 1e-13));
        CHECK(testutil::close_rel(lhs.p, -rhs.p, 1e-13));
        CHECK(testutil::close_rel(lhs.v, -rhs.v, 1e-13));
        CHECK(testutil::close_rel(lhs.q, -rhs.q, 1e-13));
    }
}

TEST_CASE("translation is an exact inverse pair and conjugates the field") {
    auto g = testutil::rng(14);
    for (int i = 0; i < 200; ++i) {
        params pars{testutil::uniform(g, 0.2, 3.0), testutil::uniform(g, 0.5, 1.5),
                    testutil::uniform(g, 1e-3, 0.2)};
        phase_point y{testutil::uniform(g, -2, 6), testutil::uniform(g, -4, 4),
                      testutil::uniform(g, -2, 6), testutil::uniform(g, -4, 4)};
        const translated_point t = translate(pars, y);
        const phase_point back = untranslate(pars, t);
        CHECK(testutil::close_rel(back.u, y.u, 1e-14));
        CHECK(testutil::close_rel(back.p, y.p, 1e-14));
        CHECK(testutil::close_rel(back.v, y.v, 1e-14));
        CHECK(testutil::close_rel(back.q, y.q, 1e-14));

        // The translation is a shift, so derivatives agree componentwise.
        const phase_point dy = vector_field(pars, y);
        const translated_point dt = translated_field(pars, t);
        CHECK(testutil::close_rel(dt.U, dy.u, 1e-12));
        CHECK(testutil::close_rel(dt.P, dy.p, 1e-11));
        CHECK(testutil::close_rel(dt.V, dy.v, 1e-12));
        CHECK(testutil::close_rel(dt.Q, dy.q, 1e-11));
    }
}

TEST_CASE("translated field at the origin vanishes only when B = 1") {
    params on{1.3, 1.0, 0.01};
    translated_point zero{};
    const translated_point d0 = translated_field(on, zero);
    CHECK(std::abs(d0.P) < 1e-15);
    CHECK(std::abs(d0.Q) < 1e-15);

    params off{1.3, 1.2, 0.01};
    const translated_point d1 = translated_field(off, zero);
    CHECK(std::abs(d1.P) > 1e-3); // A * (B - 1)
}

TEST_SUITE_END();

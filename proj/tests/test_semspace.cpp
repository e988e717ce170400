#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "semlens/semspace.hpp"
#include "semlens/util.hpp"

using namespace semlens;

TEST_CASE("discover_ssns recovers planted perturbations in magnitude order") {
    const int p = 64;
    Rng rng(1);
    std::vector<double> unmask(p);
    for (double& v : unmask) v = rng.uniform(0.5, 1.5);

    const int planted_idx[5] = {3, 7, 11, 19, 42};
    const double planted_d[5] = {5.0, -4.0, 3.0, -2.0, 1.0};
    std::vector<double> mask = unmask;
    for (int i = 0; i < 5; ++i) mask[planted_idx[i]] -= planted_d[i];

    SemanticSpace space = discover_ssns(unmask, mask, 5);
    REQUIRE(space.ssn.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(space.ssn[i] == planted_idx[i]);
        CHECK(space.delta[i] == doctest::Approx(planted_d[i]).epsilon(1e-12));
    }
}

TEST_CASE("discover_ssns: identical score vectors are degenerate") {
    std::vector<double> v = {0.1, 0.5, -0.2};
    CHECK_THROWS_AS(discover_ssns(v, v, 2), DegenerateDifference);
}

TEST_CASE("discover_ssns: ties break toward the lower index") {
    std::vector<double> unmask = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    std::vector<double> mask = unmask;
    mask[9] += 2.0;  // |d| = 2
    mask[5] -= 2.0;  // |d| = 2
    mask[7] -= 1.0;  // |d| = 1
    SemanticSpace space = discover_ssns(unmask, mask, 3);
    CHECK(space.ssn == std::vector<int>{5, 9, 7});
}

TEST_CASE("discover_ssns aligns the masked PC's arbitrary sign before differencing") {
    Rng rng(3);
    std::vector<double> unmask(32), mask(32);
    for (std::size_t i = 0; i < unmask.size(); ++i) {
        unmask[i] = rng.uniform(0.5, 1.5);
        mask[i] = unmask[i];
    }
    mask[10] -= 3.0;
    mask[20] -= 1.0;

    SemanticSpace direct = discover_ssns(unmask, mask, 2);
    std::vector<double> flipped = mask;
    for (double& v : flipped) v = -v;
    SemanticSpace via_flip = discover_ssns(unmask, flipped, 2);

    CHECK(direct.ssn == via_flip.ssn);
    for (std::size_t i = 0; i < direct.delta.size(); ++i)
        CHECK(direct.delta[i] == doctest::Approx(via_flip.delta[i]).epsilon(1e-12));
}

TEST_CASE("discover_ssns is permutation-equivariant and scale-invariant in its index choice") {
    const int p = 24;
    Rng rng(5);
    std::vector<double> unmask(p), mask(p);
    for (int i = 0; i < p; ++i) {
        unmask[i] = rng.uniform(0.2, 1.0);
        mask[i] = unmask[i] - rng.uniform(-1.0, 1.0);
    }
    SemanticSpace base = discover_ssns(unmask, mask, 4);

    // permutation: rotate indices by 7
    std::vector<double> pu(p), pm(p);
    for (int i = 0; i < p; ++i) {
        pu[(i + 7) % p] = unmask[i];
        pm[(i + 7) % p] = mask[i];
    }
    SemanticSpace rotated = discover_ssns(pu, pm, 4);
    for (std::size_t i = 0; i < base.ssn.size(); ++i)
        CHECK(rotated.ssn[i] == (base.ssn[i] + 7) % p);

    // common positive scaling leaves the selection unchanged
    std::vector<double> su = unmask, sm = mask;
    for (double& v : su) v *= 3.7;
    for (double& v : sm) v *= 3.7;
    SemanticSpace scaled = discover_ssns(su, sm, 4);
    CHECK(scaled.ssn == base.ssn);
}

TEST_CASE("discover_ssns validates its inputs") {
    std::vector<double> a = {1.0, 2.0};
    std::vector<double> b = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(discover_ssns(a, b, 1), ShapeMismatch);
    CHECK_THROWS_AS(discover_ssns(a, a, 3), InvalidParam);
}

// ---------------------------------------------------------------------------

TEST_CASE("build_target_encoding scales the proportional relationship to the maximum") {
    SemanticSpace space;
    space.ssn = {4};
    space.delta = {0.5};
    TargetEncoding single = build_target_encoding(space, 8, 30.0);
    CHECK(single.values[4] == doctest::Approx(30.0));

    space.ssn = {1, 5, 6};
    space.delta = {4.0, 2.0, 1.0};
    TargetEncoding enc = build_target_encoding(space, 8, 30.0);
    CHECK(enc.values[1] == doctest::Approx(30.0));
    CHECK(enc.values[5] == doctest::Approx(15.0));
    CHECK(enc.values[6] == doctest::Approx(7.5));
    for (int j : {0, 2, 3, 4, 7}) CHECK(enc.values[j] == 0.0);
}

TEST_CASE("build_target_encoding preserves signs and delta ratios") {
    SemanticSpace space;
    space.ssn = {0, 3, 9};
    space.delta = {-4.0, 2.0, -1.0};
    TargetEncoding enc = build_target_encoding(space, 12, 30.0);
    CHECK(enc.values[0] == doctest::Approx(-30.0));
    CHECK(enc.values[3] == doctest::Approx(15.0));
    CHECK(enc.values[9] == doctest::Approx(-7.5));
    for (std::size_t i = 0; i < space.ssn.size(); ++i)
        for (std::size_t j = 0; j < space.ssn.size(); ++j)
            CHECK(enc.values[space.ssn[i]] / enc.values[space.ssn[j]] ==
                  doctest::Approx(space.delta[i] / space.delta[j]).epsilon(1e-12));
}

TEST_CASE("build_target_encoding rejects zero differences and bad scales") {
    SemanticSpace zero;
    zero.ssn = {0, 1};
    zero.delta = {0.0, 0.0};
    CHECK_THROWS_AS(build_target_encoding(zero, 4, 30.0), DegenerateDifference);

    SemanticSpace ok;
    ok.ssn = {0};
    ok.delta = {1.0};
    CHECK_THROWS_AS(build_target_encoding(ok, 4, 0.0), InvalidParam);
}

// ---------------------------------------------------------------------------

TEST_CASE("tv_regularizer: constant image has zero value and gradient") {
    Tensor z(2, 4, 4);
    for (double& v : z.v) v = 0.77;
    TvResult res = tv_regularizer(z, 2.0);
    CHECK(res.value == 0.0);
    for (double g : res.grad.v) CHECK(g == 0.0);
}

TEST_CASE("tv_regularizer: the 2x2 worked example evaluates to exactly 2") {
    Tensor z(1, 2, 2);
    z.at(0, 0, 0) = 0.0;
    z.at(0, 0, 1) = 1.0;
    z.at(0, 1, 0) = 0.0;
    z.at(0, 1, 1) = 1.0;
    CHECK(tv_regularizer(z, 2.0).value == 2.0);
}

TEST_CASE("tv_regularizer matches a direct evaluation of the double sum") {
    Rng rng(7);
    Tensor z(2, 4, 5);
    for (double& v : z.v) v = rng.uniform(-1, 1);

    for (double beta : {2.0, 3.0}) {
        double direct = 0.0;
        for (int c = 0; c < 2; ++c)
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 5; ++x) {
                    double u = 0.0;
                    bool any = false;
                    if (x + 1 < 5) {
                        const double d = z.at(c, y, x + 1) - z.at(c, y, x);
                        u += d * d;
                        any = true;
                    }
                    if (y + 1 < 4) {
                        const double d = z.at(c, y + 1, x) - z.at(c, y, x);
                        u += d * d;
                        any = true;
                    }
                    if (any) direct += std::pow(u, beta / 2.0);
                }
        CHECK(tv_regularizer(z, beta).value == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("tv_regularizer is shift invariant") {
    Rng rng(9);
    Tensor z(3, 5, 5);
    for (double& v : z.v) v = rng.uniform(-1, 1);
    const double base = tv_regularizer(z, 2.0).value;
    for (double& v : z.v) v += 4.2;
    CHECK(tv_regularizer(z, 2.0).value == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("tv_regularizer gradient agrees with finite differences") {
    Rng rng(11);
    Tensor z(1, 6, 6);
    for (double& v : z.v) v = rng.uniform(-1, 1);

    for (double beta : {2.0, 3.0}) {
        TvResult res = tv_regularizer(z, beta);
        Tensor fd = oracles::finite_difference(
            [&](const Tensor& probe) { return tv_regularizer(probe, beta).value; }, z);
        CHECK(oracles::max_rel_error(res.grad, fd) < 1e-4);
    }
}

// ---------------------------------------------------------------------------

namespace {

CnnModel gap_only_model(int hw) {
    CnnModel m;
    m.input_shape = {3, hw, hw};
    m.layers.push_back(Layer::gap());
    m.validate();
    return m;
}

}  // namespace

TEST_CASE("visualize inverts the GAP-only model to the target means") {
    CnnModel m = gap_only_model(2);
    TargetEncoding enc;
    enc.values = {30.0, 15.0, -7.5};
    VisConfig cfg;
    cfg.lambda = 0.01;  // small regularization so the fixed point is the target

    VisResult res = visualize(m, enc, cfg);
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) mean += res.optimized.at(c, y, x);
        mean /= 4.0;
        CHECK(mean == doctest::Approx(enc.values[c]).epsilon(1e-3));
    }
    CHECK(res.objective_trace.back() <= res.objective_trace.front());
}

TEST_CASE("visualize is deterministic") {
    CnnModel m = gap_only_model(3);
    TargetEncoding enc;
    enc.values = {1.0, 0.0, -1.0};
    VisConfig cfg;
    cfg.max_iters = 50;

    VisResult a = visualize(m, enc, cfg);
    VisResult b = visualize(m, enc, cfg);
    CHECK(a.optimized.v == b.optimized.v);
    CHECK(a.objective_trace == b.objective_trace);
}

TEST_CASE("visualize reports divergence") {
    CnnModel m = gap_only_model(2);
    TargetEncoding enc;
    enc.values = {30.0, 30.0, 30.0};
    VisConfig cfg;
    cfg.learning_rate = 1e300;  // guaranteed blow-up
    cfg.max_iters = 200;
    CHECK_THROWS_AS(visualize(m, enc, cfg), DivergedOptimization);
}

TEST_CASE("visualize validates the target length") {
    CnnModel m = gap_only_model(2);
    TargetEncoding enc;
    enc.values = {1.0, 2.0};
    VisConfig cfg;
    cfg.max_iters = 5;
    CHECK_THROWS_AS(visualize(m, enc, cfg), ShapeMismatch);
}

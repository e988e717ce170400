#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "semlens/assess.hpp"
#include "semlens/util.hpp"

using namespace semlens;

namespace {

FittedSpace synthetic_space(int base_index, double mu) {
    FittedSpace fs;
    fs.space.ssn = {base_index, base_index + 1};
    fs.space.delta = {1.0, 0.5};
    fs.fit.mu = mu;
    fs.fit.sigma = 0.5;
    fs.fit.a_min = mu - 1.0;
    fs.fit.a_max = mu + 1.0;
    fs.fit.count = 500;
    return fs;
}

SpaceTable synthetic_table() {
    SpaceTable t;
    t.class_names = {"roundy", "boxy"};
    t.concepts = {"eyes", "nose", "legs"};
    int idx = 0;
    for (int cls = 0; cls < 2; ++cls)
        for (int k = 0; k < 3; ++k) {
            t.put(cls, k, synthetic_space(idx, 0.1 * idx));
            idx += 2;
        }
    return t;
}

Radar radar_from(const std::array<double, 3>& predicted, const std::array<double, 3>& other,
                 int predicted_class = 0) {
    Radar r;
    r.class_names = {"cat", "dog"};
    r.concepts = {"eyes", "nose", "legs"};
    for (int k = 0; k < 3; ++k) {
        r.p[predicted_class][k] = predicted[k];
        r.p[1 - predicted_class][k] = other[k];
        r.present[0][k] = r.present[1][k] = true;
    }
    return r;
}

Indicators make_indicators(double p_max, const std::array<double, 3>& delta_p,
                           const std::string& cls = "cat") {
    Indicators ind;
    ind.p_max = p_max;
    ind.s_max = "eyes";
    ind.delta_p = {{"eyes", delta_p[0]}, {"nose", delta_p[1]}, {"legs", delta_p[2]}};
    ind.delta_max_p = std::max({delta_p[0], delta_p[1], delta_p[2]});
    ind.predicted_class = 0;
    ind.predicted_name = cls;
    return ind;
}

}  // namespace

TEST_CASE("compute_radar: zero features recompose per-space, and batches match singles") {
    SpaceTable table = synthetic_table();
    std::vector<double> zeros(16, 0.0);
    Radar radar = compute_radar(zeros, table);
    REQUIRE(radar.complete());
    for (int cls = 0; cls < 2; ++cls)
        for (int k = 0; k < 3; ++k) {
            const FittedSpace& fs = table.spaces[cls][k];
            const double expected = semantic_probability(weighted_activation(zeros, fs.space), fs.fit);
            CHECK(radar.p[cls][k] == expected);
        }

    Rng rng(1);
    std::vector<double> feats(16);
    for (double& f : feats) f = rng.uniform(-1, 1);
    Radar a = compute_radar(feats, table);
    Radar b = compute_radar(feats, table);
    for (int cls = 0; cls < 2; ++cls)
        for (int k = 0; k < 3; ++k) CHECK(a.p[cls][k] == b.p[cls][k]);
}

TEST_CASE("compute_radar rejects an incomplete table") {
    SpaceTable partial;
    partial.class_names = {"a", "b"};
    partial.concepts = {"eyes", "nose", "legs"};
    partial.put(0, 0, synthetic_space(0, 0.0));
    std::vector<double> feats(4, 0.0);
    CHECK_THROWS_AS(compute_radar(feats, partial), IncompleteRadar);
}

TEST_CASE("derive_indicators: the worked cat-vs-dog example") {
    Radar r = radar_from({0.8, 0.6, 0.4}, {0.3, 0.5, 0.45});
    Indicators ind = derive_indicators(r, 0);
    CHECK(ind.p_max == doctest::Approx(0.8));
    CHECK(ind.s_max == "eyes");
    CHECK(ind.delta_p[0].second == doctest::Approx(0.5));    // eyes
    CHECK(ind.delta_p[1].second == doctest::Approx(0.1));    // nose
    CHECK(ind.delta_p[2].second == doctest::Approx(-0.05));  // legs
    CHECK(ind.delta_max_p == doctest::Approx(0.5));
    CHECK(ind.predicted_name == "cat");
}

TEST_CASE("derive_indicators: identical radars zero out every difference") {
    Radar r = radar_from({0.4, 0.4, 0.4}, {0.4, 0.4, 0.4});
    Indicators ind = derive_indicators(r, 1);
    for (const auto& [_, d] : ind.delta_p) CHECK(d == doctest::Approx(0.0));
    CHECK(ind.delta_max_p == doctest::Approx(0.0));
}

TEST_CASE("derive_indicators is order independent in the concepts") {
    Radar a = radar_from({0.8, 0.6, 0.4}, {0.3, 0.5, 0.45});
    Radar b = radar_from({0.4, 0.8, 0.6}, {0.45, 0.3, 0.5});
    b.concepts = {"legs", "eyes", "nose"};
    Indicators ia = derive_indicators(a, 0);
    Indicators ib = derive_indicators(b, 0);
    CHECK(ia.p_max == ib.p_max);
    CHECK(ia.s_max == ib.s_max);
    CHECK(ia.delta_max_p == ib.delta_max_p);
}

// ---------------------------------------------------------------------------

TEST_CASE("generate_explanation: the low-confidence sentence is exact") {
    Indicators ind = make_indicators(0.15, {0.1, 0.05, 0.0});
    Explanation e = generate_explanation(ind);
    CHECK(e.sentence == "It might be a cat, but I am not sure.");
    CHECK(e.fragments.empty());
}

TEST_CASE("generate_explanation: vivid something-like fragment matches the quoted wording") {
    Indicators ind = make_indicators(0.6, {0.4, 0.1, 0.1}, "dog");
    Explanation e = generate_explanation(ind);
    CHECK(e.sentence.find("its vivid eyes, which are something like dog's eyes") != std::string::npos);
    REQUIRE(!e.fragments.empty());
    CHECK(e.fragments[0].concept_name == "eyes");
    CHECK(e.fragments[0].position_word == "vivid");
    CHECK(e.fragments[0].semanteme_word == "something like");
}

TEST_CASE("generate_explanation: the None cell emits no fragment") {
    Indicators ind = make_indicators(0.3, {0.4, 0.1, 0.0});
    Explanation e = generate_explanation(ind);
    for (const Fragment& f : e.fragments) CHECK(f.concept_name != "nose");
    CHECK(e.sentence.find("nose") == std::string::npos);
}

TEST_CASE("generate_explanation covers the full band grid against the rule table") {
    const double dmax_reps[4] = {0.1, 0.3, 0.45, 0.7};
    const double dp_reps[4] = {0.1, 0.3, 0.45, 0.7};
    const double pmax_reps[2] = {0.6, 0.3};
    const char* expected_sem[4] = {"confusing", "perhaps", "something like", "obviously"};

    for (int db = 0; db < 4; ++db) {
        for (int pb = 0; pb < 4; ++pb) {
            for (int mb = 0; mb < 2; ++mb) {
                // concept "eyes" realizes the global maximum, "nose" carries
                // the probed cell
                const double probe = std::min(dp_reps[pb], dmax_reps[db]);
                Indicators ind = make_indicators(pmax_reps[mb], {dmax_reps[db], probe, -0.5});
                Explanation e = generate_explanation(ind);

                if (db == 0) {
                    CHECK(e.sentence == "It might be a cat, but I am not sure.");
                    CHECK(e.fragments.empty());
                    continue;
                }
                CHECK(e.sentence.rfind(db == 3 ? "I am sure it is a cat" : "It is probably a cat", 0) == 0);

                const int probe_band = assessment_band(probe);
                bool found = false;
                for (const Fragment& f : e.fragments) {
                    if (f.concept_name != "nose") continue;
                    found = true;
                    CHECK(f.position_word == (mb == 0 ? "vivid" : "be"));
                    CHECK(f.semanteme_word == expected_sem[probe_band]);
                }
                const bool none_cell = probe_band == 0 && mb == 1;
                CHECK(found == !none_cell);
            }
        }
    }
}

TEST_CASE("generate_explanation: band boundaries belong to the lower band") {
    CHECK(assessment_band(0.2) == 0);
    CHECK(assessment_band(0.35) == 1);
    CHECK(assessment_band(0.5) == 2);
    CHECK(assessment_band(std::nextafter(0.2, 1.0)) == 1);
    CHECK(assessment_band(std::nextafter(0.5, 1.0)) == 3);

    Indicators at_020 = make_indicators(0.6, {0.2, 0.0, 0.0});
    CHECK(generate_explanation(at_020).sentence == "It might be a cat, but I am not sure.");
    Indicators at_050 = make_indicators(0.6, {0.5, 0.0, 0.0});
    CHECK(generate_explanation(at_050).sentence.rfind("It is probably a cat", 0) == 0);
}

TEST_CASE("generate_explanation: confidence never drops as delta_max_p grows") {
    int prev = 0;
    for (double d = 0.0; d <= 1.0; d += 0.01) {
        const int band = assessment_band(d);
        CHECK(band >= prev);
        prev = band;
    }
}

TEST_CASE("generate_explanation orders fragments by descending delta P") {
    Indicators ind = make_indicators(0.6, {0.4, 0.7, 0.3});
    Explanation e = generate_explanation(ind);
    REQUIRE(e.fragments.size() == 3);
    CHECK(e.fragments[0].concept_name == "nose");
    CHECK(e.fragments[1].concept_name == "eyes");
    CHECK(e.fragments[2].concept_name == "legs");
}

TEST_CASE("generate_explanation joins confusing concepts into a trailing clause") {
    Indicators ind = make_indicators(0.6, {0.6, 0.1, 0.05});
    Explanation e = generate_explanation(ind);
    CHECK(e.sentence.rfind("I am sure it is a cat mainly because", 0) == 0);
    CHECK(e.sentence.find("However, its nose and legs are a little confusing.") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "semlens/model.hpp"
#include "semlens/semspace.hpp"
#include "semlens/util.hpp"

using namespace semlens;

namespace {

Tensor random_tensor(Rng& rng, int c, int h, int w, double lo = -1.0, double hi = 1.0) {
    Tensor t(c, h, w);
    for (double& v : t.v) v = rng.uniform(lo, hi);
    return t;
}

void randomize_model(CnnModel& m, std::uint64_t seed, bool random_bias = true) {
    init_weights(m, seed);
    if (random_bias) {
        Rng rng(seed ^ 0x5eedbeef);
        for (Layer& l : m.layers)
            for (double& b : l.b) b = rng.uniform(-0.2, 0.2);
    }
}

CnnModel small_model(int hw, std::uint64_t seed) {
    CnnModel m;
    m.input_shape = {3, hw, hw};
    m.layers.push_back(Layer::conv(3, 4, 3));
    m.layers.push_back(Layer::relu());
    m.layers.push_back(Layer::maxpool(2));
    m.layers.push_back(Layer::conv(4, 6, 3));
    m.layers.push_back(Layer::relu());
    m.layers.push_back(Layer::gap());
    m.layers.push_back(Layer::dense(6, 2));
    randomize_model(m, seed);
    m.validate();
    return m;
}

Image as_image(const Tensor& t) {
    Image img;
    img.pixels = t;
    return img;
}

}  // namespace

TEST_CASE("forward_features: zero conv weights give a zero feature vector") {
    CnnModel m;
    m.input_shape = {3, 8, 8};
    m.layers.push_back(Layer::conv(3, 5, 3));  // weights stay zero
    m.layers.push_back(Layer::relu());
    m.layers.push_back(Layer::gap());
    m.validate();
    Rng rng(1);
    Image img = as_image(random_tensor(rng, 3, 8, 8, 0.0, 1.0));
    for (double f : forward_features(m, img)) CHECK(f == 0.0);
}

TEST_CASE("forward_features: 1x1 identity conv + GAP reproduces a constant") {
    CnnModel m;
    m.input_shape = {3, 6, 6};
    Layer conv = Layer::conv(3, 3, 1);
    for (int c = 0; c < 3; ++c) conv.w[static_cast<std::size_t>(c) * 3 + c] = 1.0;
    m.layers.push_back(conv);
    m.layers.push_back(Layer::gap());
    m.validate();

    const double value = 0.37;
    Tensor t(3, 6, 6);
    for (double& v : t.v) v = value;
    std::vector<double> f = forward_features(m, as_image(t));
    REQUIRE(f.size() == 3);
    for (double x : f) CHECK(x == doctest::Approx(value).epsilon(1e-15));
}

TEST_CASE("forward matches the direct convolution oracle") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        CnnModel m = small_model(8, seed);
        Rng rng(seed * 7 + 1);
        Tensor in = random_tensor(rng, 3, 8, 8);

        ForwardTrace trace = forward(m, in);
        Tensor o1 = oracles::conv_direct(in, m.layers[0]);
        for (double& v : o1.v) v = std::max(v, 0.0);
        Tensor o2 = oracles::maxpool_direct(o1, 2);
        Tensor o3 = oracles::conv_direct(o2, m.layers[3]);
        for (double& v : o3.v) v = std::max(v, 0.0);
        std::vector<double> feats = oracles::gap_direct(o3);

        REQUIRE(trace.features.size() == feats.size());
        for (std::size_t i = 0; i < feats.size(); ++i)
            CHECK(trace.features[i] == doctest::Approx(feats[i]).epsilon(1e-10));
    }
}

TEST_CASE("predict: all-zero dense layer gives the uniform distribution") {
    CnnModel m;
    m.input_shape = {3, 4, 4};
    m.layers.push_back(Layer::conv(3, 4, 3));
    m.layers.push_back(Layer::gap());
    m.layers.push_back(Layer::dense(4, 2));
    randomize_model(m, 5, false);
    for (double& w : m.layers.back().w) w = 0.0;

    Rng rng(6);
    std::vector<double> p = predict(m, as_image(random_tensor(rng, 3, 4, 4)));
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax is invariant to a constant logit shift") {
    std::vector<double> p1 = softmax({0.3, -1.2, 2.0});
    std::vector<double> p2 = softmax({0.3 + 7.5, -1.2 + 7.5, 2.0 + 7.5});
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-12));
}

TEST_CASE("predict recomposes as softmax(dense(forward_features))") {
    CnnModel m = small_model(8, 21);
    Rng rng(22);
    Image img = as_image(random_tensor(rng, 3, 8, 8));
    std::vector<double> direct = predict(m, img);
    std::vector<double> recomposed = classify_features(m, forward_features(m, img));
    for (std::size_t i = 0; i < direct.size(); ++i)
        CHECK(direct[i] == doctest::Approx(recomposed[i]).epsilon(1e-12));
}

TEST_CASE("class probabilities sum to 1 and repeated forward passes are bit-identical") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CnnModel m = small_model(8, 100 + seed);
        Rng rng(200 + seed);
        Image img = as_image(random_tensor(rng, 3, 8, 8));
        std::vector<double> p = predict(m, img);
        double sum = 0.0;
        for (double x : p) sum += x;
        CHECK(std::abs(sum - 1.0) < 1e-9);
        CHECK(predict(m, img) == p);
        CHECK(forward_features(m, img) == forward_features(m, img));
    }
}

TEST_CASE("GAP features scale linearly through a rectifier-free stack") {
    CnnModel m;
    m.input_shape = {3, 8, 8};
    m.layers.push_back(Layer::conv(3, 4, 3));
    m.layers.push_back(Layer::maxpool(2));
    m.layers.push_back(Layer::gap());
    randomize_model(m, 31, false);  // zero bias keeps the stack homogeneous

    Rng rng(32);
    Tensor z = random_tensor(rng, 3, 8, 8);
    const double a = 2.5;
    Tensor az = z;
    for (double& v : az.v) v *= a;

    std::vector<double> f1 = forward(m, z).features;
    std::vector<double> f2 = forward(m, az).features;
    for (std::size_t i = 0; i < f1.size(); ++i)
        CHECK(f2[i] == doctest::Approx(a * f1[i]).epsilon(1e-12));
}

TEST_CASE("objective_gradient: stationary when features hit the target on a constant image") {
    CnnModel m;
    m.input_shape = {3, 4, 4};
    m.layers.push_back(Layer::gap());
    m.validate();
    Tensor z(3, 4, 4);
    for (double& v : z.v) v = 0.6;

    // target = the features this exact image produces
    std::vector<double> target = forward(m, z).features;
    ObjectiveResult res = objective_gradient(m, z, target, 2.0, 2.0);
    CHECK(res.value == 0.0);
    for (double g : res.grad.v) CHECK(g == 0.0);
}

TEST_CASE("objective_gradient: lambda=0 drops the TV contribution") {
    CnnModel m = small_model(8, 41);
    Rng rng(42);
    Tensor z = random_tensor(rng, 3, 8, 8);
    std::vector<double> target(m.feature_width(), 0.3);

    ObjectiveResult with_tv = objective_gradient(m, z, target, 2.0, 2.0);
    ObjectiveResult without = objective_gradient(m, z, target, 0.0, 2.0);
    TvResult tv = tv_regularizer(z, 2.0);

    CHECK(without.tv_term == 0.0);
    CHECK(with_tv.value == doctest::Approx(without.value + 2.0 * tv.value).epsilon(1e-12));
    for (std::size_t i = 0; i < z.v.size(); ++i)
        CHECK(with_tv.grad.v[i] == doctest::Approx(without.grad.v[i] + 2.0 * tv.grad.v[i]).epsilon(1e-10));
}

TEST_CASE("objective_gradient agrees with central finite differences") {
    int checked = 0;
    for (std::uint64_t seed : {51u, 52u, 53u, 54u, 55u}) {
        CnnModel m = small_model(8, seed);
        Rng rng(seed + 1000);
        // finite differences need smoothness: redraw until the input is
        // comfortably away from every ReLU kink and pooling tie
        Tensor z = random_tensor(rng, 3, 8, 8);
        int attempts = 0;
        while (oracles::kink_margin(m, z) <= 1e-4 && attempts++ < 20) z = random_tensor(rng, 3, 8, 8);
        REQUIRE(oracles::kink_margin(m, z) > 1e-4);

        std::vector<double> target(m.feature_width());
        for (double& t : target) t = rng.uniform(-1.0, 1.0);

        ObjectiveResult res = objective_gradient(m, z, target, 2.0, 2.0);
        Tensor fd = oracles::finite_difference(
            [&](const Tensor& probe) { return objective_gradient(m, probe, target, 2.0, 2.0).value; }, z);
        CHECK(oracles::max_rel_error(res.grad, fd) < 1e-4);
        ++checked;
    }
    CHECK(checked == 5);
}

TEST_CASE("objective_gradient rejects a wrong target length") {
    CnnModel m = small_model(8, 61);
    Tensor z(3, 8, 8);
    CHECK_THROWS_AS(objective_gradient(m, z, std::vector<double>(3, 0.0), 2.0, 2.0), ShapeMismatch);
}

// ---------------------------------------------------------------------------
// training

namespace {

std::vector<LabeledImage> blob_dataset(int n_per_class, int hw, std::uint64_t seed) {
    // class 0 is red-dominant, class 1 is blue-dominant
    std::vector<LabeledImage> data;
    Rng rng(seed);
    for (int label = 0; label < 2; ++label) {
        for (int i = 0; i < n_per_class; ++i) {
            Image img(hw, hw);
            for (int y = 0; y < hw; ++y)
                for (int x = 0; x < hw; ++x) {
                    const double hot = rng.uniform(0.6, 1.0), cold = rng.uniform(0.0, 0.4);
                    img.pixels.at(0, y, x) = label == 0 ? hot : cold;
                    img.pixels.at(1, y, x) = rng.uniform(0.0, 1.0);
                    img.pixels.at(2, y, x) = label == 0 ? cold : hot;
                }
            data.push_back({img, label});
        }
    }
    return data;
}

CnnModel tiny_classifier(int hw, std::uint64_t seed) {
    CnnModel m;
    m.input_shape = {3, hw, hw};
    m.layers.push_back(Layer::conv(3, 4, 3));
    m.layers.push_back(Layer::relu());
    m.layers.push_back(Layer::maxpool(2));
    m.layers.push_back(Layer::gap());
    m.layers.push_back(Layer::dense(4, 2));
    init_weights(m, seed);
    return m;
}

}  // namespace

TEST_CASE("train: zero epochs returns the seeded initialization untouched") {
    std::vector<LabeledImage> data = blob_dataset(4, 8, 71);
    CnnModel m = tiny_classifier(8, 72);
    CnnModel before = m;
    TrainConfig cfg;
    cfg.epochs = 0;
    train_model(m, data, cfg);
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        CHECK(m.layers[i].w == before.layers[i].w);
        CHECK(m.layers[i].b == before.layers[i].b);
    }
}

TEST_CASE("train: linearly separable blobs reach 100% training accuracy in 200 steps") {
    std::vector<LabeledImage> data = blob_dataset(16, 8, 81);

    // separability oracle: mean(red) - mean(blue) has a consistent sign per
    // class, so a separating plane exists in that 1-d projection
    for (const LabeledImage& s : data) {
        double red = 0, blue = 0;
        const Tensor& t = s.image.pixels;
        for (int y = 0; y < t.shape.h; ++y)
            for (int x = 0; x < t.shape.w; ++x) {
                red += t.at(0, y, x);
                blue += t.at(2, y, x);
            }
        CHECK((s.label == 0 ? red - blue : blue - red) > 0.0);
    }

    CnnModel m = tiny_classifier(8, 82);
    TrainConfig cfg;
    cfg.epochs = 100;  // 32 samples / batch 16 = 2 steps per epoch
    cfg.batch_size = 16;
    cfg.learning_rate = 5e-3;
    cfg.seed = 83;
    train_model(m, data, cfg);
    CHECK(accuracy(m, data) == doctest::Approx(1.0));
}

TEST_CASE("train: loss decreases across one epoch on the blob corpus") {
    std::vector<LabeledImage> data = blob_dataset(96, 8, 91);
    CnnModel m = tiny_classifier(8, 92);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 8;  // 24 batches
    cfg.learning_rate = 2e-3;
    cfg.seed = 93;
    TrainReport rep = train_model(m, data, cfg);
    REQUIRE(rep.batch_loss.size() >= 20);
    double first = 0, last = 0;
    for (int i = 0; i < 10; ++i) {
        first += rep.batch_loss[i];
        last += rep.batch_loss[rep.batch_loss.size() - 10 + i];
    }
    CHECK(last / 10.0 < first / 10.0);
}

TEST_CASE("train: fixed seed is bit-reproducible") {
    std::vector<LabeledImage> data = blob_dataset(8, 8, 101);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 4;
    cfg.seed = 102;

    CnnModel m1 = tiny_classifier(8, 103);
    CnnModel m2 = tiny_classifier(8, 103);
    train_model(m1, data, cfg);
    train_model(m2, data, cfg);
    for (std::size_t i = 0; i < m1.layers.size(); ++i) {
        CHECK(m1.layers[i].w == m2.layers[i].w);
        CHECK(m1.layers[i].b == m2.layers[i].b);
    }
}

TEST_CASE("train rejects empty datasets and mixed shapes") {
    TrainConfig cfg;
    CHECK_THROWS_AS(train({}, cfg), EmptyDataset);

    std::vector<LabeledImage> mixed = blob_dataset(2, 8, 111);
    std::vector<LabeledImage> other = blob_dataset(1, 16, 112);
    mixed.push_back(other[0]);
    CnnModel m = tiny_classifier(8, 113);
    CHECK_THROWS_AS(train_model(m, mixed, cfg), ShapeMismatch);
}

TEST_CASE("forward rejects inputs of the wrong shape") {
    CnnModel m = small_model(8, 121);
    Image wrong(4, 4);
    CHECK_THROWS_AS(forward_features(m, wrong), ShapeMismatch);
}

#include "semlens/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "semlens/png_io.hpp"
#include "semlens/util.hpp"

namespace semlens {

void CorpusSpec::validate() const {
    if (per_class < 1) throw InvalidParam("per-class sample count must be >= 1");
    if (source == Source::Synthetic && image_size < 32)
        throw InvalidParam("synthetic corpus needs image size >= 32 to fit the parts");
    if (image_size < 1) throw InvalidParam("image size must be >= 1");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct Painter {
    Image& img;
    std::vector<int>* record = nullptr;

    void set(int y, int x, const std::array<double, 3>& color) {
        const int H = img.height(), W = img.width();
        if (y < 0 || y >= H || x < 0 || x >= W) return;
        for (int c = 0; c < 3; ++c) img.pixels.at(c, y, x) = color[c];
        if (record) record->push_back(y * W + x);
    }

    void disc(double cy, double cx, double r, const std::array<double, 3>& color) {
        for (int y = static_cast<int>(cy - r) - 1; y <= static_cast<int>(cy + r) + 1; ++y)
            for (int x = static_cast<int>(cx - r) - 1; x <= static_cast<int>(cx + r) + 1; ++x)
                if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r) set(y, x, color);
    }

    void rect(double cy, double cx, double hh, double hw, const std::array<double, 3>& color) {
        for (int y = static_cast<int>(std::ceil(cy - hh)); y <= static_cast<int>(std::floor(cy + hh)); ++y)
            for (int x = static_cast<int>(std::ceil(cx - hw)); x <= static_cast<int>(std::floor(cx + hw)); ++x)
                set(y, x, color);
    }

    // downward-pointing triangle with apex depth h below the top edge
    void wedge(double top_y, double cx, double hw, double h, const std::array<double, 3>& color) {
        for (int y = static_cast<int>(top_y); y <= static_cast<int>(top_y + h); ++y) {
            const double t = h > 0 ? (y - top_y) / h : 1.0;
            const double half = hw * (1.0 - t);
            for (int x = static_cast<int>(std::ceil(cx - half)); x <= static_cast<int>(std::floor(cx + half)); ++x)
                set(y, x, color);
        }
    }
};

std::array<double, 3> jitter_color(Rng& rng, std::array<double, 3> base, double amount) {
    for (double& c : base) c = std::clamp(c + rng.uniform(-amount, amount), 0.02, 0.98);
    return base;
}

SyntheticSample draw_sample(int label, int size, std::uint64_t seed) {
    Rng rng(seed);
    SyntheticSample sample;
    sample.label = label;
    sample.image = Image(size, size);
    const double u = size;

    // background with faint hash noise
    const std::array<double, 3> bg = jitter_color(rng, {0.82, 0.84, 0.88}, 0.05);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const std::uint64_t h = splitmix64(seed ^ (static_cast<std::uint64_t>(y) * size + x));
            for (int c = 0; c < 3; ++c) {
                const double n = ((h >> (c * 16)) % 1024) / 1024.0 - 0.5;
                sample.image.pixels.at(c, y, x) = std::clamp(bg[c] + 0.03 * n, 0.0, 1.0);
            }
        }
    }

    const double cx = u / 2 + rng.uniform(-u / 16, u / 16);
    const double cy = u / 2 - u / 16 + rng.uniform(-u / 16, u / 16);
    Painter paint{sample.image};

    std::array<double, 3> eye_color, nose_color, leg_color;
    double eye_l_y, eye_l_x, eye_r_y, eye_r_x, eye_size;
    double nose_top, nose_cx, nose_hw, nose_h;
    std::vector<std::array<double, 4>> legs;  // cy, cx, hh, hw

    if (label == 0) {
        // round creature: disc body, round eyes, wedge nose, two thin legs
        const double r = u / 4 + rng.uniform(-u / 20, u / 20);
        const auto body = jitter_color(rng, {0.85, 0.55, 0.25}, 0.06);
        paint.disc(cy, cx, r, body);
        eye_color = jitter_color(rng, {0.10, 0.45, 0.15}, 0.04);
        eye_size = std::max(1.5, 0.18 * r + rng.uniform(-0.5, 0.5));
        eye_l_x = cx - 0.45 * r;
        eye_r_x = cx + 0.45 * r;
        eye_l_y = eye_r_y = cy - 0.35 * r + rng.uniform(-1.0, 1.0);
        nose_color = jitter_color(rng, {0.95, 0.55, 0.65}, 0.04);
        nose_top = cy + 0.15 * r;
        nose_cx = cx;
        nose_hw = 0.25 * r;
        nose_h = 0.35 * r;
        leg_color = jitter_color(rng, {0.60, 0.35, 0.15}, 0.04);
        const double leg_top = cy + 0.85 * r;
        const double leg_len = std::min(0.8 * r, u - 2 - leg_top);
        for (double off : {-0.5, 0.5})
            legs.push_back({leg_top + leg_len / 2, cx + off * r, leg_len / 2, std::max(1.0, 0.10 * r)});
    } else {
        // boxy creature: square body, square eyes, bar nose, four wide legs
        const double a = u / 4 + rng.uniform(-u / 20, u / 20);
        const auto body = jitter_color(rng, {0.35, 0.45, 0.65}, 0.06);
        paint.rect(cy, cx, a, a, body);
        eye_color = jitter_color(rng, {0.90, 0.85, 0.20}, 0.04);
        eye_size = std::max(1.5, 0.16 * a + rng.uniform(-0.5, 0.5));
        eye_l_x = cx - 0.45 * a;
        eye_r_x = cx + 0.45 * a;
        eye_l_y = eye_r_y = cy - 0.40 * a + rng.uniform(-1.0, 1.0);
        nose_color = jitter_color(rng, {0.35, 0.20, 0.12}, 0.04);
        nose_top = cy + 0.10 * a;
        nose_cx = cx;
        nose_hw = 0.40 * a;
        nose_h = 0.25 * a;
        leg_color = jitter_color(rng, {0.20, 0.25, 0.40}, 0.04);
        const double leg_top = cy + a;
        const double leg_len = std::min(0.6 * a, u - 2 - leg_top);
        for (double off : {-0.7, -0.25, 0.25, 0.7})
            legs.push_back({leg_top + leg_len / 2, cx + off * a, leg_len / 2, std::max(1.0, 0.14 * a)});
    }

    sample.base = sample.image;  // body + background only

    auto& eye_pixels = sample.parts["eyes"];
    paint.record = &eye_pixels;
    if (label == 0) {
        paint.disc(eye_l_y, eye_l_x, eye_size, eye_color);
        paint.disc(eye_r_y, eye_r_x, eye_size, eye_color);
    } else {
        paint.rect(eye_l_y, eye_l_x, eye_size, eye_size, eye_color);
        paint.rect(eye_r_y, eye_r_x, eye_size, eye_size, eye_color);
    }

    paint.record = &sample.parts["nose"];
    if (label == 0)
        paint.wedge(nose_top, nose_cx, nose_hw, nose_h, nose_color);
    else
        paint.rect(nose_top + nose_h / 2, nose_cx, nose_h / 2, nose_hw, nose_color);

    paint.record = &sample.parts["legs"];
    for (const auto& [ly, lx, hh, hw] : legs) paint.rect(ly, lx, hh, hw, leg_color);

    // overlapping draws may record a pixel twice
    for (auto& [_, pixels] : sample.parts) {
        std::sort(pixels.begin(), pixels.end());
        pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
    }
    return sample;
}

}  // namespace

Corpus generate_synthetic_corpus(const CorpusSpec& spec) {
    spec.validate();
    Corpus corpus;
    corpus.class_names = spec.class_names;
    corpus.samples.reserve(static_cast<std::size_t>(spec.per_class) * 2);
    for (int label = 0; label < 2; ++label) {
        for (int i = 0; i < spec.per_class; ++i) {
            const std::uint64_t s = splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(label) << 32 | i));
            corpus.samples.push_back(draw_sample(label, spec.image_size, s));
        }
    }
    return corpus;
}

Image mask_part(const SyntheticSample& sample, const std::string& concept_name) {
    auto it = sample.parts.find(concept_name);
    if (it == sample.parts.end()) throw InvalidParam("sample has no part named '" + concept_name + "'");
    Image out = sample.image;
    const int W = out.width();
    for (int idx : it->second) {
        const int y = idx / W, x = idx % W;
        for (int c = 0; c < 3; ++c) out.pixels.at(c, y, x) = sample.base.pixels.at(c, y, x);
    }
    return out;
}

Corpus load_folder_corpus(const CorpusSpec& spec) {
    spec.validate();
    namespace fs = std::filesystem;
    Corpus corpus;
    corpus.class_names = spec.class_names;
    for (int label = 0; label < 2; ++label) {
        const fs::path dir = fs::path(spec.folder) / spec.class_names[label];
        if (!fs::is_directory(dir)) throw IoError("class directory not found: " + dir.string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw EmptyDataset("no PNG files in " + dir.string());
        for (const auto& f : files) {
            SyntheticSample s;
            s.label = label;
            s.image.pixels = resize_nearest(read_rgb_png(f.string()), spec.image_size, spec.image_size);
            corpus.samples.push_back(std::move(s));
        }
    }
    return corpus;
}

std::vector<LabeledImage> to_labeled(const Corpus& corpus) {
    std::vector<LabeledImage> out;
    out.reserve(corpus.samples.size());
    for (const auto& s : corpus.samples) out.push_back({s.image, s.label});
    return out;
}

std::vector<Image> class_images(const Corpus& corpus, int label) {
    std::vector<Image> out;
    for (const auto& s : corpus.samples)
        if (s.label == label) out.push_back(s.image);
    return out;
}

}  // namespace semlens

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "semlens/errors.hpp"

namespace semlens {

struct TensorShape {
    int c = 0;
    int h = 0;
    int w = 0;

    std::size_t size() const { return static_cast<std::size_t>(c) * h * w; }
    bool operator==(const TensorShape& o) const { return c == o.c && h == o.h && w == o.w; }
    bool operator!=(const TensorShape& o) const { return !(*this == o); }
};

// Dense C x H x W tensor, channel-major.
struct Tensor {
    TensorShape shape;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c, int h, int w) : shape{c, h, w}, v(shape.size(), 0.0) {}
    explicit Tensor(TensorShape s) : shape(s), v(s.size(), 0.0) {}

    double& at(int c, int y, int x) { return v[(static_cast<std::size_t>(c) * shape.h + y) * shape.w + x]; }
    double at(int c, int y, int x) const { return v[(static_cast<std::size_t>(c) * shape.h + y) * shape.w + x]; }

    double* row(int c, int y) { return v.data() + (static_cast<std::size_t>(c) * shape.h + y) * shape.w; }
    const double* row(int c, int y) const { return v.data() + (static_cast<std::size_t>(c) * shape.h + y) * shape.w; }

    bool operator==(const Tensor& o) const { return shape == o.shape && v == o.v; }
};

// Per-channel standardization statistics. Defaults to the identity transform.
struct Normalization {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::array<double, 3> stdev{1.0, 1.0, 1.0};

    bool operator==(const Normalization& o) const { return mean == o.mean && stdev == o.stdev; }
};

// RGB image with raw values in [0,1]; the standardization stats that apply to
// it are carried alongside.
struct Image {
    Tensor pixels;  // C=3
    Normalization norm;

    Image() = default;
    explicit Image(int h, int w) : pixels(3, h, w) {}

    int height() const { return pixels.shape.h; }
    int width() const { return pixels.shape.w; }

    void require_rgb() const {
        if (pixels.shape.c != 3) throw ShapeMismatch("expected a 3-channel image");
    }
};

}  // namespace semlens

#pragma once

#include <set>
#include <vector>

#include "semlens/tensor.hpp"

namespace semlens {

struct LabImage {
    int h = 0, w = 0;
    std::vector<double> l, a, b;  // row-major H x W

    std::size_t idx(int y, int x) const { return static_cast<std::size_t>(y) * w + x; }
};

// sRGB (values in [0,1]) to CIELAB under the D65 reference white.
LabImage rgb_to_lab(const Image& image);

struct SlicParams {
    int k = 40;                       // requested superpixel count k_s
    double compactness = 10.0;        // color normalizer N_c
    int max_iter = 10;
    double residual_threshold = 1e-3; // total center movement in [lab,xy] units
};

struct ClusterCenter {
    double l = 0, a = 0, b = 0, x = 0, y = 0;
};

struct Segmentation {
    int h = 0, w = 0;
    std::vector<int> labels;  // H x W, one label per pixel
    std::vector<ClusterCenter> centers;
    int requested_k = 0;           // k_s
    double grid_interval = 0.0;    // S = sqrt(pixel_count / k_s)
    double compactness = 0.0;      // N_c
    double spatial_normalizer = 0.0;  // the D-metric spatial divisor; equals S here
    std::vector<double> residual_trace;  // total center movement per iteration

    int num_segments() const { return static_cast<int>(centers.size()); }
    int label_at(int y, int x) const { return labels[static_cast<std::size_t>(y) * w + x]; }
    std::vector<int> segment_sizes() const;
};

// Seeded k-means superpixel clustering in [l,a,b,x,y] space with windowed
// assignment, gradient-based seed perturbation and connectivity enforcement.
Segmentation slic_segment(const Image& image, const SlicParams& params);

struct MaskSpec {
    std::set<int> targets;
    int fill = 0;
};

// Replaces every pixel of the target segments with the mean color of the fill
// segment; all other pixels are returned bit-identical.
Image mask_segments(const Image& image, const Segmentation& seg, const MaskSpec& spec);

}  // namespace semlens

#include "semlens/slic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace semlens {

namespace {

double srgb_linearize(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

LabImage rgb_to_lab(const Image& image) {
    image.require_rgb();
    const int H = image.height(), W = image.width();
    LabImage lab;
    lab.h = H;
    lab.w = W;
    lab.l.resize(static_cast<std::size_t>(H) * W);
    lab.a.resize(lab.l.size());
    lab.b.resize(lab.l.size());

    constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;  // D65
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const double r = srgb_linearize(image.pixels.at(0, y, x));
            const double g = srgb_linearize(image.pixels.at(1, y, x));
            const double b = srgb_linearize(image.pixels.at(2, y, x));
            const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
            const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
            const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
            const double fx = lab_f(X / xn), fy = lab_f(Y / yn), fz = lab_f(Z / zn);
            const std::size_t i = lab.idx(y, x);
            lab.l[i] = 116.0 * fy - 16.0;
            lab.a[i] = 500.0 * (fx - fy);
            lab.b[i] = 200.0 * (fy - fz);
        }
    }
    return lab;
}

std::vector<int> Segmentation::segment_sizes() const {
    std::vector<int> sizes(centers.size(), 0);
    for (int l : labels) ++sizes[l];
    return sizes;
}

namespace {

// squared Lab-space gradient, used to nudge seeds off edges
double pixel_gradient(const LabImage& lab, int y, int x) {
    const int xl = std::max(0, x - 1), xr = std::min(lab.w - 1, x + 1);
    const int yu = std::max(0, y - 1), yd = std::min(lab.h - 1, y + 1);
    auto d2 = [&](std::size_t i, std::size_t j) {
        const double dl = lab.l[i] - lab.l[j];
        const double da = lab.a[i] - lab.a[j];
        const double db = lab.b[i] - lab.b[j];
        return dl * dl + da * da + db * db;
    };
    return d2(lab.idx(y, xr), lab.idx(y, xl)) + d2(lab.idx(yd, x), lab.idx(yu, x));
}

// Merges every connected component that is not the largest one of its label
// into the biggest adjacent segment.
void enforce_connectivity(Segmentation& seg) {
    const int H = seg.h, W = seg.w;
    const int n = H * W;
    std::vector<int> comp(n, -1);
    std::vector<int> comp_label;
    std::vector<int> comp_size;
    std::vector<std::vector<int>> comp_pixels;

    const int dy[4] = {-1, 1, 0, 0};
    const int dx[4] = {0, 0, -1, 1};

    for (int start = 0; start < n; ++start) {
        if (comp[start] >= 0) continue;
        const int id = static_cast<int>(comp_label.size());
        const int label = seg.labels[start];
        comp_label.push_back(label);
        comp_pixels.emplace_back();
        std::deque<int> queue{start};
        comp[start] = id;
        while (!queue.empty()) {
            const int p = queue.front();
            queue.pop_front();
            comp_pixels[id].push_back(p);
            const int py = p / W, px = p % W;
            for (int d = 0; d < 4; ++d) {
                const int ny = py + dy[d], nx = px + dx[d];
                if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
                const int q = ny * W + nx;
                if (comp[q] < 0 && seg.labels[q] == label) {
                    comp[q] = id;
                    queue.push_back(q);
                }
            }
        }
        comp_size.push_back(static_cast<int>(comp_pixels[id].size()));
    }

    // canonical component per label = the largest one
    std::vector<int> canonical(seg.centers.size(), -1);
    for (std::size_t c = 0; c < comp_label.size(); ++c) {
        const int l = comp_label[c];
        if (canonical[l] < 0 || comp_size[c] > comp_size[canonical[l]])
            canonical[l] = static_cast<int>(c);
    }

    // absorb orphan components, largest first so later orphans can attach to
    // already-merged neighbors
    std::vector<int> orphan;
    for (std::size_t c = 0; c < comp_label.size(); ++c)
        if (static_cast<int>(c) != canonical[comp_label[c]]) orphan.push_back(static_cast<int>(c));
    std::sort(orphan.begin(), orphan.end(), [&](int a, int b) { return comp_size[a] > comp_size[b]; });

    std::vector<int> seg_sizes(seg.centers.size(), 0);
    for (int l : seg.labels) ++seg_sizes[l];

    for (int c : orphan) {
        const int own = comp_label[c];
        int best = -1;
        for (int p : comp_pixels[c]) {
            const int py = p / W, px = p % W;
            for (int d = 0; d < 4; ++d) {
                const int ny = py + dy[d], nx = px + dx[d];
                if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
                const int l = seg.labels[static_cast<std::size_t>(ny) * W + nx];
                if (l == own) continue;
                if (best < 0 || seg_sizes[l] > seg_sizes[best] || (seg_sizes[l] == seg_sizes[best] && l < best))
                    best = l;
            }
        }
        if (best < 0) continue;  // component touches nothing foreign (single-label image)
        for (int p : comp_pixels[c]) seg.labels[p] = best;
        seg_sizes[best] += comp_size[c];
        seg_sizes[own] -= comp_size[c];
    }
}

// Drops empty segments and renumbers labels consecutively; recomputes centers
// as the member means.
void compact_segments(Segmentation& seg, const LabImage& lab) {
    std::vector<int> sizes(seg.centers.size(), 0);
    for (int l : seg.labels) ++sizes[l];
    std::vector<int> remap(seg.centers.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] > 0) remap[i] = next++;
    for (int& l : seg.labels) l = remap[l];

    std::vector<ClusterCenter> centers(next);
    std::vector<int> count(next, 0);
    for (int y = 0; y < seg.h; ++y) {
        for (int x = 0; x < seg.w; ++x) {
            const int l = seg.label_at(y, x);
            const std::size_t i = lab.idx(y, x);
            centers[l].l += lab.l[i];
            centers[l].a += lab.a[i];
            centers[l].b += lab.b[i];
            centers[l].x += x;
            centers[l].y += y;
            ++count[l];
        }
    }
    for (int i = 0; i < next; ++i) {
        centers[i].l /= count[i];
        centers[i].a /= count[i];
        centers[i].b /= count[i];
        centers[i].x /= count[i];
        centers[i].y /= count[i];
    }
    seg.centers = std::move(centers);
}

}  // namespace

Segmentation slic_segment(const Image& image, const SlicParams& params) {
    image.require_rgb();
    const int H = image.height(), W = image.width();
    const int n_pixels = H * W;
    if (params.k < 1 || params.k > n_pixels) throw InvalidParam("superpixel count must be in [1, pixel count]");
    if (params.max_iter < 1) throw InvalidParam("max_iter must be >= 1");

    const LabImage lab = rgb_to_lab(image);
    const double S = std::sqrt(static_cast<double>(n_pixels) / params.k);

    Segmentation seg;
    seg.h = H;
    seg.w = W;
    seg.requested_k = params.k;
    seg.grid_interval = S;
    seg.compactness = params.compactness;
    seg.spatial_normalizer = S;
    seg.labels.assign(n_pixels, 0);

    // even grid of at most k seeds
    int ny = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(params.k) * H / W))));
    int nx = std::max(1, params.k / ny);
    while (nx * ny > params.k) --nx;
    if (nx < 1) nx = 1;

    for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx) {
            int sx = static_cast<int>((2 * gx + 1) * W / (2.0 * nx));
            int sy = static_cast<int>((2 * gy + 1) * H / (2.0 * ny));
            sx = std::clamp(sx, 0, W - 1);
            sy = std::clamp(sy, 0, H - 1);
            // move to the lowest-gradient pixel in the 3x3 neighborhood
            double best = pixel_gradient(lab, sy, sx);
            int bx = sx, by = sy;
            for (int oy = -1; oy <= 1; ++oy) {
                for (int ox = -1; ox <= 1; ++ox) {
                    const int cx = sx + ox, cy = sy + oy;
                    if (cx < 0 || cx >= W || cy < 0 || cy >= H) continue;
                    const double g = pixel_gradient(lab, cy, cx);
                    if (g < best) {
                        best = g;
                        bx = cx;
                        by = cy;
                    }
                }
            }
            const std::size_t i = lab.idx(by, bx);
            seg.centers.push_back({lab.l[i], lab.a[i], lab.b[i], static_cast<double>(bx), static_cast<double>(by)});
        }
    }

    const int n_centers = static_cast<int>(seg.centers.size());
    const double inv_nc2 = 1.0 / (params.compactness * params.compactness);
    const double inv_s2 = 1.0 / (S * S);
    std::vector<double> best_dist(n_pixels);

    for (int iter = 0; iter < params.max_iter; ++iter) {
        std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<double>::infinity());
        const int win = static_cast<int>(std::ceil(S));
        for (int c = 0; c < n_centers; ++c) {
            const ClusterCenter& ctr = seg.centers[c];
            const int cx = static_cast<int>(std::lround(ctr.x));
            const int cy = static_cast<int>(std::lround(ctr.y));
            const int y0 = std::max(0, cy - win), y1 = std::min(H - 1, cy + win);
            const int x0 = std::max(0, cx - win), x1 = std::min(W - 1, cx + win);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const std::size_t i = lab.idx(y, x);
                    const double dl = lab.l[i] - ctr.l;
                    const double da = lab.a[i] - ctr.a;
                    const double db = lab.b[i] - ctr.b;
                    const double dxp = x - ctr.x;
                    const double dyp = y - ctr.y;
                    const double d2 = (dl * dl + da * da + db * db) * inv_nc2 + (dxp * dxp + dyp * dyp) * inv_s2;
                    if (d2 < best_dist[i]) {
                        best_dist[i] = d2;
                        seg.labels[i] = c;
                    }
                }
            }
        }
        // pixels missed by every window fall back to the spatially nearest center
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const std::size_t i = lab.idx(y, x);
                if (std::isfinite(best_dist[i])) continue;
                double best = std::numeric_limits<double>::infinity();
                for (int c = 0; c < n_centers; ++c) {
                    const double dxp = x - seg.centers[c].x;
                    const double dyp = y - seg.centers[c].y;
                    const double d2 = dxp * dxp + dyp * dyp;
                    if (d2 < best) {
                        best = d2;
                        seg.labels[i] = c;
                    }
                }
            }
        }

        // recompute centers; residual = total center movement
        std::vector<ClusterCenter> fresh(n_centers);
        std::vector<int> count(n_centers, 0);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const std::size_t i = lab.idx(y, x);
                const int c = seg.labels[i];
                fresh[c].l += lab.l[i];
                fresh[c].a += lab.a[i];
                fresh[c].b += lab.b[i];
                fresh[c].x += x;
                fresh[c].y += y;
                ++count[c];
            }
        }
        double residual = 0.0;
        for (int c = 0; c < n_centers; ++c) {
            if (count[c] == 0) continue;  // empty cluster keeps its old center
            fresh[c].l /= count[c];
            fresh[c].a /= count[c];
            fresh[c].b /= count[c];
            fresh[c].x /= count[c];
            fresh[c].y /= count[c];
            const double dl = fresh[c].l - seg.centers[c].l;
            const double da = fresh[c].a - seg.centers[c].a;
            const double db = fresh[c].b - seg.centers[c].b;
            const double dx = fresh[c].x - seg.centers[c].x;
            const double dy = fresh[c].y - seg.centers[c].y;
            residual += std::sqrt(dl * dl + da * da + db * db + dx * dx + dy * dy);
            seg.centers[c] = fresh[c];
        }
        seg.residual_trace.push_back(residual);
        if (residual < params.residual_threshold) break;
    }

    enforce_connectivity(seg);
    compact_segments(seg, lab);
    return seg;
}

Image mask_segments(const Image& image, const Segmentation& seg, const MaskSpec& spec) {
    image.require_rgb();
    if (image.height() != seg.h || image.width() != seg.w)
        throw ShapeMismatch("segmentation size does not match image");
    if (spec.fill < 0 || spec.fill >= seg.num_segments()) throw InvalidParam("fill segment id out of range");
    if (spec.targets.count(spec.fill)) throw InvalidParam("fill segment must not be a target");
    for (int t : spec.targets)
        if (t < 0 || t >= seg.num_segments()) throw InvalidParam("target segment id out of range");

    // mean RGB of the fill segment
    double mean[3] = {0, 0, 0};
    int count = 0;
    for (int y = 0; y < seg.h; ++y) {
        for (int x = 0; x < seg.w; ++x) {
            if (seg.label_at(y, x) != spec.fill) continue;
            for (int c = 0; c < 3; ++c) mean[c] += image.pixels.at(c, y, x);
            ++count;
        }
    }
    if (count == 0) throw InvalidParam("fill segment is empty");
    for (double& m : mean) m /= count;

    Image out = image;
    for (int y = 0; y < seg.h; ++y) {
        for (int x = 0; x < seg.w; ++x) {
            if (!spec.targets.count(seg.label_at(y, x))) continue;
            for (int c = 0; c < 3; ++c) out.pixels.at(c, y, x) = mean[c];
        }
    }
    return out;
}

}  // namespace semlens

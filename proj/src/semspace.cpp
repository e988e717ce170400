#include "semlens/semspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace semlens {

SemanticSpace discover_ssns(const std::vector<double>& pc_unmask,
                            const std::vector<double>& pc_mask, int n) {
    if (pc_unmask.size() != pc_mask.size())
        throw ShapeMismatch("masked and unmasked PC score vectors differ in length");
    if (n < 1 || static_cast<std::size_t>(n) > pc_unmask.size())
        throw InvalidParam("SSN count must be in [1, p]");

    double dot = 0.0;
    for (std::size_t i = 0; i < pc_unmask.size(); ++i) dot += pc_unmask[i] * pc_mask[i];
    const double sign = dot < 0.0 ? -1.0 : 1.0;

    std::vector<double> d(pc_unmask.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = pc_unmask[i] - sign * pc_mask[i];

    std::vector<int> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    // descending |d|, ties broken by lower index
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return std::abs(d[a]) > std::abs(d[b]); });

    if (std::abs(d[idx[0]]) == 0.0)
        throw DegenerateDifference("masked and unmasked common traits are identical");

    SemanticSpace space;
    space.ssn.assign(idx.begin(), idx.begin() + n);
    space.delta.resize(n);
    for (int i = 0; i < n; ++i) space.delta[i] = d[space.ssn[i]];
    return space;
}

TargetEncoding build_target_encoding(const SemanticSpace& space, int feature_width, double scale) {
    if (scale <= 0.0) throw InvalidParam("scale must be > 0");
    if (space.ssn.empty()) throw InvalidParam("semantic space has no SSNs");
    double max_abs = 0.0;
    for (double d : space.delta) max_abs = std::max(max_abs, std::abs(d));
    if (max_abs == 0.0) throw DegenerateDifference("all SSN differences are zero");

    TargetEncoding enc;
    enc.scale = scale;
    enc.values.assign(feature_width, 0.0);
    for (std::size_t i = 0; i < space.ssn.size(); ++i) {
        const int j = space.ssn[i];
        if (j < 0 || j >= feature_width) throw ShapeMismatch("SSN index outside feature width");
        enc.values[j] = scale * space.delta[i] / max_abs;
    }
    return enc;
}

TvResult tv_regularizer(const Tensor& z, double beta) {
    if (beta <= 0.0) throw InvalidParam("beta must be > 0");
    TvResult res;
    res.grad = Tensor(z.shape);
    const int H = z.shape.h, W = z.shape.w;
    const double half_beta = beta / 2.0;
    for (int c = 0; c < z.shape.c; ++c) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const bool has_dx = x + 1 < W;
                const bool has_dy = y + 1 < H;
                if (!has_dx && !has_dy) continue;
                const double dx = has_dx ? z.at(c, y, x + 1) - z.at(c, y, x) : 0.0;
                const double dy = has_dy ? z.at(c, y + 1, x) - z.at(c, y, x) : 0.0;
                const double u = dx * dx + dy * dy;
                res.value += std::pow(u, half_beta);
                if (u == 0.0) continue;  // smooth minimum for beta > 1, gradient 0
                const double du = half_beta * std::pow(u, half_beta - 1.0);
                if (has_dx) {
                    res.grad.at(c, y, x + 1) += du * 2.0 * dx;
                    res.grad.at(c, y, x) -= du * 2.0 * dx;
                }
                if (has_dy) {
                    res.grad.at(c, y + 1, x) += du * 2.0 * dy;
                    res.grad.at(c, y, x) -= du * 2.0 * dy;
                }
            }
        }
    }
    return res;
}

void VisConfig::validate() const {
    if (lambda <= 0.0 || beta <= 0.0 || learning_rate <= 0.0 || halving_interval <= 0 || max_iters <= 0)
        throw InvalidParam("all visualization parameters must be positive");
}

VisResult visualize(const CnnModel& model, const TargetEncoding& target, const VisConfig& config) {
    config.validate();
    if (target.values.size() != static_cast<std::size_t>(model.feature_width()))
        throw ShapeMismatch("target encoding length does not match model feature width");

    Tensor z(model.input_shape);  // blank figure: all zeros after standardization
    VisResult res;
    res.objective_trace.reserve(config.max_iters);
    for (int step = 0; step < config.max_iters; ++step) {
        ObjectiveResult obj = objective_gradient(model, z, target.values, config.lambda, config.beta);
        if (!std::isfinite(obj.value)) throw DivergedOptimization("visualization objective is not finite");
        res.objective_trace.push_back(obj.value);
        const double lr = config.learning_rate * std::pow(0.5, step / config.halving_interval);
        for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] -= lr * obj.grad.v[i];
    }
    res.image.pixels = destandardize(model.norm, z);
    res.image.norm = model.norm;
    res.optimized = std::move(z);
    return res;
}

ObjectiveResult objective_gradient(const CnnModel& model, const Image& image,
                                   const TargetEncoding& target, double lambda, double beta) {
    return objective_gradient(model, image, target.values, lambda, beta);
}

}  // namespace semlens

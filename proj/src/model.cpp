#include "semlens/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "semlens/semspace.hpp"
#include "semlens/util.hpp"

namespace semlens {

Layer Layer::conv(int in_ch, int out_ch, int ksize) {
    if (in_ch < 1 || out_ch < 1 || ksize < 1 || ksize % 2 == 0)
        throw InvalidParam("conv layer needs positive channels and an odd kernel size");
    Layer l;
    l.kind = LayerKind::Conv;
    l.in_ch = in_ch;
    l.out_ch = out_ch;
    l.ksize = ksize;
    l.w.assign(static_cast<std::size_t>(out_ch) * in_ch * ksize * ksize, 0.0);
    l.b.assign(out_ch, 0.0);
    return l;
}

Layer Layer::relu() {
    Layer l;
    l.kind = LayerKind::Relu;
    return l;
}

Layer Layer::maxpool(int k) {
    if (k < 1) throw InvalidParam("pool size must be >= 1");
    Layer l;
    l.kind = LayerKind::MaxPool;
    l.pool = k;
    return l;
}

Layer Layer::gap() {
    Layer l;
    l.kind = LayerKind::Gap;
    return l;
}

Layer Layer::dense(int in, int out) {
    if (in < 1 || out < 1) throw InvalidParam("dense layer needs positive sizes");
    Layer l;
    l.kind = LayerKind::Dense;
    l.in_ch = in;
    l.out_ch = out;
    l.w.assign(static_cast<std::size_t>(in) * out, 0.0);
    l.b.assign(out, 0.0);
    return l;
}

int CnnModel::feature_width() const {
    int ch = input_shape.c;
    for (const Layer& l : layers) {
        if (l.kind == LayerKind::Conv) ch = l.out_ch;
        if (l.kind == LayerKind::Gap) return ch;
    }
    throw InvalidParam("model has no GAP layer");
}

bool CnnModel::has_dense() const {
    for (const Layer& l : layers)
        if (l.kind == LayerKind::Dense) return true;
    return false;
}

int CnnModel::num_classes() const {
    for (const Layer& l : layers)
        if (l.kind == LayerKind::Dense) return l.out_ch;
    throw InvalidParam("model has no dense classifier");
}

void CnnModel::validate() const {
    if (input_shape.c < 1 || input_shape.h < 1 || input_shape.w < 1)
        throw InvalidParam("model input shape must be positive");
    int gap_count = 0;
    bool seen_gap = false;
    bool seen_dense = false;
    int ch = input_shape.c;
    for (const Layer& l : layers) {
        switch (l.kind) {
            case LayerKind::Conv:
                if (seen_gap) throw InvalidParam("conv layer after GAP");
                if (l.in_ch != ch) throw InvalidParam("conv input channels do not chain");
                if (l.w.size() != static_cast<std::size_t>(l.out_ch) * l.in_ch * l.ksize * l.ksize ||
                    l.b.size() != static_cast<std::size_t>(l.out_ch))
                    throw InvalidParam("conv weight array size mismatch");
                ch = l.out_ch;
                break;
            case LayerKind::Relu:
            case LayerKind::MaxPool:
                if (seen_gap) throw InvalidParam("spatial layer after GAP");
                break;
            case LayerKind::Gap:
                ++gap_count;
                seen_gap = true;
                break;
            case LayerKind::Dense:
                if (!seen_gap) throw InvalidParam("dense classifier must come after GAP");
                if (seen_dense) throw InvalidParam("more than one dense layer");
                if (l.in_ch != ch) throw InvalidParam("dense input width does not match GAP output");
                if (l.w.size() != static_cast<std::size_t>(l.in_ch) * l.out_ch ||
                    l.b.size() != static_cast<std::size_t>(l.out_ch))
                    throw InvalidParam("dense weight array size mismatch");
                seen_dense = true;
                break;
        }
        for (double x : l.w)
            if (!std::isfinite(x)) throw InvalidInput("non-finite weight");
        for (double x : l.b)
            if (!std::isfinite(x)) throw InvalidInput("non-finite bias");
    }
    if (gap_count != 1) throw InvalidParam("model must contain exactly one GAP layer");
}

void init_weights(CnnModel& model, std::uint64_t seed) {
    Rng rng(seed);
    model.seed = seed;
    for (Layer& l : model.layers) {
        if (l.kind != LayerKind::Conv && l.kind != LayerKind::Dense) continue;
        int fan_in = l.kind == LayerKind::Conv ? l.in_ch * l.ksize * l.ksize : l.in_ch;
        double limit = std::sqrt(6.0 / fan_in);
        for (double& x : l.w) x = rng.uniform(-limit, limit);
        for (double& x : l.b) x = 0.0;
    }
}

CnnModel make_desk_model(int input_hw, int classes, std::uint64_t seed) {
    CnnModel m;
    m.input_shape = {3, input_hw, input_hw};
    m.layers.push_back(Layer::conv(3, 16, 3));
    m.layers.push_back(Layer::relu());
    m.layers.push_back(Layer::maxpool(2));
    m.layers.push_back(Layer::conv(16, 32, 3));
    m.layers.push_back(Layer::relu());
    m.layers.push_back(Layer::maxpool(2));
    m.layers.push_back(Layer::conv(32, 64, 3));
    m.layers.push_back(Layer::relu());
    m.layers.push_back(Layer::maxpool(2));
    m.layers.push_back(Layer::gap());
    m.layers.push_back(Layer::dense(64, classes));
    init_weights(m, seed);
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------

Tensor standardize(const Normalization& norm, const Tensor& raw) {
    Tensor out(raw.shape);
    for (int c = 0; c < raw.shape.c; ++c) {
        const double mu = norm.mean[c];
        const double inv = 1.0 / norm.stdev[c];
        const std::size_t base = static_cast<std::size_t>(c) * raw.shape.h * raw.shape.w;
        const std::size_t n = static_cast<std::size_t>(raw.shape.h) * raw.shape.w;
        for (std::size_t i = 0; i < n; ++i) out.v[base + i] = (raw.v[base + i] - mu) * inv;
    }
    return out;
}

Tensor destandardize(const Normalization& norm, const Tensor& z) {
    Tensor out(z.shape);
    for (int c = 0; c < z.shape.c; ++c) {
        const double mu = norm.mean[c];
        const double sd = norm.stdev[c];
        const std::size_t base = static_cast<std::size_t>(c) * z.shape.h * z.shape.w;
        const std::size_t n = static_cast<std::size_t>(z.shape.h) * z.shape.w;
        for (std::size_t i = 0; i < n; ++i) out.v[base + i] = z.v[base + i] * sd + mu;
    }
    return out;
}

namespace {

Tensor conv_forward(const Layer& l, const Tensor& in) {
    const int H = in.shape.h, W = in.shape.w, k = l.ksize, r = k / 2;
    Tensor out(l.out_ch, H, W);
    for (int oc = 0; oc < l.out_ch; ++oc) {
        double* obase = out.row(oc, 0);
        std::fill(obase, obase + static_cast<std::size_t>(H) * W, l.b[oc]);
        for (int ic = 0; ic < l.in_ch; ++ic) {
            const double* wk = &l.w[(static_cast<std::size_t>(oc) * l.in_ch + ic) * k * k];
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - r;
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - r;
                    const double ws = wk[ky * k + kx];
                    const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
                    const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
                    for (int y = y0; y < y1; ++y) {
                        const double* irow = in.row(ic, y + dy) + dx;
                        double* orow = out.row(oc, y);
                        for (int x = x0; x < x1; ++x) orow[x] += ws * irow[x];
                    }
                }
            }
        }
    }
    return out;
}

// Gradients of the same-padding convolution: d_in from d_out, and the weight
// and bias gradients accumulated into gw / gb when non-null.
void conv_backward(const Layer& l, const Tensor& in, const Tensor& d_out,
                   Tensor* d_in, std::vector<double>* gw, std::vector<double>* gb) {
    const int H = in.shape.h, W = in.shape.w, k = l.ksize, r = k / 2;
    for (int oc = 0; oc < l.out_ch; ++oc) {
        if (gb) {
            double s = 0.0;
            const double* orow = d_out.row(oc, 0);
            for (std::size_t i = 0; i < static_cast<std::size_t>(H) * W; ++i) s += orow[i];
            (*gb)[oc] += s;
        }
        for (int ic = 0; ic < l.in_ch; ++ic) {
            double* wgk = gw ? &(*gw)[(static_cast<std::size_t>(oc) * l.in_ch + ic) * k * k] : nullptr;
            const double* wk = &l.w[(static_cast<std::size_t>(oc) * l.in_ch + ic) * k * k];
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - r;
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - r;
                    const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
                    const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
                    if (wgk) {
                        double acc = 0.0;
                        for (int y = y0; y < y1; ++y) {
                            const double* irow = in.row(ic, y + dy) + dx;
                            const double* orow = d_out.row(oc, y);
                            for (int x = x0; x < x1; ++x) acc += irow[x] * orow[x];
                        }
                        wgk[ky * k + kx] += acc;
                    }
                    if (d_in) {
                        const double ws = wk[ky * k + kx];
                        for (int y = y0; y < y1; ++y) {
                            double* irow = d_in->row(ic, y + dy) + dx;
                            const double* orow = d_out.row(oc, y);
                            for (int x = x0; x < x1; ++x) irow[x] += ws * orow[x];
                        }
                    }
                }
            }
        }
    }
}

Tensor maxpool_forward(const Layer& l, const Tensor& in, std::vector<int>* argmax) {
    const int k = l.pool;
    const int OH = in.shape.h / k, OW = in.shape.w / k;
    if (OH < 1 || OW < 1) throw ShapeMismatch("input too small for maxpool");
    Tensor out(in.shape.c, OH, OW);
    if (argmax) argmax->assign(out.shape.size(), 0);
    for (int c = 0; c < in.shape.c; ++c) {
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                double best = -1e300;
                int best_idx = 0;
                for (int dy = 0; dy < k; ++dy) {
                    const double* irow = in.row(c, oy * k + dy);
                    for (int dx = 0; dx < k; ++dx) {
                        const double x = irow[ox * k + dx];
                        if (x > best) {
                            best = x;
                            best_idx = (c * in.shape.h + oy * k + dy) * in.shape.w + ox * k + dx;
                        }
                    }
                }
                out.at(c, oy, ox) = best;
                if (argmax) (*argmax)[(static_cast<std::size_t>(c) * OH + oy) * OW + ox] = best_idx;
            }
        }
    }
    return out;
}

}  // namespace

ForwardTrace forward(const CnnModel& model, const Tensor& input) {
    if (input.shape != model.input_shape) throw ShapeMismatch("input shape does not match model");
    ForwardTrace t;
    t.acts.push_back(input);
    for (const Layer& l : model.layers) {
        switch (l.kind) {
            case LayerKind::Conv:
                t.acts.push_back(conv_forward(l, t.acts.back()));
                break;
            case LayerKind::Relu: {
                Tensor out = t.acts.back();
                for (double& x : out.v) x = x > 0.0 ? x : 0.0;
                t.acts.push_back(std::move(out));
                break;
            }
            case LayerKind::MaxPool: {
                t.pool_argmax.emplace_back();
                t.acts.push_back(maxpool_forward(l, t.acts.back(), &t.pool_argmax.back()));
                break;
            }
            case LayerKind::Gap: {
                const Tensor& in = t.acts.back();
                const double inv = 1.0 / (static_cast<double>(in.shape.h) * in.shape.w);
                t.features.assign(in.shape.c, 0.0);
                for (int c = 0; c < in.shape.c; ++c) {
                    double s = 0.0;
                    const double* base = in.row(c, 0);
                    for (std::size_t i = 0; i < static_cast<std::size_t>(in.shape.h) * in.shape.w; ++i)
                        s += base[i];
                    t.features[c] = s * inv;
                }
                break;
            }
            case LayerKind::Dense: {
                t.logits.assign(l.out_ch, 0.0);
                for (int o = 0; o < l.out_ch; ++o) {
                    double s = l.b[o];
                    const double* wrow = &l.w[static_cast<std::size_t>(o) * l.in_ch];
                    for (int i = 0; i < l.in_ch; ++i) s += wrow[i] * t.features[i];
                    t.logits[o] = s;
                }
                t.probs = softmax(t.logits);
                break;
            }
        }
    }
    return t;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& x : p) x /= sum;
    return p;
}

std::vector<double> forward_features(const CnnModel& model, const Image& image) {
    return forward(model, standardize(model.norm, image.pixels)).features;
}

std::vector<double> predict(const CnnModel& model, const Image& image) {
    if (!model.has_dense()) throw InvalidParam("model has no dense classifier");
    return forward(model, standardize(model.norm, image.pixels)).probs;
}

std::vector<double> classify_features(const CnnModel& model, const std::vector<double>& features) {
    for (const Layer& l : model.layers) {
        if (l.kind != LayerKind::Dense) continue;
        if (features.size() != static_cast<std::size_t>(l.in_ch))
            throw ShapeMismatch("feature vector length does not match dense input");
        std::vector<double> logits(l.out_ch, 0.0);
        for (int o = 0; o < l.out_ch; ++o) {
            double s = l.b[o];
            const double* wrow = &l.w[static_cast<std::size_t>(o) * l.in_ch];
            for (int i = 0; i < l.in_ch; ++i) s += wrow[i] * features[i];
            logits[o] = s;
        }
        return softmax(logits);
    }
    throw InvalidParam("model has no dense classifier");
}

void backward(const CnnModel& model, const ForwardTrace& trace,
              const std::vector<double>* d_logits,
              const std::vector<double>* d_features,
              ParamGrads* param_grads, Tensor* d_input) {
    if ((d_logits == nullptr) == (d_features == nullptr))
        throw InvalidParam("backward needs exactly one of d_logits / d_features");
    if (param_grads) {
        param_grads->w.resize(model.layers.size());
        param_grads->b.resize(model.layers.size());
        for (std::size_t i = 0; i < model.layers.size(); ++i) {
            param_grads->w[i].assign(model.layers[i].w.size(), 0.0);
            param_grads->b[i].assign(model.layers[i].b.size(), 0.0);
        }
    }

    std::vector<double> d_feat;
    if (d_logits) {
        // through the dense classifier
        int dense_idx = -1;
        for (std::size_t i = 0; i < model.layers.size(); ++i)
            if (model.layers[i].kind == LayerKind::Dense) dense_idx = static_cast<int>(i);
        if (dense_idx < 0) throw InvalidParam("model has no dense classifier");
        const Layer& dl = model.layers[dense_idx];
        if (d_logits->size() != static_cast<std::size_t>(dl.out_ch))
            throw ShapeMismatch("d_logits length mismatch");
        d_feat.assign(dl.in_ch, 0.0);
        for (int o = 0; o < dl.out_ch; ++o) {
            const double g = (*d_logits)[o];
            const double* wrow = &dl.w[static_cast<std::size_t>(o) * dl.in_ch];
            for (int i = 0; i < dl.in_ch; ++i) d_feat[i] += wrow[i] * g;
            if (param_grads) {
                double* gw = &param_grads->w[dense_idx][static_cast<std::size_t>(o) * dl.in_ch];
                for (int i = 0; i < dl.in_ch; ++i) gw[i] += trace.features[i] * g;
                param_grads->b[dense_idx][o] += g;
            }
        }
    } else {
        d_feat = *d_features;
        if (d_feat.size() != trace.features.size()) throw ShapeMismatch("d_features length mismatch");
    }

    // locate the GAP layer and spread the feature gradient over its input
    int gap_idx = -1;
    for (std::size_t i = 0; i < model.layers.size(); ++i)
        if (model.layers[i].kind == LayerKind::Gap) gap_idx = static_cast<int>(i);
    const Tensor& gap_in = trace.acts[gap_idx];  // acts index == layer index for pre-GAP stack
    Tensor grad(gap_in.shape);
    const double inv = 1.0 / (static_cast<double>(gap_in.shape.h) * gap_in.shape.w);
    for (int c = 0; c < gap_in.shape.c; ++c) {
        double* row0 = grad.row(c, 0);
        const double g = d_feat[c] * inv;
        for (std::size_t i = 0; i < static_cast<std::size_t>(gap_in.shape.h) * gap_in.shape.w; ++i)
            row0[i] = g;
    }

    int pool_counter = static_cast<int>(trace.pool_argmax.size());
    for (int li = gap_idx - 1; li >= 0; --li) {
        const Layer& l = model.layers[li];
        const Tensor& lin = trace.acts[li];
        switch (l.kind) {
            case LayerKind::Conv: {
                const bool need_input = d_input != nullptr || li > 0;
                Tensor d_in;
                if (need_input) d_in = Tensor(lin.shape);
                conv_backward(l, lin, grad, need_input ? &d_in : nullptr,
                              param_grads ? &param_grads->w[li] : nullptr,
                              param_grads ? &param_grads->b[li] : nullptr);
                grad = std::move(d_in);
                break;
            }
            case LayerKind::Relu: {
                Tensor d_in(lin.shape);
                for (std::size_t i = 0; i < lin.v.size(); ++i)
                    d_in.v[i] = lin.v[i] > 0.0 ? grad.v[i] : 0.0;
                grad = std::move(d_in);
                break;
            }
            case LayerKind::MaxPool: {
                --pool_counter;
                const std::vector<int>& amax = trace.pool_argmax[pool_counter];
                Tensor d_in(lin.shape);
                for (std::size_t i = 0; i < grad.v.size(); ++i) d_in.v[amax[i]] += grad.v[i];
                grad = std::move(d_in);
                break;
            }
            default:
                throw InvalidParam("unexpected layer in spatial stack");
        }
    }
    if (d_input) *d_input = std::move(grad);
}

// ---------------------------------------------------------------------------

ObjectiveResult objective_gradient(const CnnModel& model, const Tensor& z,
                                   const std::vector<double>& target,
                                   double lambda, double beta) {
    if (target.size() != static_cast<std::size_t>(model.feature_width()))
        throw ShapeMismatch("target length does not match model feature width");
    if (lambda < 0.0 || beta <= 0.0) throw InvalidParam("lambda must be >= 0 and beta > 0");

    ForwardTrace trace = forward(model, z);
    std::vector<double> d_feat(target.size());
    double mse = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = trace.features[i] - target[i];
        mse += d * d;
        d_feat[i] = 2.0 * d;
    }
    ObjectiveResult res;
    backward(model, trace, nullptr, &d_feat, nullptr, &res.grad);
    res.mse_term = mse;
    if (lambda > 0.0) {
        TvResult tv = tv_regularizer(z, beta);
        res.tv_term = tv.value;
        for (std::size_t i = 0; i < res.grad.v.size(); ++i) res.grad.v[i] += lambda * tv.grad.v[i];
    }
    res.value = res.mse_term + lambda * res.tv_term;
    return res;
}

ObjectiveResult objective_gradient(const CnnModel& model, const Image& image,
                                   const std::vector<double>& target,
                                   double lambda, double beta) {
    return objective_gradient(model, standardize(model.norm, image.pixels), target, lambda, beta);
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
    if (epochs < 0) throw InvalidParam("epochs must be >= 0");
    if (batch_size < 1) throw InvalidParam("batch size must be >= 1");
    if (learning_rate <= 0.0) throw InvalidParam("learning rate must be > 0");
}

Normalization corpus_normalization(const std::vector<LabeledImage>& data) {
    if (data.empty()) throw EmptyDataset("cannot compute standardization stats of an empty dataset");
    Normalization norm;
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0, sq = 0.0;
        std::size_t count = 0;
        for (const LabeledImage& s : data) {
            s.image.require_rgb();
            const Tensor& t = s.image.pixels;
            const double* base = t.row(c, 0);
            const std::size_t n = static_cast<std::size_t>(t.shape.h) * t.shape.w;
            for (std::size_t i = 0; i < n; ++i) {
                sum += base[i];
                sq += base[i] * base[i];
            }
            count += n;
        }
        const double mean = sum / count;
        const double var = std::max(0.0, sq / count - mean * mean);
        norm.mean[c] = mean;
        norm.stdev[c] = std::max(std::sqrt(var), 1e-6);
    }
    return norm;
}

namespace {

struct AdamState {
    std::vector<std::vector<double>> mw, vw, mb, vb;
    long t = 0;

    explicit AdamState(const CnnModel& model) {
        mw.resize(model.layers.size());
        vw.resize(model.layers.size());
        mb.resize(model.layers.size());
        vb.resize(model.layers.size());
        for (std::size_t i = 0; i < model.layers.size(); ++i) {
            mw[i].assign(model.layers[i].w.size(), 0.0);
            vw[i].assign(model.layers[i].w.size(), 0.0);
            mb[i].assign(model.layers[i].b.size(), 0.0);
            vb[i].assign(model.layers[i].b.size(), 0.0);
        }
    }

    void step(CnnModel& model, const ParamGrads& g, const TrainConfig& cfg) {
        ++t;
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < model.layers.size(); ++i) {
            auto update = [&](std::vector<double>& p, const std::vector<double>& grad,
                              std::vector<double>& m, std::vector<double>& v) {
                for (std::size_t j = 0; j < p.size(); ++j) {
                    m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
                    v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
                    p[j] -= cfg.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.eps);
                }
            };
            update(model.layers[i].w, g.w[i], mw[i], vw[i]);
            update(model.layers[i].b, g.b[i], mb[i], vb[i]);
        }
    }
};

}  // namespace

TrainReport train_model(CnnModel& model, const std::vector<LabeledImage>& data, const TrainConfig& config) {
    config.validate();
    if (data.empty()) throw EmptyDataset("training dataset is empty");
    const TensorShape shape = data[0].image.pixels.shape;
    for (const LabeledImage& s : data)
        if (s.image.pixels.shape != shape) throw ShapeMismatch("training images must share one shape");
    if (shape != model.input_shape) throw ShapeMismatch("dataset shape does not match model input");

    model.norm = corpus_normalization(data);

    TrainReport report;
    if (config.epochs == 0) return report;

    // pre-standardized inputs
    std::vector<Tensor> inputs(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) inputs[i] = standardize(model.norm, data[i].image.pixels);

    AdamState adam(model);
    Rng rng(config.seed);
    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const int bs = static_cast<int>(std::min<std::size_t>(config.batch_size, order.size() - start));
            std::vector<ParamGrads> grads(bs);
            std::vector<double> losses(bs, 0.0);
            parallel_for(bs, [&](int bi) {
                const int idx = order[start + bi];
                ForwardTrace trace = forward(model, inputs[idx]);
                const int label = data[idx].label;
                losses[bi] = -std::log(std::max(trace.probs[label], 1e-300));
                std::vector<double> d_logits = trace.probs;
                d_logits[label] -= 1.0;
                for (double& g : d_logits) g /= bs;
                backward(model, trace, &d_logits, nullptr, &grads[bi], nullptr);
            });
            // deterministic reduction in batch order
            ParamGrads& total = grads[0];
            for (int bi = 1; bi < bs; ++bi) {
                for (std::size_t li = 0; li < total.w.size(); ++li) {
                    for (std::size_t j = 0; j < total.w[li].size(); ++j) total.w[li][j] += grads[bi].w[li][j];
                    for (std::size_t j = 0; j < total.b[li].size(); ++j) total.b[li][j] += grads[bi].b[li][j];
                }
            }
            adam.step(model, total, config);
            double mean_loss = 0.0;
            for (int bi = 0; bi < bs; ++bi) mean_loss += losses[bi];
            report.batch_loss.push_back(mean_loss / bs);
        }
    }
    return report;
}

CnnModel train(const std::vector<LabeledImage>& data, const TrainConfig& config, TrainReport* report) {
    if (data.empty()) throw EmptyDataset("training dataset is empty");
    int classes = 0;
    for (const LabeledImage& s : data) classes = std::max(classes, s.label + 1);
    classes = std::max(classes, 2);
    if (data[0].image.pixels.shape.h != data[0].image.pixels.shape.w)
        throw ShapeMismatch("desk model expects square inputs");
    CnnModel model = make_desk_model(data[0].image.pixels.shape.h, classes, config.seed);
    TrainReport r = train_model(model, data, config);
    if (report) *report = std::move(r);
    return model;
}

double accuracy(const CnnModel& model, const std::vector<LabeledImage>& data) {
    if (data.empty()) throw EmptyDataset("empty evaluation set");
    std::vector<int> correct(data.size(), 0);
    parallel_for(static_cast<int>(data.size()), [&](int i) {
        std::vector<double> p = predict(model, data[i].image);
        int arg = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
        correct[i] = arg == data[i].label ? 1 : 0;
    });
    double s = 0.0;
    for (int c : correct) s += c;
    return s / static_cast<double>(data.size());
}

}  // namespace semlens

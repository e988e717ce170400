#include "semlens/semstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semlens/util.hpp"

namespace semlens {

double weighted_activation(const std::vector<double>& features, const SemanticSpace& space) {
    if (space.ssn.empty()) throw InvalidParam("semantic space has no SSNs");
    double sum = 0.0;
    for (std::size_t i = 0; i < space.ssn.size(); ++i) {
        const int j = space.ssn[i];
        if (j < 0 || j >= static_cast<int>(features.size()))
            throw ShapeMismatch("SSN index outside feature vector");
        sum += features[j] * space.delta[i];
    }
    return sum / static_cast<double>(space.ssn.size());
}

FittedActivation fit_activation_distribution(const std::vector<double>& values) {
    if (values.size() < 30) throw InsufficientSamples("distribution fit needs at least 30 values");
    FittedActivation fit;
    fit.count = static_cast<int>(values.size());
    fit.low_sample = values.size() < 300;
    double sum = 0.0;
    for (double v : values) sum += v;
    fit.mu = sum / fit.count;
    double sq = 0.0;
    for (double v : values) sq += (v - fit.mu) * (v - fit.mu);
    fit.sigma = std::sqrt(sq / fit.count);
    if (fit.sigma == 0.0) throw DegenerateDistribution("all activation values identical");
    fit.a_min = *std::min_element(values.begin(), values.end());
    fit.a_max = *std::max_element(values.begin(), values.end());
    return fit;
}

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * (1.0 + std::erf((x - mu) / (sigma * std::sqrt(2.0))));
}

double semantic_probability(double a, const FittedActivation& fit) {
    if (!fit.fitted()) throw NotFitted("activation distribution has not been fitted");
    const double lo = normal_cdf(fit.a_min, fit.mu, fit.sigma);
    const double hi = normal_cdf(fit.a_max, fit.mu, fit.sigma);
    return (normal_cdf(a, fit.mu, fit.sigma) - lo) / (hi - lo);
}

double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw InvalidParam("quantile argument must be in (0,1)");
    // Acklam's rational approximation, |relative error| < 1.15e-9
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double p_low = 0.02425, p_high = 1.0 - p_low;
    double q, r;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > p_high) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double qq_r2(const std::vector<double>& values) {
    if (values.size() < 30) throw InsufficientSamples("q-q diagnostics need at least 30 values");
    const int n = static_cast<int>(values.size());
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    // (i - 0.5) / n plotting positions; R^2 = squared Pearson correlation of
    // (theoretical, empirical) quantile pairs
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = normal_quantile((i + 0.5) / n);
        const double y = sorted[i];
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double cov = sxy - sx * sy / n;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    if (vx <= 0.0 || vy <= 0.0) throw DegenerateDistribution("zero variance in q-q inputs");
    return cov * cov / (vx * vy);
}

std::vector<int> search_samples(const std::vector<std::vector<double>>& features,
                                const FittedSpace& space, Predicate predicate, double threshold) {
    if (!space.fit.fitted()) throw NotFitted("semantic space distribution has not been fitted");
    std::vector<int> ids;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double p = semantic_probability(weighted_activation(features[i], space.space), space.fit);
        const bool hit = predicate == Predicate::Above ? p > threshold : p < threshold;
        if (hit) ids.push_back(static_cast<int>(i));
    }
    return ids;
}

std::vector<int> search_samples(const std::vector<Image>& dataset, const CnnModel& model,
                                const FittedSpace& space, Predicate predicate, double threshold) {
    if (!space.fit.fitted()) throw NotFitted("semantic space distribution has not been fitted");
    std::vector<std::vector<double>> feats(dataset.size());
    parallel_for(static_cast<int>(dataset.size()),
                 [&](int i) { feats[i] = forward_features(model, dataset[i]); });
    return search_samples(feats, space, predicate, threshold);
}

bool flag_adversarial(const Radar& radar, double hi, double lo) {
    if (!radar.complete()) throw IncompleteRadar("radar is missing semantic spaces");
    int above_lo = 0;
    for (const auto& row : radar.p)
        for (double p : row) {
            if (p > hi) return true;
            if (p > lo) ++above_lo;
        }
    return above_lo >= 2;
}

void AttackConfig::validate() const {
    if (epsilon < 0.0) throw InvalidParam("epsilon must be >= 0");
    if (steps < 1) throw InvalidParam("steps must be >= 1");
    if (step_size < 0.0) throw InvalidParam("step size must be >= 0");
}

Image pgd_attack(const CnnModel& model, const Image& image, int target_class,
                 const AttackConfig& config) {
    config.validate();
    if (target_class < 0 || target_class >= model.num_classes()) throw InvalidParam("class id out of range");

    const double alpha = config.step_size > 0.0 ? config.step_size
                                                : 2.5 * config.epsilon / config.steps;
    const Tensor x0 = standardize(model.norm, image.pixels);
    Tensor delta(x0.shape);

    // valid standardized range per channel, from raw [0,1]
    std::array<double, 3> lo{}, hi{};
    for (int c = 0; c < 3; ++c) {
        lo[c] = (0.0 - model.norm.mean[c]) / model.norm.stdev[c];
        hi[c] = (1.0 - model.norm.mean[c]) / model.norm.stdev[c];
    }

    for (int step = 0; step < config.steps && config.epsilon > 0.0; ++step) {
        Tensor z(x0.shape);
        for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] = x0.v[i] + delta.v[i];
        ForwardTrace trace = forward(model, z);
        std::vector<double> d_logits = trace.probs;
        d_logits[target_class] -= 1.0;  // gradient of CE toward the target
        Tensor grad;
        backward(model, trace, &d_logits, nullptr, nullptr, &grad);

        for (int c = 0; c < x0.shape.c; ++c) {
            const std::size_t base = static_cast<std::size_t>(c) * x0.shape.h * x0.shape.w;
            const std::size_t npix = static_cast<std::size_t>(x0.shape.h) * x0.shape.w;
            for (std::size_t i = base; i < base + npix; ++i) {
                double d = delta.v[i] - alpha * (grad.v[i] > 0.0 ? 1.0 : (grad.v[i] < 0.0 ? -1.0 : 0.0));
                d = std::clamp(d, -config.epsilon, config.epsilon);
                d = std::clamp(d, lo[c] - x0.v[i], hi[c] - x0.v[i]);
                delta.v[i] = d;
            }
        }
    }

    // de-standardized delta keeps the untouched pixels bit-identical
    Image out = image;
    for (int c = 0; c < 3; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * x0.shape.h * x0.shape.w;
        const std::size_t npix = static_cast<std::size_t>(x0.shape.h) * x0.shape.w;
        for (std::size_t i = base; i < base + npix; ++i)
            out.pixels.v[i] = image.pixels.v[i] + delta.v[i] * model.norm.stdev[c];
    }
    return out;
}

double mann_whitney_one_sided_p(const std::vector<double>& lower, const std::vector<double>& higher) {
    const std::size_t n1 = lower.size(), n2 = higher.size();
    if (n1 == 0 || n2 == 0) throw InvalidParam("Mann-Whitney needs two non-empty groups");

    std::vector<std::pair<double, int>> all;  // value, group (0 = lower, 1 = higher)
    all.reserve(n1 + n2);
    for (double v : lower) all.emplace_back(v, 0);
    for (double v : higher) all.emplace_back(v, 1);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    // midranks with tie correction
    std::vector<double> rank(all.size());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j + 1 < all.size() && all[j + 1].first == all[i].first) ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[t] = mid;
        const double ties = static_cast<double>(j - i + 1);
        tie_term += ties * ties * ties - ties;
        i = j + 1;
    }

    double r1 = 0.0;
    for (std::size_t t = 0; t < all.size(); ++t)
        if (all[t].second == 0) r1 += rank[t];
    const double u1 = r1 - static_cast<double>(n1) * (n1 + 1) / 2.0;

    const double n = static_cast<double>(n1 + n2);
    const double mean = static_cast<double>(n1) * n2 / 2.0;
    const double var = static_cast<double>(n1) * n2 / 12.0 * (n + 1.0 - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0;
    // H1: lower group smaller => small U1; continuity-corrected left tail
    const double z = (u1 + 0.5 - mean) / std::sqrt(var);
    return normal_cdf(z, 0.0, 1.0);
}

}  // namespace semlens

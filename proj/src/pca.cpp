#include "semlens/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "semlens/util.hpp"

namespace semlens {

PcaResult row_centered_pca(const DataMatrix& data, const Retention& retention) {
    const int n = data.rows, p = data.cols;
    if (n < 2) throw InsufficientSamples("row-centered PCA needs at least 2 sample rows");
    if (p < 1) throw InvalidInput("data matrix has no features");
    for (double x : data.v)
        if (!std::isfinite(x)) throw InvalidInput("data matrix contains non-finite entries");
    if (retention.fixed && retention.k < 1) throw InvalidParam("fixed retention needs k >= 1");
    if (!retention.fixed && (retention.target <= 0.0 || retention.target > 1.0))
        throw InvalidParam("variance target must be in (0, 1]");

    // identical sample rows carry no cross-sample information
    bool all_identical = true;
    for (int i = 1; i < n && all_identical; ++i)
        for (int j = 0; j < p; ++j)
            if (data.at(i, j) != data.at(0, j)) {
                all_identical = false;
                break;
            }
    if (all_identical) throw DegenerateData("all sample rows are identical");

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        data.v.data(), n, p);

    PcaResult res;
    res.row_means.resize(n);
    Eigen::MatrixXd centered(n, p);
    for (int i = 0; i < n; ++i) {
        const double mean = X.row(i).mean();
        res.row_means[i] = mean;
        centered.row(i) = X.row(i).array() - mean;
    }

    // S = X^ X^T / (p - 1), an n x n symmetric PSD matrix
    const double denom = p > 1 ? static_cast<double>(p - 1) : 1.0;
    Eigen::MatrixXd S = centered * centered.transpose() / denom;
    res.trace = S.trace();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");

    // ascending from Eigen; flip to descending
    std::vector<double> lambda(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        lambda[i] = solver.eigenvalues()(n - 1 - i);
        order[i] = n - 1 - i;
    }

    const double lambda_max = lambda.empty() ? 0.0 : std::max(lambda[0], 0.0);
    if (lambda_max <= 0.0 || res.trace <= 0.0)
        throw DegenerateData("all rows are identical after centering; covariance is zero");

    // numerical rank: eigenvalues below 1e-10 * lambda_1 count as zero
    const double cutoff = 1e-10 * lambda_max;
    int rank = 0;
    for (int i = 0; i < n; ++i)
        if (lambda[i] > cutoff) ++rank;

    int k;
    if (retention.fixed) {
        k = std::min(retention.k, rank);
    } else {
        k = rank;
        double cum = 0.0;
        for (int i = 0; i < rank; ++i) {
            cum += lambda[i] / res.trace;
            if (cum >= retention.target) {
                k = i + 1;
                break;
            }
        }
    }

    res.k = k;
    res.eigenvalues.assign(lambda.begin(), lambda.begin() + k);
    res.ratios.resize(k);
    for (int i = 0; i < k; ++i) res.ratios[i] = res.eigenvalues[i] / res.trace;

    // X_k = X^T U_k, then fix each PC's sign so its largest-|score| entry is
    // positive (first such index on ties)
    res.components = DataMatrix(p, k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd pc = X.transpose() * solver.eigenvectors().col(order[j]);
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < p; ++i) {
            const double m = std::abs(pc(i));
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        if (pc(arg) < 0.0) pc = -pc;
        for (int i = 0; i < p; ++i) res.components.at(i, j) = pc(i);
    }
    return res;
}

PcaResult row_centered_pca_of_rows(const std::vector<std::vector<double>>& rows, const Retention& retention) {
    if (rows.empty()) throw InsufficientSamples("no sample rows");
    DataMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw ShapeMismatch("sample rows differ in length");
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return row_centered_pca(m, retention);
}

SpreadReport spread(const std::vector<std::vector<double>>& score_vectors) {
    if (score_vectors.empty()) throw InsufficientSamples("spread needs at least one experiment");
    const std::size_t p = score_vectors[0].size();
    if (p == 0) throw InvalidInput("empty score vectors");
    for (const auto& s : score_vectors)
        if (s.size() != p) throw ShapeMismatch("score vectors differ in length");

    SpreadReport rep;
    rep.experiments = static_cast<int>(score_vectors.size());
    rep.mean_scores.assign(p, 0.0);
    for (const auto& s : score_vectors)
        for (std::size_t j = 0; j < p; ++j) rep.mean_scores[j] += s[j];
    for (double& m : rep.mean_scores) m /= rep.experiments;

    double sum = 0.0;
    for (const auto& s : score_vectors)
        for (std::size_t j = 0; j < p; ++j) sum += std::abs(s[j] - rep.mean_scores[j]);
    rep.spread_percent = sum / static_cast<double>(p) / rep.experiments * 100.0;
    return rep;
}

FeatureStack layerwise_pca(const FeatureStack& maps, int k) {
    if (maps.n < 2) throw InsufficientSamples("layerwise PCA needs at least 2 samples");
    if (k < 1 || k > std::min(maps.n, maps.c)) throw InvalidParam("k must be in [1, min(N_s, C)]");

    FeatureStack out(k, maps.c, maps.h, maps.w);
    const int positions = maps.h * maps.w;
    std::vector<std::string> errors(positions);
    parallel_for(positions, [&](int pos) {
        const int y = pos / maps.w, x = pos % maps.w;
        DataMatrix sub(maps.n, maps.c);
        for (int i = 0; i < maps.n; ++i)
            for (int c = 0; c < maps.c; ++c) sub.at(i, c) = maps.at(i, c, y, x);
        try {
            PcaResult r = row_centered_pca(sub, Retention::fixed_k(k));
            if (r.k < k) throw DegenerateData("rank below requested k at a spatial position");
            for (int j = 0; j < k; ++j)
                for (int c = 0; c < maps.c; ++c) out.at(j, c, y, x) = r.components.at(c, j);
        } catch (const Error& e) {
            errors[pos] = e.what();
        }
    });
    for (const std::string& e : errors)
        if (!e.empty()) throw DegenerateData(e);
    return out;
}

DataMatrix stack_features(const std::vector<Image>& samples, const CnnModel& model,
                          const TraitConfig& config) {
    if (samples.size() < 2) throw InsufficientSamples("need at least 2 samples");
    const int p = model.feature_width();
    DataMatrix m(static_cast<int>(samples.size()), p);
    if (config.use_ga) {
        const std::array<double, 3> background = {model.norm.mean[0], model.norm.mean[1], model.norm.mean[2]};
        for (std::size_t i = 0; i < samples.size(); ++i) {
            Segmentation seg = slic_segment(samples[i], config.slic);
            GaConfig ga = config.ga;
            ga.seed = config.ga.seed + i;  // one stream per sample
            GaResult best = evolve(model, samples[i], seg, config.class_id, ga);
            Image combo = genome_to_image(samples[i], seg, best.best, background);
            std::vector<double> f = forward_features(model, combo);
            for (int j = 0; j < p; ++j) m.at(static_cast<int>(i), j) = f[j];
        }
    } else {
        std::vector<std::vector<double>> feats(samples.size());
        parallel_for(static_cast<int>(samples.size()),
                     [&](int i) { feats[i] = forward_features(model, samples[i]); });
        for (std::size_t i = 0; i < samples.size(); ++i)
            for (int j = 0; j < p; ++j) m.at(static_cast<int>(i), j) = feats[i][j];
    }
    return m;
}

PcaResult extract_common_traits(const std::vector<Image>& samples, const CnnModel& model,
                                const TraitConfig& config) {
    return row_centered_pca(stack_features(samples, model, config), config.retention);
}

}  // namespace semlens

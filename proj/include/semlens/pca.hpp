#pragma once

#include <array>
#include <vector>

#include "semlens/ga.hpp"
#include "semlens/model.hpp"
#include "semlens/slic.hpp"
#include "semlens/tensor.hpp"

namespace semlens {

// Row-major sample matrix: rows are samples, columns are features.
struct DataMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    DataMatrix() = default;
    DataMatrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

// How many principal components to keep: a fixed count, or the smallest count
// whose cumulative information ratio reaches a variance target.
struct Retention {
    bool fixed = false;
    int k = 0;
    double target = 0.85;

    static Retention fixed_k(int k) { return {true, k, 0.0}; }
    static Retention variance(double target) { return {false, 0, target}; }
};

struct PcaResult {
    // p x k: column j holds the scores of the (j+1)-th PC over the p features
    DataMatrix components;
    std::vector<double> eigenvalues;  // retained, descending
    std::vector<double> ratios;       // lambda_i / tr(S)
    int k = 0;
    std::vector<double> row_means;    // centering means, one per sample row
    double trace = 0.0;               // tr(S)
};

// PCA with row (sample) centering: covariance S = X^ X^T / (p-1) over the
// row-centered matrix, eigendecomposition of S, components X_k = X^T U_k.
// Each PC is sign-fixed so that its largest-magnitude score is positive.
PcaResult row_centered_pca(const DataMatrix& data, const Retention& retention);

struct SpreadReport {
    double spread_percent = 0.0;
    std::vector<double> mean_scores;
    int experiments = 0;
};

// Mean absolute deviation of PC score vectors across repeated experiments,
// as a percentage.
SpreadReport spread(const std::vector<std::vector<double>>& score_vectors);

// N_s x C x H x W feature-map stack.
struct FeatureStack {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> v;

    FeatureStack() = default;
    FeatureStack(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_), v(static_cast<std::size_t>(n_) * c_ * h_ * w_, 0.0) {}

    double& at(int i, int ch, int y, int x) {
        return v[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
    }
    double at(int i, int ch, int y, int x) const {
        return v[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
    }
};

// Independent row-centered PCA of the N_s x C submatrix at every spatial
// position, each retaining k PCs, reassembled into a k x C x H x W stack.
FeatureStack layerwise_pca(const FeatureStack& maps, int k);

struct TraitConfig {
    bool use_ga = false;
    int class_id = 0;
    SlicParams slic;
    GaConfig ga;
    Retention retention = Retention::variance(0.85);
};

// Stacks GAP feature vectors of the samples (optionally of their GA-best
// superpixel combinations) and runs the row-centered PCA.
PcaResult extract_common_traits(const std::vector<Image>& samples, const CnnModel& model,
                                const TraitConfig& config);

// The stacked feature matrix used by extract_common_traits, exposed for
// reuse when many PCA runs share one corpus.
DataMatrix stack_features(const std::vector<Image>& samples, const CnnModel& model,
                          const TraitConfig& config);

PcaResult row_centered_pca_of_rows(const std::vector<std::vector<double>>& rows, const Retention& retention);

}  // namespace semlens

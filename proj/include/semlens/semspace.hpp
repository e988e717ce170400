#pragma once

#include <string>
#include <vector>

#include "semlens/model.hpp"
#include "semlens/tensor.hpp"

namespace semlens {

// A discovered semantic space: the feature indices most sensitive to masking
// one concept, with their signed score differences (descending by magnitude).
struct SemanticSpace {
    std::string concept_name;
    std::string class_name;
    std::vector<int> ssn;       // indices into the GAP feature vector
    std::vector<double> delta;  // signed differences at those indices
    int source_pc = 1;
    int samples_unmask = 0;
    int samples_mask = 0;
};

// Signed difference of masked vs unmasked first-PC scores; the n indices with
// the largest |difference| become the SSNs. The masked PC's sign is aligned
// to the unmasked one first (PCA signs from two runs are unrelated).
SemanticSpace discover_ssns(const std::vector<double>& pc_unmask,
                            const std::vector<double>& pc_mask, int n);

struct TargetEncoding {
    std::vector<double> values;  // length C, zero off the SSNs
    double scale = 30.0;
};

// Zero vector except at the SSNs, proportional to delta with the maximum
// magnitude scaled to `scale`. Signs are preserved.
TargetEncoding build_target_encoding(const SemanticSpace& space, int feature_width, double scale = 30.0);

struct TvResult {
    double value = 0.0;
    Tensor grad;
};

// Total variation with exponent beta/2 over forward differences; terms whose
// neighbor falls outside the image are skipped.
TvResult tv_regularizer(const Tensor& z, double beta);

struct VisConfig {
    double lambda = 2.0;
    double beta = 2.0;
    double learning_rate = 0.05;
    int halving_interval = 1000;
    int max_iters = 4000;

    void validate() const;
};

struct VisResult {
    Image image;        // de-standardized result (clamp happens only at PNG export)
    Tensor optimized;   // the raw optimization variable in standardized space
    std::vector<double> objective_trace;
};

// Activation maximization: gradient descent on ||Phi(z) - Phi0||^2 + lambda*R
// from the all-zero standardized image, learning rate halved every
// halving_interval steps.
VisResult visualize(const CnnModel& model, const TargetEncoding& target, const VisConfig& config);

ObjectiveResult objective_gradient(const CnnModel& model, const Image& image,
                                   const TargetEncoding& target, double lambda, double beta);

}  // namespace semlens

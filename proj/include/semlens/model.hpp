#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semlens/tensor.hpp"

namespace semlens {

enum class LayerKind { Conv, Relu, MaxPool, Gap, Dense };

// One layer of the configurable conv/pool/GAP/dense family. Conv layers use
// square kernels, stride 1 and same-padding; pool layers are non-overlapping
// max pools.
struct Layer {
    LayerKind kind;

    // Conv: w is [out][in][ky][kx], b is [out].
    // Dense: w is [out][in], b is [out].
    int in_ch = 0;
    int out_ch = 0;
    int ksize = 0;
    int pool = 0;
    std::vector<double> w;
    std::vector<double> b;

    static Layer conv(int in_ch, int out_ch, int ksize);
    static Layer relu();
    static Layer maxpool(int k);
    static Layer gap();
    static Layer dense(int in, int out);
};

struct CnnModel {
    TensorShape input_shape;
    Normalization norm;
    std::vector<Layer> layers;
    std::uint64_t seed = 0;

    // Channel count at the GAP output.
    int feature_width() const;
    int num_classes() const;
    bool has_dense() const;

    // Checks the structural invariants: exactly one GAP; any dense classifier
    // comes after it; weights finite.
    void validate() const;
};

// Seeded fan-in-scaled uniform init for every conv/dense layer in the model.
void init_weights(CnnModel& model, std::uint64_t seed);

// The standard desk-scale architecture: 3 conv blocks (3->16->32->64, 3x3,
// relu + 2x2 maxpool) -> GAP -> dense -> softmax, for 64x64 RGB inputs.
CnnModel make_desk_model(int input_hw, int classes, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Forward / backward

struct ForwardTrace {
    // acts[0] is the (standardized) input; acts[i+1] is the output of layer i
    // up to and including the layer before GAP.
    std::vector<Tensor> acts;
    // argmax source index per output element, one entry per maxpool layer
    std::vector<std::vector<int>> pool_argmax;
    std::vector<double> features;  // GAP output
    std::vector<double> logits;
    std::vector<double> probs;
};

Tensor standardize(const Normalization& norm, const Tensor& raw);
Tensor destandardize(const Normalization& norm, const Tensor& z);

// Runs the network on an already-standardized input tensor.
ForwardTrace forward(const CnnModel& model, const Tensor& input);

std::vector<double> softmax(const std::vector<double>& logits);

std::vector<double> forward_features(const CnnModel& model, const Image& image);
std::vector<double> predict(const CnnModel& model, const Image& image);
// Dense + softmax applied to a precomputed feature vector.
std::vector<double> classify_features(const CnnModel& model, const std::vector<double>& features);

struct ParamGrads {
    // parallel to model.layers; empty vectors for parameterless layers
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> b;
};

// Backpropagates from the network head. Exactly one of d_logits / d_features
// must be non-null: d_logits enters above the dense layer, d_features at the
// GAP output. Either output slot may be null when not needed.
void backward(const CnnModel& model, const ForwardTrace& trace,
              const std::vector<double>* d_logits,
              const std::vector<double>* d_features,
              ParamGrads* param_grads, Tensor* d_input);

// ---------------------------------------------------------------------------
// Visualization objective

struct ObjectiveResult {
    Tensor grad;       // d(objective)/dz, z in standardized space
    double value = 0;  // full objective
    double mse_term = 0;
    double tv_term = 0;
};

// Objective ||Phi(z) - target||^2 + lambda * R_beta(z) and its gradient with
// respect to z; the MSE part is backpropagated through the network, the TV
// part uses the closed-form gradient. z is the standardized-space image.
ObjectiveResult objective_gradient(const CnnModel& model, const Tensor& z,
                                   const std::vector<double>& target,
                                   double lambda, double beta);
ObjectiveResult objective_gradient(const CnnModel& model, const Image& image,
                                   const std::vector<double>& target,
                                   double lambda, double beta);

// ---------------------------------------------------------------------------
// Training

struct LabeledImage {
    Image image;
    int label = 0;
};

struct TrainConfig {
    int epochs = 3;
    int batch_size = 16;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 42;

    void validate() const;
};

struct TrainReport {
    std::vector<double> batch_loss;  // mean cross-entropy per batch
};

// Adam / cross-entropy training of an existing model. Standardization stats
// are recomputed from the dataset and stored on the model.
TrainReport train_model(CnnModel& model, const std::vector<LabeledImage>& data, const TrainConfig& config);

// Builds the desk architecture for the dataset's image size and trains it.
CnnModel train(const std::vector<LabeledImage>& data, const TrainConfig& config, TrainReport* report = nullptr);

double accuracy(const CnnModel& model, const std::vector<LabeledImage>& data);

Normalization corpus_normalization(const std::vector<LabeledImage>& data);

}  // namespace semlens

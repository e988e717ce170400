#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "semlens/model.hpp"
#include "semlens/semspace.hpp"

namespace semlens {

// Weighted average activation A_s = (1/N_SSN) * sum_i a_i * Delta_i.
double weighted_activation(const std::vector<double>& features, const SemanticSpace& space);

struct FittedActivation {
    double mu = 0.0;
    double sigma = 0.0;
    double a_min = 0.0;
    double a_max = 0.0;
    int count = 0;              // 0 marks an unfitted distribution
    bool low_sample = false;    // fewer than 300 samples

    bool fitted() const { return count > 0; }
};

// Maximum-likelihood normal fit (population std) with the empirical extremes.
FittedActivation fit_activation_distribution(const std::vector<double>& values);

double normal_cdf(double x, double mu, double sigma);

// Relative CDF position between the fitted extremes. Deliberately unclamped:
// out-of-distribution inputs may score below 0 or above 1.
double semantic_probability(double a, const FittedActivation& fit);

// R^2 of the least-squares line through the normal q-q plot.
double qq_r2(const std::vector<double>& values);

// Inverse standard normal CDF (Acklam's rational approximation).
double normal_quantile(double p);

struct FittedSpace {
    SemanticSpace space;
    FittedActivation fit;
};

enum class Predicate { Above, Below };

// Sample ids whose semantic probability is above/below the threshold, in
// dataset order.
std::vector<int> search_samples(const std::vector<Image>& dataset, const CnnModel& model,
                                const FittedSpace& space, Predicate predicate, double threshold);
std::vector<int> search_samples(const std::vector<std::vector<double>>& features,
                                const FittedSpace& space, Predicate predicate, double threshold);

// The 3-concept x 2-class table of semantic probabilities.
struct Radar {
    std::array<std::string, 2> class_names;
    std::array<std::string, 3> concepts;
    double p[2][3] = {{0, 0, 0}, {0, 0, 0}};
    bool present[2][3] = {{false, false, false}, {false, false, false}};

    bool complete() const {
        for (const auto& row : present)
            for (bool b : row)
                if (!b) return false;
        return true;
    }
};

// True iff one probability exceeds `hi` or at least two exceed `lo`.
bool flag_adversarial(const Radar& radar, double hi = 0.99, double lo = 0.9);

struct AttackConfig {
    double epsilon = 0.0;   // L-inf budget in standardized units
    int steps = 1;
    double step_size = 0.0; // 0 picks 2.5 * epsilon / steps
    std::uint64_t seed = 0;

    void validate() const;
};

// Targeted projected gradient descent on the cross-entropy toward the target
// class, in standardized space, projected to the epsilon ball and the valid
// pixel range.
Image pgd_attack(const CnnModel& model, const Image& image, int target_class,
                 const AttackConfig& config);

// One-sided Mann-Whitney p-value for H1: `lower` group stochastically smaller
// than `higher` group (normal approximation with tie correction).
double mann_whitney_one_sided_p(const std::vector<double>& lower, const std::vector<double>& higher);

}  // namespace semlens

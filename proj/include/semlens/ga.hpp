#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "semlens/model.hpp"
#include "semlens/slic.hpp"

namespace semlens {

// Binary genome over superpixels: 1 keeps the superpixel, 0 drops it.
struct Genome {
    std::vector<std::uint8_t> bits;

    bool operator==(const Genome& o) const { return bits == o.bits; }
};

struct GaConfig {
    int population = 50;
    int generations = 50;
    double mutation_prob = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GaResult {
    Genome best;
    double best_fitness = 0.0;
    std::vector<double> elite_trace;  // all-time elite fitness per generation
    std::vector<double> mean_trace;   // population mean fitness per generation
};

// Replaces the pixels of absent superpixels with the background color.
Image genome_to_image(const Image& image, const Segmentation& seg, const Genome& genome,
                      const std::array<double, 3>& background);

// Classifier probability of class c for the genome's superpixel combination.
double fitness(const CnnModel& model, const Image& image, const Segmentation& seg,
               const Genome& genome, int class_id, const std::array<double, 3>& background);

// Generic GA core: single-point crossover on random disjoint pairs, per-genome
// bit-flip mutation, descending fitness sort, top half survives, bottom half
// replaced by fresh random genomes, all-time elite kept in the population and
// shielded from crossover/mutation. The fitness function must be pure and
// thread-safe; evaluations within a generation run in parallel and repeated
// genomes are memoized.
GaResult evolve(const std::function<double(const Genome&)>& fitness_fn, int genome_length,
                const GaConfig& config);

// GA search for the superpixel combination maximizing P(class c). Absent
// superpixels are filled with the training-corpus mean color carried by the
// model's standardization stats.
GaResult evolve(const CnnModel& model, const Image& image, const Segmentation& seg,
                int class_id, const GaConfig& config);

}  // namespace semlens

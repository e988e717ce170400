#pragma once

#include <string>
#include <vector>

#include "semlens/corpus.hpp"
#include "semlens/ga.hpp"
#include "semlens/pca.hpp"
#include "semlens/semspace.hpp"
#include "semlens/semstats.hpp"

namespace semlens {

// Every knob of the pipeline in one document; defaults follow the stated
// constants of the method (superpixel counts 40 / 20, population 50, 50
// generations, mutation probability 0.5, 5 SSNs, target scale 30, lambda =
// beta = 2, learning rate 0.05 halved every 1000 of 4000 iterations, 85%
// variance target, flag thresholds 0.99 / 0.9).
struct PipelineConfig {
    int schema_version = 1;

    CorpusSpec corpus;
    double train_fraction = 0.75;
    TrainConfig train;

    SlicParams slic_ga{40, 10.0, 10, 1e-3};
    SlicParams slic_mask{20, 10.0, 10, 1e-3};
    GaConfig ga{50, 50, 0.5, 0};
    bool use_ga = false;  // GA preprocessing for extract-traits

    int n_ssn = 5;
    double scale = 30.0;
    int semspace_pairs = 100;  // masked/unmasked pairs per semantic space
    VisConfig vis;
    double variance_target = 0.85;

    double flag_hi = 0.99;
    double flag_lo = 0.9;
    AttackConfig attack{0.05, 20, 0.0, 0};  // epsilon in raw [0,1] units here
    int adv_pairs = 50;

    // per-command selectors
    int analysis_class = 0;       // extract-traits
    int assess_sample = -1;       // assess: corpus sample index (test split)
    std::string assess_image;     // assess: external PNG, wins over index
    std::string search_class;     // search selectors
    std::string search_concept = "nose";
    bool search_above = true;
    double search_threshold = 0.9;

    void validate() const;
    std::string to_json() const;
    static PipelineConfig from_json(const std::string& text);
};

void save_pipeline_config(const std::string& path, const PipelineConfig& config);
PipelineConfig load_pipeline_config(const std::string& path);

// Runs one subcommand (train, extract-traits, extract-semspace, visualize,
// fit-stats, assess, search, detect-adv) against a run directory, writing its
// artifacts and a manifest. Throws MissingPrerequisite when an artifact of an
// earlier stage is absent.
std::vector<std::string> run_command(const PipelineConfig& config, const std::string& command,
                                     const std::string& run_dir);

// Deterministic train/test split of a corpus (per-class leading fraction).
void split_corpus(const Corpus& corpus, double train_fraction,
                  std::vector<const SyntheticSample*>& train_out,
                  std::vector<const SyntheticSample*>& test_out);

}  // namespace semlens

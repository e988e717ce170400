#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semlens/model.hpp"
#include "semlens/tensor.hpp"

namespace semlens {

struct CorpusSpec {
    enum class Source { Synthetic, Folder };

    Source source = Source::Synthetic;
    std::string folder;  // for Source::Folder: <folder>/<class_name>/*.png
    std::array<std::string, 2> class_names{"roundy", "boxy"};
    int per_class = 100;
    int image_size = 64;
    std::uint64_t seed = 7;

    void validate() const;
};

// One generated sample: the drawn image, the same drawing with all semantic
// parts omitted, and the painted pixel set of each part.
struct SyntheticSample {
    Image image;
    int label = 0;
    std::map<std::string, std::vector<int>> parts;  // concept -> flat y*W+x indices
    Image base;
};

struct Corpus {
    std::vector<SyntheticSample> samples;
    std::array<std::string, 2> class_names;
    std::array<std::string, 3> concepts{"eyes", "nose", "legs"};
};

// Two procedurally drawn creature classes, each with annotated eyes, nose and
// legs. Deterministic under the spec's seed.
Corpus generate_synthetic_corpus(const CorpusSpec& spec);

// The sample with one semantic part replaced by whatever the drawing shows
// underneath it; only that part's pixels change.
Image mask_part(const SyntheticSample& sample, const std::string& concept_name);

// PNG folder corpus; images are resized to spec.image_size with
// nearest-neighbor sampling. No part annotations.
Corpus load_folder_corpus(const CorpusSpec& spec);

std::vector<LabeledImage> to_labeled(const Corpus& corpus);
std::vector<Image> class_images(const Corpus& corpus, int label);

}  // namespace semlens

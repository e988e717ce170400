#pragma once

#include <string>
#include <vector>

#include "semlens/model.hpp"
#include "semlens/semstats.hpp"

namespace semlens {

// The six fitted semantic spaces (3 concepts x 2 classes) behind a radar.
struct SpaceTable {
    std::array<std::string, 2> class_names;
    std::array<std::string, 3> concepts;
    FittedSpace spaces[2][3];
    bool present[2][3] = {{false, false, false}, {false, false, false}};

    void put(int class_id, int concept_id, FittedSpace space);
    bool complete() const;
};

// One forward pass, then per-space weighted activation -> semantic probability.
Radar compute_radar(const Image& image, const CnnModel& model, const SpaceTable& table);
Radar compute_radar(const std::vector<double>& features, const SpaceTable& table);

struct Indicators {
    double p_max = 0.0;           // max P among the predicted class's concepts
    std::string s_max;            // concept achieving p_max
    std::vector<std::pair<std::string, double>> delta_p;  // per concept: P(pred) - max over other classes
    double delta_max_p = 0.0;
    int predicted_class = 0;
    std::string predicted_name;
};

Indicators derive_indicators(const Radar& radar, int predicted_class);

struct Fragment {
    std::string concept_name;
    std::string position_word;   // "vivid" or "be"
    std::string semanteme_word;  // "confusing", "perhaps", "something like", "obviously"
};

struct Explanation {
    std::string sentence;
    std::vector<Fragment> fragments;
};

// Template-based trustworthiness sentence. Band boundaries at 0.2 / 0.35 /
// 0.5 are closed on the right: a value sitting exactly on a boundary belongs
// to the band below it.
Explanation generate_explanation(const Indicators& ind);

// Confidence band index for delta_max_p: 0 = might, 1..2 = probably, 3 = sure.
int assessment_band(double delta_max_p);

}  // namespace semlens

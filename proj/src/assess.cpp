#include "semlens/assess.hpp"

#include <algorithm>
#include <cctype>

namespace semlens {

void SpaceTable::put(int class_id, int concept_id, FittedSpace space) {
    if (class_id < 0 || class_id >= 2 || concept_id < 0 || concept_id >= 3)
        throw InvalidParam("space table slot out of range");
    spaces[class_id][concept_id] = std::move(space);
    present[class_id][concept_id] = true;
}

bool SpaceTable::complete() const {
    for (const auto& row : present)
        for (bool b : row)
            if (!b) return false;
    return true;
}

Radar compute_radar(const std::vector<double>& features, const SpaceTable& table) {
    if (!table.complete()) throw IncompleteRadar("space table is missing fitted semantic spaces");
    Radar radar;
    radar.class_names = table.class_names;
    radar.concepts = table.concepts;
    for (int cls = 0; cls < 2; ++cls) {
        for (int k = 0; k < 3; ++k) {
            const FittedSpace& fs = table.spaces[cls][k];
            if (!fs.fit.fitted()) throw NotFitted("space table entry has no fitted distribution");
            radar.p[cls][k] = semantic_probability(weighted_activation(features, fs.space), fs.fit);
            radar.present[cls][k] = true;
        }
    }
    return radar;
}

Radar compute_radar(const Image& image, const CnnModel& model, const SpaceTable& table) {
    return compute_radar(forward_features(model, image), table);
}

Indicators derive_indicators(const Radar& radar, int predicted_class) {
    if (!radar.complete()) throw IncompleteRadar("radar is missing entries");
    if (predicted_class < 0 || predicted_class >= 2) throw InvalidParam("predicted class out of range");

    Indicators ind;
    ind.predicted_class = predicted_class;
    ind.predicted_name = radar.class_names[predicted_class];
    const int other = 1 - predicted_class;

    ind.p_max = radar.p[predicted_class][0];
    ind.s_max = radar.concepts[0];
    for (int k = 1; k < 3; ++k) {
        if (radar.p[predicted_class][k] > ind.p_max) {
            ind.p_max = radar.p[predicted_class][k];
            ind.s_max = radar.concepts[k];
        }
    }
    for (int k = 0; k < 3; ++k)
        ind.delta_p.emplace_back(radar.concepts[k], radar.p[predicted_class][k] - radar.p[other][k]);
    ind.delta_max_p = ind.delta_p[0].second;
    for (const auto& [c, d] : ind.delta_p) ind.delta_max_p = std::max(ind.delta_max_p, d);
    return ind;
}

// band edges 0.2 / 0.35 / 0.5, right-closed
int assessment_band(double x) {
    if (x <= 0.2) return 0;
    if (x <= 0.35) return 1;
    if (x <= 0.5) return 2;
    return 3;
}

namespace {

bool plural(const std::string& part) { return !part.empty() && part.back() == 's'; }

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

// "its vivid eyes, which are something like dog's eyes"
std::string positive_clause(const Fragment& f, const std::string& cls) {
    const std::string be = plural(f.concept_name) ? "are" : "is";
    std::string lead = f.position_word == "vivid" ? "its vivid " + f.concept_name : "it has " + f.concept_name;
    std::string tail;
    if (f.semanteme_word == "obviously")
        tail = "which " + be + " " + cls + "'s " + f.concept_name + " obviously";
    else
        tail = "which " + be + " " + f.semanteme_word + " " + cls + "'s " + f.concept_name;
    return lead + ", " + tail;
}

}  // namespace

Explanation generate_explanation(const Indicators& ind) {
    Explanation out;
    const std::string& cls = ind.predicted_name;
    const int band = assessment_band(ind.delta_max_p);

    if (band == 0) {
        out.sentence = "It might be a " + cls + ", but I am not sure.";
        return out;
    }

    // position row from P_max: vivid above 0.5, plain "has/be" in (0.2, 0.5],
    // nothing below
    const int prow = ind.p_max > 0.5 ? 0 : (ind.p_max > 0.2 ? 1 : 2);

    // concepts by descending delta P
    std::vector<std::pair<std::string, double>> ordered = ind.delta_p;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    std::vector<Fragment> positives, confusings;
    for (const auto& [cname, dp] : ordered) {
        if (prow == 2) continue;  // P_max <= 0.2: no cell in the table
        const int dband = assessment_band(dp);
        Fragment f;
        f.concept_name = cname;
        f.position_word = prow == 0 ? "vivid" : "be";
        if (dband == 0) {
            if (prow == 1) continue;  // the "None" cell
            f.semanteme_word = "confusing";
            confusings.push_back(f);
        } else {
            f.semanteme_word = dband == 1 ? "perhaps" : (dband == 2 ? "something like" : "obviously");
            positives.push_back(f);
        }
    }

    std::string s = band == 3 ? "I am sure it is a " + cls : "It is probably a " + cls;
    if (positives.empty()) {
        s += ".";
    } else {
        s += " mainly because " + positive_clause(positives[0], cls) + ".";
        for (std::size_t i = 1; i < positives.size(); ++i)
            s += " " + capitalize(positive_clause(positives[i], cls)) + ".";
    }
    if (!confusings.empty()) {
        std::string parts = confusings[0].concept_name;
        for (std::size_t i = 1; i < confusings.size(); ++i) parts += " and " + confusings[i].concept_name;
        const std::string be = (confusings.size() > 1 || plural(confusings[0].concept_name)) ? "are" : "is";
        s += " However, its " + parts + " " + be + " a little confusing.";
    }

    out.sentence = std::move(s);
    out.fragments = std::move(positives);
    out.fragments.insert(out.fragments.end(), confusings.begin(), confusings.end());
    return out;
}

}  // namespace semlens

#include "semlens/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "semlens/artifacts.hpp"
#include "semlens/assess.hpp"
#include "semlens/checkpoint.hpp"
#include "semlens/png_io.hpp"
#include "semlens/util.hpp"

namespace semlens {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineConfig::validate() const {
    if (schema_version != 1) throw InvalidParam("unsupported config schema version");
    corpus.validate();
    train.validate();
    if (train_fraction <= 0.0 || train_fraction >= 1.0) throw InvalidParam("train fraction must be in (0,1)");
    for (const SlicParams* s : {&slic_ga, &slic_mask}) {
        if (s->k < 1) throw InvalidParam("superpixel count must be >= 1");
        if (s->compactness <= 0.0) throw InvalidParam("compactness must be > 0");
        if (s->max_iter < 1) throw InvalidParam("SLIC max_iter must be >= 1");
    }
    ga.validate();
    if (n_ssn < 1) throw InvalidParam("SSN count must be >= 1");
    if (scale <= 0.0) throw InvalidParam("target scale must be > 0");
    if (semspace_pairs < 2) throw InvalidParam("semantic space extraction needs >= 2 pairs");
    vis.validate();
    if (variance_target <= 0.0 || variance_target > 1.0) throw InvalidParam("variance target must be in (0,1]");
    if (flag_hi <= 0.0 || flag_lo <= 0.0 || flag_hi < flag_lo)
        throw InvalidParam("flag thresholds must be positive with hi >= lo");
    attack.validate();
    if (adv_pairs < 1) throw InvalidParam("adversarial pair count must be >= 1");
}

std::string PipelineConfig::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["corpus"] = {{"source", corpus.source == CorpusSpec::Source::Synthetic ? "synthetic" : "folder"},
                   {"folder", corpus.folder},
                   {"class_names", corpus.class_names},
                   {"per_class", corpus.per_class},
                   {"image_size", corpus.image_size},
                   {"seed", corpus.seed}};
    j["train_fraction"] = train_fraction;
    j["train"] = {{"epochs", train.epochs},   {"batch_size", train.batch_size},
                  {"learning_rate", train.learning_rate}, {"beta1", train.beta1},
                  {"beta2", train.beta2},     {"eps", train.eps},
                  {"seed", train.seed}};
    j["slic_ga"] = {{"k", slic_ga.k},
                    {"compactness", slic_ga.compactness},
                    {"max_iter", slic_ga.max_iter},
                    {"residual_threshold", slic_ga.residual_threshold}};
    j["slic_mask"] = {{"k", slic_mask.k},
                      {"compactness", slic_mask.compactness},
                      {"max_iter", slic_mask.max_iter},
                      {"residual_threshold", slic_mask.residual_threshold}};
    j["ga"] = {{"population", ga.population},
               {"generations", ga.generations},
               {"mutation_prob", ga.mutation_prob},
               {"seed", ga.seed}};
    j["use_ga"] = use_ga;
    j["n_ssn"] = n_ssn;
    j["scale"] = scale;
    j["semspace_pairs"] = semspace_pairs;
    j["vis"] = {{"lambda", vis.lambda},
                {"beta", vis.beta},
                {"learning_rate", vis.learning_rate},
                {"halving_interval", vis.halving_interval},
                {"max_iters", vis.max_iters}};
    j["variance_target"] = variance_target;
    j["flag_hi"] = flag_hi;
    j["flag_lo"] = flag_lo;
    j["attack"] = {{"epsilon", attack.epsilon},
                   {"steps", attack.steps},
                   {"step_size", attack.step_size},
                   {"seed", attack.seed}};
    j["adv_pairs"] = adv_pairs;
    j["analysis_class"] = analysis_class;
    j["assess_sample"] = assess_sample;
    j["assess_image"] = assess_image;
    j["search_class"] = search_class;
    j["search_concept"] = search_concept;
    j["search_above"] = search_above;
    j["search_threshold"] = search_threshold;
    return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed pipeline config: ") + e.what());
    }
    PipelineConfig c;
    try {
        c.schema_version = j.value("schema_version", 1);
        if (j.contains("corpus")) {
            const json& jc = j["corpus"];
            const std::string src = jc.value("source", "synthetic");
            if (src == "synthetic")
                c.corpus.source = CorpusSpec::Source::Synthetic;
            else if (src == "folder")
                c.corpus.source = CorpusSpec::Source::Folder;
            else
                throw InvalidParam("unknown corpus source '" + src + "'");
            c.corpus.folder = jc.value("folder", c.corpus.folder);
            if (jc.contains("class_names")) {
                auto names = jc["class_names"].get<std::vector<std::string>>();
                if (names.size() != 2) throw InvalidParam("exactly two class names required");
                c.corpus.class_names = {names[0], names[1]};
            }
            c.corpus.per_class = jc.value("per_class", c.corpus.per_class);
            c.corpus.image_size = jc.value("image_size", c.corpus.image_size);
            c.corpus.seed = jc.value("seed", c.corpus.seed);
        }
        c.train_fraction = j.value("train_fraction", c.train_fraction);
        if (j.contains("train")) {
            const json& jt = j["train"];
            c.train.epochs = jt.value("epochs", c.train.epochs);
            c.train.batch_size = jt.value("batch_size", c.train.batch_size);
            c.train.learning_rate = jt.value("learning_rate", c.train.learning_rate);
            c.train.beta1 = jt.value("beta1", c.train.beta1);
            c.train.beta2 = jt.value("beta2", c.train.beta2);
            c.train.eps = jt.value("eps", c.train.eps);
            c.train.seed = jt.value("seed", c.train.seed);
        }
        auto read_slic = [&](const char* key, SlicParams& s) {
            if (!j.contains(key)) return;
            const json& js = j[key];
            s.k = js.value("k", s.k);
            s.compactness = js.value("compactness", s.compactness);
            s.max_iter = js.value("max_iter", s.max_iter);
            s.residual_threshold = js.value("residual_threshold", s.residual_threshold);
        };
        read_slic("slic_ga", c.slic_ga);
        read_slic("slic_mask", c.slic_mask);
        if (j.contains("ga")) {
            const json& jg = j["ga"];
            c.ga.population = jg.value("population", c.ga.population);
            c.ga.generations = jg.value("generations", c.ga.generations);
            c.ga.mutation_prob = jg.value("mutation_prob", c.ga.mutation_prob);
            c.ga.seed = jg.value("seed", c.ga.seed);
        }
        c.use_ga = j.value("use_ga", c.use_ga);
        c.n_ssn = j.value("n_ssn", c.n_ssn);
        c.scale = j.value("scale", c.scale);
        c.semspace_pairs = j.value("semspace_pairs", c.semspace_pairs);
        if (j.contains("vis")) {
            const json& jv = j["vis"];
            c.vis.lambda = jv.value("lambda", c.vis.lambda);
            c.vis.beta = jv.value("beta", c.vis.beta);
            c.vis.learning_rate = jv.value("learning_rate", c.vis.learning_rate);
            c.vis.halving_interval = jv.value("halving_interval", c.vis.halving_interval);
            c.vis.max_iters = jv.value("max_iters", c.vis.max_iters);
        }
        c.variance_target = j.value("variance_target", c.variance_target);
        c.flag_hi = j.value("flag_hi", c.flag_hi);
        c.flag_lo = j.value("flag_lo", c.flag_lo);
        if (j.contains("attack")) {
            const json& ja = j["attack"];
            c.attack.epsilon = ja.value("epsilon", c.attack.epsilon);
            c.attack.steps = ja.value("steps", c.attack.steps);
            c.attack.step_size = ja.value("step_size", c.attack.step_size);
            c.attack.seed = ja.value("seed", c.attack.seed);
        }
        c.adv_pairs = j.value("adv_pairs", c.adv_pairs);
        c.analysis_class = j.value("analysis_class", c.analysis_class);
        c.assess_sample = j.value("assess_sample", c.assess_sample);
        c.assess_image = j.value("assess_image", c.assess_image);
        c.search_class = j.value("search_class", c.search_class);
        c.search_concept = j.value("search_concept", c.search_concept);
        c.search_above = j.value("search_above", c.search_above);
        c.search_threshold = j.value("search_threshold", c.search_threshold);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed pipeline config: ") + e.what());
    }
    c.validate();
    return c;
}

void save_pipeline_config(const std::string& path, const PipelineConfig& config) {
    write_text_file(path, config.to_json());
}

PipelineConfig load_pipeline_config(const std::string& path) {
    return PipelineConfig::from_json(read_text_file(path));
}

void split_corpus(const Corpus& corpus, double train_fraction,
                  std::vector<const SyntheticSample*>& train_out,
                  std::vector<const SyntheticSample*>& test_out) {
    train_out.clear();
    test_out.clear();
    for (int label = 0; label < 2; ++label) {
        std::vector<const SyntheticSample*> cls;
        for (const auto& s : corpus.samples)
            if (s.label == label) cls.push_back(&s);
        const std::size_t n_train = static_cast<std::size_t>(std::floor(cls.size() * train_fraction));
        for (std::size_t i = 0; i < cls.size(); ++i)
            (i < n_train ? train_out : test_out).push_back(cls[i]);
    }
}

namespace {

Corpus make_corpus(const PipelineConfig& config) {
    return config.corpus.source == CorpusSpec::Source::Synthetic ? generate_synthetic_corpus(config.corpus)
                                                                 : load_folder_corpus(config.corpus);
}

std::string model_path(const std::string& run_dir) { return run_dir + "/model.ckpt"; }

std::string space_path(const std::string& run_dir, const std::string& cls, const std::string& concept_name) {
    return run_dir + "/spaces/" + cls + "_" + concept_name + ".space.json";
}

std::string fit_path(const std::string& run_dir, const std::string& cls, const std::string& concept_name) {
    return run_dir + "/fits/" + cls + "_" + concept_name + ".fit.json";
}

void require_artifact(const std::string& path, const std::string& producer) {
    if (!fs::exists(path))
        throw MissingPrerequisite("missing artifact " + path + "; run '" + producer + "' first");
}

CnnModel load_model(const std::string& run_dir) {
    require_artifact(model_path(run_dir), "train");
    return load_checkpoint(model_path(run_dir));
}

SpaceTable load_space_table(const PipelineConfig& config, const std::string& run_dir) {
    SpaceTable table;
    table.class_names = config.corpus.class_names;
    table.concepts = {"eyes", "nose", "legs"};
    for (int cls = 0; cls < 2; ++cls)
        for (int k = 0; k < 3; ++k) {
            const std::string p = fit_path(run_dir, table.class_names[cls], table.concepts[k]);
            require_artifact(p, "fit-stats");
            table.put(cls, k, load_fitted_space(p));
        }
    return table;
}

// epsilon knob is a fraction of the raw [0,1] range; the attack itself runs
// in standardized units
AttackConfig scaled_attack(const PipelineConfig& config, const CnnModel& model) {
    AttackConfig a = config.attack;
    const double mean_sigma = (model.norm.stdev[0] + model.norm.stdev[1] + model.norm.stdev[2]) / 3.0;
    a.epsilon = config.attack.epsilon / mean_sigma;
    return a;
}

std::vector<std::string> cmd_train(const PipelineConfig& config, const std::string& run_dir) {
    Corpus corpus = make_corpus(config);
    std::vector<const SyntheticSample*> train_set, test_set;
    split_corpus(corpus, config.train_fraction, train_set, test_set);

    std::vector<LabeledImage> train_data, test_data;
    for (const auto* s : train_set) train_data.push_back({s->image, s->label});
    for (const auto* s : test_set) test_data.push_back({s->image, s->label});

    TrainReport report;
    CnnModel model = train(train_data, config.train, &report);
    save_checkpoint(model_path(run_dir), model);

    std::ostringstream log;
    log << "batch,loss\n";
    for (std::size_t i = 0; i < report.batch_loss.size(); ++i) log << i << "," << report.batch_loss[i] << "\n";
    write_text_file(run_dir + "/training_log.csv", log.str());

    json summary;
    summary["train_accuracy"] = accuracy(model, train_data);
    summary["test_accuracy"] = test_data.empty() ? 0.0 : accuracy(model, test_data);
    summary["train_samples"] = train_data.size();
    summary["test_samples"] = test_data.size();
    write_text_file(run_dir + "/train_summary.json", summary.dump(2) + "\n");

    return {model_path(run_dir), run_dir + "/training_log.csv", run_dir + "/train_summary.json"};
}

std::vector<std::string> cmd_extract_traits(const PipelineConfig& config, const std::string& run_dir) {
    CnnModel model = load_model(run_dir);
    Corpus corpus = make_corpus(config);
    std::vector<Image> samples = class_images(corpus, config.analysis_class);

    TraitConfig tc;
    tc.use_ga = config.use_ga;
    tc.class_id = config.analysis_class;
    tc.slic = config.slic_ga;
    tc.ga = config.ga;
    tc.retention = Retention::variance(config.variance_target);
    PcaResult pca = extract_common_traits(samples, model, tc);

    const std::string cls = config.corpus.class_names[config.analysis_class];
    const std::string scores = run_dir + "/traits_" + cls + "_scores.csv";
    const std::string meta = run_dir + "/traits_" + cls + "_meta.json";
    save_pca_scores_csv(scores, pca);
    save_pca_meta(meta, pca);
    return {scores, meta};
}

std::vector<std::string> cmd_extract_semspace(const PipelineConfig& config, const std::string& run_dir) {
    CnnModel model = load_model(run_dir);
    Corpus corpus = make_corpus(config);
    fs::create_directories(run_dir + "/spaces");

    std::vector<std::string> outputs;
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<const SyntheticSample*> pool;
        for (const auto& s : corpus.samples)
            if (s.label == cls) pool.push_back(&s);
        const int pairs = std::min<int>(config.semspace_pairs, static_cast<int>(pool.size()));
        if (pairs < 2) throw InsufficientSamples("not enough samples for semantic space extraction");

        for (const std::string& concept_name : corpus.concepts) {
            for (int i = 0; i < pairs; ++i)
                if (!pool[i]->parts.count(concept_name))
                    throw InvalidParam("corpus sample has no '" + concept_name +
                                       "' annotation; semantic space extraction needs the synthetic corpus");
            std::vector<std::vector<double>> unmasked(pairs), masked(pairs);
            parallel_for(pairs, [&](int i) {
                const SyntheticSample& s = *pool[i];
                unmasked[i] = forward_features(model, s.image);
                masked[i] = forward_features(model, mask_part(s, concept_name));
            });
            PcaResult pc_u = row_centered_pca_of_rows(unmasked, Retention::fixed_k(1));
            PcaResult pc_m = row_centered_pca_of_rows(masked, Retention::fixed_k(1));
            std::vector<double> su(pc_u.components.rows), sm(pc_m.components.rows);
            for (int i = 0; i < pc_u.components.rows; ++i) {
                su[i] = pc_u.components.at(i, 0);
                sm[i] = pc_m.components.at(i, 0);
            }
            SemanticSpace space = discover_ssns(su, sm, config.n_ssn);
            space.concept_name = concept_name;
            space.class_name = config.corpus.class_names[cls];
            space.samples_unmask = pairs;
            space.samples_mask = pairs;
            const std::string path = space_path(run_dir, space.class_name, concept_name);
            save_semantic_space(path, space, config.scale);
            outputs.push_back(path);
        }
    }
    return outputs;
}

std::vector<std::string> cmd_visualize(const PipelineConfig& config, const std::string& run_dir) {
    CnnModel model = load_model(run_dir);
    std::vector<std::string> outputs;
    for (int cls = 0; cls < 2; ++cls) {
        for (const std::string& concept_name : {std::string("eyes"), std::string("nose"), std::string("legs")}) {
            const std::string cname = config.corpus.class_names[cls];
            const std::string spath = space_path(run_dir, cname, concept_name);
            require_artifact(spath, "extract-semspace");
            double scale = config.scale;
            SemanticSpace space = load_semantic_space(spath, &scale);
            TargetEncoding enc = build_target_encoding(space, model.feature_width(), scale);
            VisResult vis = visualize(model, enc, config.vis);
            const std::string png = run_dir + "/vis_" + cname + "_" + concept_name + ".png";
            const std::string csv = run_dir + "/vis_" + cname + "_" + concept_name + "_objective.csv";
            write_rgb_png(png, vis.image.pixels);
            save_objective_trace_csv(csv, vis.objective_trace);
            outputs.push_back(png);
            outputs.push_back(csv);
        }
    }
    return outputs;
}

std::vector<std::string> cmd_fit_stats(const PipelineConfig& config, const std::string& run_dir) {
    CnnModel model = load_model(run_dir);
    Corpus corpus = make_corpus(config);
    fs::create_directories(run_dir + "/fits");

    std::vector<std::string> outputs;
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<Image> samples = class_images(corpus, cls);
        std::vector<std::vector<double>> feats(samples.size());
        parallel_for(static_cast<int>(samples.size()),
                     [&](int i) { feats[i] = forward_features(model, samples[i]); });

        for (const std::string& concept_name : corpus.concepts) {
            const std::string cname = config.corpus.class_names[cls];
            const std::string spath = space_path(run_dir, cname, concept_name);
            require_artifact(spath, "extract-semspace");
            double scale = config.scale;
            FittedSpace fspace;
            fspace.space = load_semantic_space(spath, &scale);
            std::vector<double> activations(feats.size());
            for (std::size_t i = 0; i < feats.size(); ++i)
                activations[i] = weighted_activation(feats[i], fspace.space);
            fspace.fit = fit_activation_distribution(activations);

            const std::string fpath = fit_path(run_dir, cname, concept_name);
            const std::string hpath = run_dir + "/fits/" + cname + "_" + concept_name + "_activations.csv";
            save_fitted_space(fpath, fspace, scale);
            save_activations_csv(hpath, activations);
            outputs.push_back(fpath);
            outputs.push_back(hpath);
        }
    }
    return outputs;
}

std::vector<std::string> cmd_assess(const PipelineConfig& config, const std::string& run_dir) {
    CnnModel model = load_model(run_dir);
    SpaceTable table = load_space_table(config, run_dir);

    Image image;
    if (!config.assess_image.empty()) {
        image.pixels = resize_nearest(read_rgb_png(config.assess_image), model.input_shape.h,
                                      model.input_shape.w);
    } else {
        Corpus corpus = make_corpus(config);
        std::vector<const SyntheticSample*> train_set, test_set;
        split_corpus(corpus, config.train_fraction, train_set, test_set);
        const int idx = config.assess_sample >= 0 ? config.assess_sample : 0;
        if (idx >= static_cast<int>(test_set.size()))
            throw InvalidParam("assess sample index outside the test split");
        image = test_set[idx]->image;
    }

    std::vector<double> features = forward_features(model, image);
    std::vector<double> probs = classify_features(model, features);
    const int predicted = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());

    Radar radar = compute_radar(features, table);
    Indicators ind = derive_indicators(radar, predicted);
    Explanation expl = generate_explanation(ind);

    save_radar_csv(run_dir + "/radar.csv", radar);
    save_radar_svg(run_dir + "/radar.svg", radar);

    json aj;
    aj["class_probabilities"] = probs;
    aj["predicted_class"] = table.class_names[predicted];
    aj["p_max"] = ind.p_max;
    aj["s_max"] = ind.s_max;
    json dp = json::object();
    for (const auto& [cname, d] : ind.delta_p) dp[cname] = d;
    aj["delta_p"] = dp;
    aj["delta_max_p"] = ind.delta_max_p;
    aj["adversarial_flag"] = flag_adversarial(radar, config.flag_hi, config.flag_lo);
    write_text_file(run_dir + "/assessment.json", aj.dump(2) + "\n");
    write_text_file(run_dir + "/explanation.txt", expl.sentence + "\n");

    return {run_dir + "/radar.csv", run_dir + "/radar.svg", run_dir + "/assessment.json",
            run_dir + "/explanation.txt"};
}

std::vector<std::string> cmd_search(const PipelineConfig& config, const std::string& run_dir) {
    CnnModel model = load_model(run_dir);
    const std::string cls = config.search_class.empty() ? config.corpus.class_names[0] : config.search_class;
    int cls_id = -1;
    for (int i = 0; i < 2; ++i)
        if (config.corpus.class_names[i] == cls) cls_id = i;
    if (cls_id < 0) throw InvalidParam("unknown search class '" + cls + "'");

    const std::string fpath = fit_path(run_dir, cls, config.search_concept);
    require_artifact(fpath, "fit-stats");
    FittedSpace space = load_fitted_space(fpath);

    Corpus corpus = make_corpus(config);
    std::vector<Image> samples = class_images(corpus, cls_id);
    std::vector<int> ids = search_samples(samples, model, space,
                                          config.search_above ? Predicate::Above : Predicate::Below,
                                          config.search_threshold);
    save_search_csv(run_dir + "/search.csv", ids);
    return {run_dir + "/search.csv"};
}

std::vector<std::string> cmd_detect_adv(const PipelineConfig& config, const std::string& run_dir) {
    CnnModel model = load_model(run_dir);
    SpaceTable table = load_space_table(config, run_dir);
    Corpus corpus = make_corpus(config);
    std::vector<const SyntheticSample*> train_set, test_set;
    split_corpus(corpus, config.train_fraction, train_set, test_set);
    const int n = std::min<int>(config.adv_pairs, static_cast<int>(test_set.size()));
    if (n < 1) throw InsufficientSamples("no test samples for adversarial detection");

    const AttackConfig attack = scaled_attack(config, model);
    std::vector<int> nat_flag(n), adv_flag(n), adv_miss(n);
    parallel_for(n, [&](int i) {
        const Image& natural = test_set[i]->image;
        const int label = test_set[i]->label;
        Image attacked = pgd_attack(model, natural, 1 - label, attack);
        nat_flag[i] = flag_adversarial(compute_radar(natural, model, table), config.flag_hi, config.flag_lo);
        adv_flag[i] = flag_adversarial(compute_radar(attacked, model, table), config.flag_hi, config.flag_lo);
        std::vector<double> p = predict(model, attacked);
        adv_miss[i] = (static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) != label) ? 1 : 0;
    });

    std::ostringstream csv;
    csv << "sample,natural_flagged,attacked_flagged,attacked_misclassified\n";
    int nat_total = 0, adv_total = 0, miss_total = 0;
    for (int i = 0; i < n; ++i) {
        csv << i << "," << nat_flag[i] << "," << adv_flag[i] << "," << adv_miss[i] << "\n";
        nat_total += nat_flag[i];
        adv_total += adv_flag[i];
        miss_total += adv_miss[i];
    }
    write_text_file(run_dir + "/adv_report.csv", csv.str());

    json summary;
    summary["pairs"] = n;
    summary["natural_flag_rate"] = static_cast<double>(nat_total) / n;
    summary["attacked_flag_rate"] = static_cast<double>(adv_total) / n;
    summary["attack_success_rate"] = static_cast<double>(miss_total) / n;
    write_text_file(run_dir + "/adv_summary.json", summary.dump(2) + "\n");
    return {run_dir + "/adv_report.csv", run_dir + "/adv_summary.json"};
}

}  // namespace

std::vector<std::string> run_command(const PipelineConfig& config, const std::string& command,
                                     const std::string& run_dir) {
    config.validate();
    fs::create_directories(run_dir);

    std::vector<std::string> outputs;
    if (command == "train")
        outputs = cmd_train(config, run_dir);
    else if (command == "extract-traits")
        outputs = cmd_extract_traits(config, run_dir);
    else if (command == "extract-semspace")
        outputs = cmd_extract_semspace(config, run_dir);
    else if (command == "visualize")
        outputs = cmd_visualize(config, run_dir);
    else if (command == "fit-stats")
        outputs = cmd_fit_stats(config, run_dir);
    else if (command == "assess")
        outputs = cmd_assess(config, run_dir);
    else if (command == "search")
        outputs = cmd_search(config, run_dir);
    else if (command == "detect-adv")
        outputs = cmd_detect_adv(config, run_dir);
    else
        throw InvalidParam("unknown command '" + command +
                           "'; expected one of train, extract-traits, extract-semspace, visualize, "
                           "fit-stats, assess, search, detect-adv");

    std::vector<std::string> inputs = {"corpus:" +
                                       std::string(config.corpus.source == CorpusSpec::Source::Synthetic
                                                       ? "synthetic"
                                                       : config.corpus.folder)};
    const std::string manifest = run_dir + "/manifest_" + command + ".json";
    write_manifest(manifest, command, config.to_json(), inputs, outputs);
    outputs.push_back(manifest);
    return outputs;
}

}  // namespace semlens

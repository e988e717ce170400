#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "semlens/errors.hpp"
#include "semlens/pipeline.hpp"

namespace {

std::string default_run_dir() {
    if (const char* root = std::getenv("SEMLENS_RUN_ROOT")) return std::string(root) + "/default";
    return "runs/default";
}

// The config file provides the defaults; explicit flags override it, so it
// has to be loaded before CLI11 binds the options.
std::string prescan_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    semlens::PipelineConfig config;
    const std::string config_path = prescan_config_path(argc, argv);
    try {
        if (!config_path.empty()) config = semlens::load_pipeline_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"semlens: semantic interpretation pipeline for small convolutional classifiers"};
    app.require_subcommand(1);

    std::string run_dir = default_run_dir();
    std::string config_opt;
    std::string corpus_source =
        config.corpus.source == semlens::CorpusSpec::Source::Folder ? "folder" : "synthetic";

    app.add_option("--run", run_dir, "run directory for artifacts")->capture_default_str();
    app.add_option("--config", config_opt, "pipeline config JSON (flags override it)");
    app.add_option("--corpus-source", corpus_source, "synthetic | folder")->capture_default_str();
    app.add_option("--corpus-folder", config.corpus.folder, "folder with <class>/*.png");
    app.add_option("--per-class", config.corpus.per_class, "samples per class")->capture_default_str();
    app.add_option("--image-size", config.corpus.image_size, "square image size")->capture_default_str();
    app.add_option("--corpus-seed", config.corpus.seed, "corpus generator seed")->capture_default_str();
    app.add_option("--epochs", config.train.epochs)->capture_default_str();
    app.add_option("--batch-size", config.train.batch_size)->capture_default_str();
    app.add_option("--learning-rate", config.train.learning_rate)->capture_default_str();
    app.add_option("--train-seed", config.train.seed)->capture_default_str();
    app.add_option("--train-fraction", config.train_fraction)->capture_default_str();
    app.add_option("--superpixels-ga", config.slic_ga.k, "superpixel count for the GA")->capture_default_str();
    app.add_option("--superpixels-mask", config.slic_mask.k, "superpixel count for masking")
        ->capture_default_str();
    app.add_option("--compactness", config.slic_ga.compactness)->capture_default_str();
    app.add_option("--population", config.ga.population)->capture_default_str();
    app.add_option("--generations", config.ga.generations)->capture_default_str();
    app.add_option("--mutation-prob", config.ga.mutation_prob)->capture_default_str();
    app.add_option("--ga-seed", config.ga.seed)->capture_default_str();
    app.add_flag("--use-ga", config.use_ga, "GA superpixel preprocessing for extract-traits");
    app.add_option("--n-ssn", config.n_ssn)->capture_default_str();
    app.add_option("--scale", config.scale)->capture_default_str();
    app.add_option("--semspace-pairs", config.semspace_pairs)->capture_default_str();
    app.add_option("--vis-lambda", config.vis.lambda)->capture_default_str();
    app.add_option("--vis-beta", config.vis.beta)->capture_default_str();
    app.add_option("--vis-lr", config.vis.learning_rate)->capture_default_str();
    app.add_option("--vis-halving", config.vis.halving_interval)->capture_default_str();
    app.add_option("--vis-iters", config.vis.max_iters)->capture_default_str();
    app.add_option("--variance-target", config.variance_target)->capture_default_str();
    app.add_option("--flag-hi", config.flag_hi)->capture_default_str();
    app.add_option("--flag-lo", config.flag_lo)->capture_default_str();
    app.add_option("--attack-eps", config.attack.epsilon, "L-inf budget as a fraction of the pixel range")
        ->capture_default_str();
    app.add_option("--attack-steps", config.attack.steps)->capture_default_str();
    app.add_option("--adv-pairs", config.adv_pairs)->capture_default_str();
    app.add_option("--analysis-class", config.analysis_class, "class index for extract-traits")
        ->capture_default_str();
    app.add_option("--assess-sample", config.assess_sample, "test-split sample index for assess");
    app.add_option("--assess-image", config.assess_image, "external PNG for assess");
    app.add_option("--search-class", config.search_class);
    app.add_option("--search-concept", config.search_concept)->capture_default_str();
    app.add_flag("!--search-below", config.search_above, "search below the threshold instead of above");
    app.add_option("--search-threshold", config.search_threshold)->capture_default_str();

    for (const char* name : {"train", "extract-traits", "extract-semspace", "visualize", "fit-stats",
                             "assess", "search", "detect-adv"})
        app.add_subcommand(name)->silent();

    CLI11_PARSE(app, argc, argv);

    try {
        if (corpus_source == "folder")
            config.corpus.source = semlens::CorpusSpec::Source::Folder;
        else if (corpus_source == "synthetic")
            config.corpus.source = semlens::CorpusSpec::Source::Synthetic;
        else
            throw semlens::InvalidParam("corpus source must be 'synthetic' or 'folder'");

        const std::string command = app.get_subcommands().front()->get_name();
        std::vector<std::string> outputs = semlens::run_command(config, command, run_dir);
        for (const std::string& p : outputs) std::cout << p << "\n";
        return 0;
    } catch (const semlens::MissingPrerequisite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

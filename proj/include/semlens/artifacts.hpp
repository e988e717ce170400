#pragma once

#include <string>
#include <vector>

#include "semlens/assess.hpp"
#include "semlens/pca.hpp"
#include "semlens/semstats.hpp"
#include "semlens/slic.hpp"

namespace semlens {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string hash_file_hex(const std::string& path);

// Semantic space with the visualization scale, as structured text.
void save_semantic_space(const std::string& path, const SemanticSpace& space, double scale);
SemanticSpace load_semantic_space(const std::string& path, double* scale = nullptr);

// Space plus its fitted activation distribution.
void save_fitted_space(const std::string& path, const FittedSpace& fs, double scale);
FittedSpace load_fitted_space(const std::string& path, double* scale = nullptr);

void save_mask_spec(const std::string& path, const MaskSpec& spec);
MaskSpec load_mask_spec(const std::string& path);

// Superpixel label map as 16-bit grayscale PNG.
void save_label_map(const std::string& path, const Segmentation& seg);
std::vector<int> load_label_map(const std::string& path, int& h, int& w);

// PC scores as CSV (rows = feature index, columns = PCs) plus a metadata
// sidecar with eigenvalues, ratios, k and the centering means.
void save_pca_scores_csv(const std::string& path, const PcaResult& pca);
void save_pca_meta(const std::string& path, const PcaResult& pca);

void save_trace_csv(const std::string& path, const GaResult& result);
void save_objective_trace_csv(const std::string& path, const std::vector<double>& trace);
void save_activations_csv(const std::string& path, const std::vector<double>& values);
void save_radar_csv(const std::string& path, const Radar& radar);
void save_radar_svg(const std::string& path, const Radar& radar);
void save_search_csv(const std::string& path, const std::vector<int>& ids);

// Run manifest: command, config digest, seeds, inputs, output hashes and a
// timestamp. Everything except the timestamp is reproducible from config +
// seed.
void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_json, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& output_paths);

}  // namespace semlens

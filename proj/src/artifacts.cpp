#include "semlens/artifacts.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "semlens/png_io.hpp"
#include "semlens/util.hpp"

namespace semlens {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading file: " + path);
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing file: " + path);
}

std::string hash_file_hex(const std::string& path) {
    const std::string bytes = read_text_file(path);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size())));
    return buf;
}

namespace {

json parse_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw IoError("malformed artifact " + path + ": " + e.what());
    }
}

}  // namespace

void save_semantic_space(const std::string& path, const SemanticSpace& space, double scale) {
    json j;
    j["kind"] = "semantic_space";
    j["concept"] = space.concept_name;
    j["class"] = space.class_name;
    j["ssn"] = space.ssn;
    j["delta"] = space.delta;
    j["scale"] = scale;
    j["source_pc"] = space.source_pc;
    j["samples_unmask"] = space.samples_unmask;
    j["samples_mask"] = space.samples_mask;
    write_text_file(path, j.dump(2) + "\n");
}

SemanticSpace load_semantic_space(const std::string& path, double* scale) {
    const json j = parse_json_file(path);
    try {
        if (j.at("kind") != "semantic_space") throw IoError("not a semantic space file: " + path);
        SemanticSpace s;
        s.concept_name = j.at("concept");
        s.class_name = j.at("class");
        s.ssn = j.at("ssn").get<std::vector<int>>();
        s.delta = j.at("delta").get<std::vector<double>>();
        s.source_pc = j.at("source_pc");
        s.samples_unmask = j.at("samples_unmask");
        s.samples_mask = j.at("samples_mask");
        if (scale) *scale = j.at("scale");
        if (s.ssn.size() != s.delta.size() || s.ssn.empty())
            throw IoError("inconsistent semantic space file: " + path);
        return s;
    } catch (const json::exception& e) {
        throw IoError("malformed semantic space " + path + ": " + e.what());
    }
}

void save_fitted_space(const std::string& path, const FittedSpace& fs, double scale) {
    json j;
    j["kind"] = "fitted_space";
    j["concept"] = fs.space.concept_name;
    j["class"] = fs.space.class_name;
    j["ssn"] = fs.space.ssn;
    j["delta"] = fs.space.delta;
    j["scale"] = scale;
    j["source_pc"] = fs.space.source_pc;
    j["samples_unmask"] = fs.space.samples_unmask;
    j["samples_mask"] = fs.space.samples_mask;
    j["mu"] = fs.fit.mu;
    j["sigma"] = fs.fit.sigma;
    j["a_min"] = fs.fit.a_min;
    j["a_max"] = fs.fit.a_max;
    j["count"] = fs.fit.count;
    write_text_file(path, j.dump(2) + "\n");
}

FittedSpace load_fitted_space(const std::string& path, double* scale) {
    const json j = parse_json_file(path);
    try {
        if (j.at("kind") != "fitted_space") throw IoError("not a fitted space file: " + path);
        FittedSpace fs;
        fs.space.concept_name = j.at("concept");
        fs.space.class_name = j.at("class");
        fs.space.ssn = j.at("ssn").get<std::vector<int>>();
        fs.space.delta = j.at("delta").get<std::vector<double>>();
        fs.space.source_pc = j.at("source_pc");
        fs.space.samples_unmask = j.at("samples_unmask");
        fs.space.samples_mask = j.at("samples_mask");
        fs.fit.mu = j.at("mu");
        fs.fit.sigma = j.at("sigma");
        fs.fit.a_min = j.at("a_min");
        fs.fit.a_max = j.at("a_max");
        fs.fit.count = j.at("count");
        fs.fit.low_sample = fs.fit.count < 300;
        if (scale) *scale = j.at("scale");
        if (fs.fit.count < 1 || fs.fit.sigma <= 0.0 || fs.fit.a_min >= fs.fit.a_max)
            throw IoError("inconsistent fitted space file: " + path);
        return fs;
    } catch (const json::exception& e) {
        throw IoError("malformed fitted space " + path + ": " + e.what());
    }
}

void save_mask_spec(const std::string& path, const MaskSpec& spec) {
    json j;
    j["kind"] = "mask_spec";
    j["targets"] = std::vector<int>(spec.targets.begin(), spec.targets.end());
    j["fill"] = spec.fill;
    write_text_file(path, j.dump(2) + "\n");
}

MaskSpec load_mask_spec(const std::string& path) {
    const json j = parse_json_file(path);
    try {
        if (j.at("kind") != "mask_spec") throw IoError("not a mask spec file: " + path);
        MaskSpec spec;
        for (int t : j.at("targets").get<std::vector<int>>()) spec.targets.insert(t);
        spec.fill = j.at("fill");
        return spec;
    } catch (const json::exception& e) {
        throw IoError("malformed mask spec " + path + ": " + e.what());
    }
}

void save_label_map(const std::string& path, const Segmentation& seg) {
    if (seg.num_segments() > 65536) throw InvalidParam("label map exceeds 16-bit range");
    std::vector<std::uint16_t> data(seg.labels.size());
    for (std::size_t i = 0; i < seg.labels.size(); ++i) data[i] = static_cast<std::uint16_t>(seg.labels[i]);
    write_gray16_png(path, data, seg.h, seg.w);
}

std::vector<int> load_label_map(const std::string& path, int& h, int& w) {
    const std::vector<std::uint16_t> data = read_gray16_png(path, h, w);
    return std::vector<int>(data.begin(), data.end());
}

namespace {

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void save_pca_scores_csv(const std::string& path, const PcaResult& pca) {
    std::ostringstream out;
    out << "feature";
    for (int j = 0; j < pca.k; ++j) out << ",pc" << (j + 1);
    out << "\n";
    for (int i = 0; i < pca.components.rows; ++i) {
        out << i;
        for (int j = 0; j < pca.k; ++j) out << "," << csv_num(pca.components.at(i, j));
        out << "\n";
    }
    write_text_file(path, out.str());
}

void save_pca_meta(const std::string& path, const PcaResult& pca) {
    json j;
    j["kind"] = "pca_meta";
    j["k"] = pca.k;
    j["eigenvalues"] = pca.eigenvalues;
    j["information_ratios"] = pca.ratios;
    j["trace"] = pca.trace;
    j["row_means"] = pca.row_means;
    write_text_file(path, j.dump(2) + "\n");
}

void save_trace_csv(const std::string& path, const GaResult& result) {
    std::ostringstream out;
    out << "generation,elite_fitness,mean_fitness\n";
    for (std::size_t g = 0; g < result.elite_trace.size(); ++g)
        out << g << "," << csv_num(result.elite_trace[g]) << "," << csv_num(result.mean_trace[g]) << "\n";
    write_text_file(path, out.str());
}

void save_objective_trace_csv(const std::string& path, const std::vector<double>& trace) {
    std::ostringstream out;
    out << "step,objective\n";
    for (std::size_t i = 0; i < trace.size(); ++i) out << i << "," << csv_num(trace[i]) << "\n";
    write_text_file(path, out.str());
}

void save_activations_csv(const std::string& path, const std::vector<double>& values) {
    std::ostringstream out;
    out << "sample,activation\n";
    for (std::size_t i = 0; i < values.size(); ++i) out << i << "," << csv_num(values[i]) << "\n";
    write_text_file(path, out.str());
}

void save_radar_csv(const std::string& path, const Radar& radar) {
    std::ostringstream out;
    out << "class,concept,semantic_probability\n";
    for (int cls = 0; cls < 2; ++cls)
        for (int k = 0; k < 3; ++k)
            out << radar.class_names[cls] << "," << radar.concepts[k] << "," << csv_num(radar.p[cls][k])
                << "\n";
    write_text_file(path, out.str());
}

void save_radar_svg(const std::string& path, const Radar& radar) {
    // hexagonal radar chart: 6 axes = (class, concept) pairs
    const double cx = 160, cy = 160, r = 120;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"320\" height=\"320\" "
           "viewBox=\"0 0 320 320\">\n";
    out << "<rect width=\"320\" height=\"320\" fill=\"white\"/>\n";
    for (double ring : {0.25, 0.5, 0.75, 1.0}) {
        out << "<polygon fill=\"none\" stroke=\"#ccc\" points=\"";
        for (int i = 0; i < 6; ++i) {
            const double ang = M_PI / 2 - i * M_PI / 3;
            out << cx + ring * r * std::cos(ang) << "," << cy - ring * r * std::sin(ang) << " ";
        }
        out << "\"/>\n";
    }
    out << "<polygon fill=\"rgba(200,60,60,0.35)\" stroke=\"#c33c3c\" points=\"";
    for (int i = 0; i < 6; ++i) {
        const int cls = i / 3, k = i % 3;
        const double v = std::clamp(radar.p[cls][k], 0.0, 1.0);
        const double ang = M_PI / 2 - i * M_PI / 3;
        out << cx + v * r * std::cos(ang) << "," << cy - v * r * std::sin(ang) << " ";
    }
    out << "\"/>\n";
    for (int i = 0; i < 6; ++i) {
        const int cls = i / 3, k = i % 3;
        const double ang = M_PI / 2 - i * M_PI / 3;
        const double tx = cx + 1.12 * r * std::cos(ang);
        const double ty = cy - 1.12 * r * std::sin(ang);
        out << "<text x=\"" << tx << "\" y=\"" << ty
            << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
            << radar.class_names[cls] << " " << radar.concepts[k] << "</text>\n";
    }
    out << "</svg>\n";
    write_text_file(path, out.str());
}

void save_search_csv(const std::string& path, const std::vector<int>& ids) {
    std::ostringstream out;
    out << "sample_id\n";
    for (int id : ids) out << id << "\n";
    write_text_file(path, out.str());
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_json, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& output_paths) {
    json j;
    j["kind"] = "manifest";
    j["schema_version"] = 1;
    j["command"] = command;
    j["config"] = json::parse(config_json);
    j["inputs"] = inputs;
    json outs = json::array();
    for (const std::string& p : output_paths) {
        json o;
        o["path"] = p;
        o["fnv1a"] = hash_file_hex(p);
        outs.push_back(o);
    }
    j["outputs"] = outs;
    j["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace semlens

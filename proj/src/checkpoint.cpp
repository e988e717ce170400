#include "semlens/checkpoint.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace semlens {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void append_f32_le(std::string& blob, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    blob.push_back(static_cast<char>(bits & 0xff));
    blob.push_back(static_cast<char>((bits >> 8) & 0xff));
    blob.push_back(static_cast<char>((bits >> 16) & 0xff));
    blob.push_back(static_cast<char>((bits >> 24) & 0xff));
}

float read_f32_le(const unsigned char* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) |
                               (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

}  // namespace

void save_checkpoint(const std::string& path, const CnnModel& model) {
    model.validate();
    std::ostringstream header;
    header << "SEMLENS-CKPT 1\n";
    header << "input " << model.input_shape.c << " " << model.input_shape.h << " " << model.input_shape.w << "\n";
    header << "norm_mean " << fmt_double(model.norm.mean[0]) << " " << fmt_double(model.norm.mean[1]) << " "
           << fmt_double(model.norm.mean[2]) << "\n";
    header << "norm_std " << fmt_double(model.norm.stdev[0]) << " " << fmt_double(model.norm.stdev[1]) << " "
           << fmt_double(model.norm.stdev[2]) << "\n";
    header << "seed " << model.seed << "\n";
    header << "layers " << model.layers.size() << "\n";

    std::string blob;
    std::size_t n_floats = 0;
    for (const Layer& l : model.layers) {
        switch (l.kind) {
            case LayerKind::Conv:
                header << "conv " << l.in_ch << " " << l.out_ch << " " << l.ksize << "\n";
                break;
            case LayerKind::Relu:
                header << "relu\n";
                break;
            case LayerKind::MaxPool:
                header << "pool " << l.pool << "\n";
                break;
            case LayerKind::Gap:
                header << "gap\n";
                break;
            case LayerKind::Dense:
                header << "dense " << l.in_ch << " " << l.out_ch << "\n";
                break;
        }
        for (double v : l.w) {
            append_f32_le(blob, static_cast<float>(v));
            ++n_floats;
        }
        for (double v : l.b) {
            append_f32_le(blob, static_cast<float>(v));
            ++n_floats;
        }
    }
    header << "blob " << n_floats << "\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    const std::string h = header.str();
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

CnnModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading checkpoint: " + path);

    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        const std::size_t nl = contents.find('\n', pos);
        if (nl == std::string::npos) throw IoError("truncated checkpoint header: " + path);
        std::string line = contents.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };

    if (next_line() != "SEMLENS-CKPT 1") throw IoError("not a checkpoint file: " + path);

    CnnModel model;
    std::size_t n_layers = 0;
    long long expected_floats = -1;
    {
        std::istringstream ls(next_line());
        std::string tag;
        ls >> tag >> model.input_shape.c >> model.input_shape.h >> model.input_shape.w;
        if (tag != "input" || !ls) throw IoError("bad input line in checkpoint: " + path);
    }
    {
        std::istringstream ls(next_line());
        std::string tag;
        ls >> tag >> model.norm.mean[0] >> model.norm.mean[1] >> model.norm.mean[2];
        if (tag != "norm_mean" || !ls) throw IoError("bad norm_mean line in checkpoint: " + path);
    }
    {
        std::istringstream ls(next_line());
        std::string tag;
        ls >> tag >> model.norm.stdev[0] >> model.norm.stdev[1] >> model.norm.stdev[2];
        if (tag != "norm_std" || !ls) throw IoError("bad norm_std line in checkpoint: " + path);
    }
    {
        std::istringstream ls(next_line());
        std::string tag;
        ls >> tag >> model.seed;
        if (tag != "seed" || !ls) throw IoError("bad seed line in checkpoint: " + path);
    }
    {
        std::istringstream ls(next_line());
        std::string tag;
        ls >> tag >> n_layers;
        if (tag != "layers" || !ls) throw IoError("bad layers line in checkpoint: " + path);
    }
    for (std::size_t i = 0; i < n_layers; ++i) {
        std::istringstream ls(next_line());
        std::string kind;
        ls >> kind;
        if (kind == "conv") {
            int ic, oc, k;
            ls >> ic >> oc >> k;
            if (!ls) throw IoError("bad conv line in checkpoint: " + path);
            model.layers.push_back(Layer::conv(ic, oc, k));
        } else if (kind == "relu") {
            model.layers.push_back(Layer::relu());
        } else if (kind == "pool") {
            int k;
            ls >> k;
            if (!ls) throw IoError("bad pool line in checkpoint: " + path);
            model.layers.push_back(Layer::maxpool(k));
        } else if (kind == "gap") {
            model.layers.push_back(Layer::gap());
        } else if (kind == "dense") {
            int ic, oc;
            ls >> ic >> oc;
            if (!ls) throw IoError("bad dense line in checkpoint: " + path);
            model.layers.push_back(Layer::dense(ic, oc));
        } else {
            throw IoError("unknown layer kind '" + kind + "' in checkpoint: " + path);
        }
    }
    {
        std::istringstream ls(next_line());
        std::string tag;
        ls >> tag >> expected_floats;
        if (tag != "blob" || !ls || expected_floats < 0) throw IoError("bad blob line in checkpoint: " + path);
    }

    std::size_t want = 0;
    for (const Layer& l : model.layers) want += l.w.size() + l.b.size();
    if (static_cast<long long>(want) != expected_floats)
        throw IoError("blob count does not match architecture: " + path);
    if (contents.size() - pos != want * 4) throw IoError("truncated checkpoint blob: " + path);

    const auto* p = reinterpret_cast<const unsigned char*>(contents.data()) + pos;
    for (Layer& l : model.layers) {
        for (double& v : l.w) {
            v = read_f32_le(p);
            p += 4;
        }
        for (double& v : l.b) {
            v = read_f32_le(p);
            p += 4;
        }
    }
    model.validate();
    return model;
}

}  // namespace semlens

#include "byzfuse/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>

namespace byzfuse {

namespace {

using nlohmann::json;

std::string hex_double(double v, CheckpointPrecision precision) {
    char buf[48];
    if (precision == CheckpointPrecision::float32) {
        std::snprintf(buf, sizeof(buf), "%a", static_cast<double>(static_cast<float>(v)));
    } else {
        std::snprintf(buf, sizeof(buf), "%a", v);
    }
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw CheckpointCorruptionError("unparseable float literal: " + s);
    return v;
}

json tensor_to_json(const Eigen::MatrixXd& t, CheckpointPrecision p) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < t.rows(); ++r)
        for (Eigen::Index c = 0; c < t.cols(); ++c) arr.push_back(hex_double(t(r, c), p));
    return json{{"rows", t.rows()}, {"cols", t.cols()}, {"data", std::move(arr)}};
}

json tensor_to_json(const Eigen::VectorXd& t, CheckpointPrecision p) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < t.size(); ++i) arr.push_back(hex_double(t(i), p));
    return json{{"rows", t.size()}, {"cols", 1}, {"data", std::move(arr)}};
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& name) {
    if (j.at("rows").get<Eigen::Index>() != rows || j.at("cols").get<Eigen::Index>() != cols)
        throw CheckpointShapeError("tensor '" + name + "' has the wrong shape");
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw CheckpointShapeError("tensor '" + name + "' has the wrong element count");
    Eigen::MatrixXd t(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            t(r, c) = parse_double(data[i++].get<std::string>());
    return t;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index size, const std::string& name) {
    return matrix_from_json(j, size, 1, name).col(0);
}

json spec_to_json(const NetworkSpec& spec) {
    return json{{"input_size", spec.input_size},
                {"hidden_sizes", spec.hidden_sizes},
                {"output_size", spec.output_size},
                {"batch_norm", spec.batch_norm},
                {"seed", spec.seed}};
}

NetworkSpec spec_from_json(const json& j) {
    NetworkSpec spec;
    j.at("input_size").get_to(spec.input_size);
    j.at("hidden_sizes").get_to(spec.hidden_sizes);
    j.at("output_size").get_to(spec.output_size);
    j.at("batch_norm").get_to(spec.batch_norm);
    j.at("seed").get_to(spec.seed);
    return spec;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string checksum_string(const json& payload) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a(payload.dump())));
    return buf;
}

}  // namespace

void save_checkpoint(const NetworkParams& params, const std::filesystem::path& path,
                     CheckpointPrecision precision) {
    json payload;
    payload["spec"] = spec_to_json(params.spec);
    payload["step_count"] = params.step_count;
    payload["precision"] = precision == CheckpointPrecision::float32 ? "float32" : "float64";

    json tensors;
    for (std::size_t l = 0; l < params.hidden.size(); ++l) {
        const auto& layer = params.hidden[l];
        const std::string base = "hidden." + std::to_string(l) + ".";
        tensors[base + "weight"] = tensor_to_json(layer.weight, precision);
        tensors[base + "bias"] = tensor_to_json(layer.bias, precision);
        if (layer.bn) {
            tensors[base + "gamma"] = tensor_to_json(layer.bn->gamma, precision);
            tensors[base + "beta"] = tensor_to_json(layer.bn->beta, precision);
            tensors[base + "running_mean"] = tensor_to_json(layer.bn->running_mean, precision);
            tensors[base + "running_var"] = tensor_to_json(layer.bn->running_var, precision);
        }
    }
    tensors["output.weight"] = tensor_to_json(params.output.weight, precision);
    tensors["output.bias"] = tensor_to_json(params.output.bias, precision);
    payload["tensors"] = std::move(tensors);

    json doc;
    doc["format"] = "byzfuse-checkpoint";
    doc["version"] = 1;
    doc["checksum"] = checksum_string(payload);
    doc["payload"] = std::move(payload);

    std::ofstream out(path);
    if (!out) throw CheckpointError("cannot open for writing: " + path.string());
    out << doc.dump(1) << '\n';
    if (!out) throw CheckpointError("write failed: " + path.string());
}

NetworkParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw CheckpointCorruptionError(std::string("unparseable checkpoint: ") + e.what());
    }
    if (doc.value("format", "") != "byzfuse-checkpoint")
        throw CheckpointError("not a byzfuse checkpoint: " + path.string());
    if (doc.value("version", 0) != 1)
        throw CheckpointVersionError("unsupported checkpoint version " +
                                     std::to_string(doc.value("version", 0)));
    const auto& payload = doc.at("payload");
    if (doc.value("checksum", "") != checksum_string(payload))
        throw CheckpointCorruptionError("checksum mismatch in " + path.string());

    NetworkParams params;
    params.spec = spec_from_json(payload.at("spec"));
    params.step_count = payload.at("step_count").get<std::int64_t>();

    const auto& tensors = payload.at("tensors");
    auto fetch = [&](const std::string& name) -> const json& {
        if (!tensors.contains(name))
            throw CheckpointShapeError("missing tensor '" + name + "'");
        return tensors.at(name);
    };

    int fan_in = params.spec.input_size;
    for (std::size_t l = 0; l < params.spec.hidden_sizes.size(); ++l) {
        const int width = params.spec.hidden_sizes[l];
        const std::string base = "hidden." + std::to_string(l) + ".";
        DenseLayer layer;
        layer.weight = matrix_from_json(fetch(base + "weight"), width, fan_in, base + "weight");
        layer.bias = vector_from_json(fetch(base + "bias"), width, base + "bias");
        if (params.spec.batch_norm[l]) {
            BatchNormState bn;
            bn.gamma = vector_from_json(fetch(base + "gamma"), width, base + "gamma");
            bn.beta = vector_from_json(fetch(base + "beta"), width, base + "beta");
            bn.running_mean =
                vector_from_json(fetch(base + "running_mean"), width, base + "running_mean");
            bn.running_var =
                vector_from_json(fetch(base + "running_var"), width, base + "running_var");
            layer.bn = std::move(bn);
        }
        params.hidden.push_back(std::move(layer));
        fan_in = width;
    }
    params.output.weight = matrix_from_json(fetch("output.weight"), params.spec.output_size,
                                            fan_in, "output.weight");
    params.output.bias =
        vector_from_json(fetch("output.bias"), params.spec.output_size, "output.bias");
    return params;
}

}  // namespace byzfuse

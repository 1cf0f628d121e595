#include "checkpoint.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace pressflow {

namespace {

constexpr int kSchemaVersion = 1;

void append_doubles(std::string& out, const std::vector<double>& values) {
    out += '[';
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
}

void append_ints(std::string& out, const std::vector<int>& values) {
    out += '[';
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    out += ']';
}

[[noreturn]] void corrupt(const std::string& path, const std::string& why) {
    throw DataError("corrupt checkpoint " + path + ": " + why);
}

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) corrupt(path, std::string("missing field '") + key + "'");
    return *it;
}

std::vector<double> double_array(const nlohmann::json& j, const char* key,
                                 const std::string& path) {
    const auto& arr = field(j, key, path);
    if (!arr.is_array()) corrupt(path, std::string("'") + key + "' is not an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) corrupt(path, std::string("'") + key + "' holds a non-number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) corrupt(path, std::string("'") + key + "' holds a non-finite value");
        out.push_back(d);
    }
    return out;
}

std::vector<int> int_array(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& arr = field(j, key, path);
    if (!arr.is_array()) corrupt(path, std::string("'") + key + "' is not an array");
    std::vector<int> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number_integer()) corrupt(path, std::string("'") + key + "' holds a non-integer");
        out.push_back(v.get<int>());
    }
    return out;
}

std::string string_field(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_string()) corrupt(path, std::string("'") + key + "' is not a string");
    return v.get<std::string>();
}

double number_field(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_number()) corrupt(path, std::string("'") + key + "' is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) corrupt(path, std::string("'") + key + "' is not finite");
    return d;
}

} // namespace

std::string checkpoint_to_string(const ModelCheckpoint& ckpt) {
    const NetworkConfig& c = ckpt.config;
    std::string out;
    out.reserve(1 << 16);
    out += "{\n\"schema_version\": ";
    out += std::to_string(kSchemaVersion);
    out += ",\n\"kind\": \"";
    out += kind_name(ckpt.kind);
    out += "\",\n\"config\": {\"layer_sizes\": ";
    append_ints(out, c.layer_sizes);
    out += ", \"activation\": \"";
    out += activation_name(c.activation);
    out += "\", \"loss\": \"";
    out += loss_name(c.loss);
    out += "\", \"optimizer\": \"";
    out += optimizer_name(c.optimizer);
    out += "\", \"epochs\": ";
    out += std::to_string(c.epochs);
    out += ", \"learning_rate\": ";
    out += format_double(c.learning_rate);
    out += ", \"seed\": ";
    out += std::to_string(c.seed);
    out += ", \"mode\": \"";
    out += mode_name(c.mode);
    out += "\", \"split_fraction\": ";
    out += format_double(c.split_fraction);
    out += "},\n\"scaler\": {\"in_mean\": ";
    append_doubles(out, ckpt.scaler.in_mean);
    out += ", \"in_scale\": ";
    append_doubles(out, ckpt.scaler.in_scale);
    out += ", \"out_mean\": ";
    append_doubles(out, ckpt.scaler.out_mean);
    out += ", \"out_scale\": ";
    append_doubles(out, ckpt.scaler.out_scale);
    out += ", \"in_degenerate\": ";
    append_ints(out, ckpt.scaler.in_degenerate);
    out += ", \"out_degenerate\": ";
    append_ints(out, ckpt.scaler.out_degenerate);
    out += "},\n\"layers\": [\n";
    for (size_t l = 0; l < ckpt.params.layers.size(); ++l) {
        const Layer& layer = ckpt.params.layers[l];
        if (l) out += ",\n";
        out += "{\"rows\": ";
        out += std::to_string(layer.weights.rows);
        out += ", \"cols\": ";
        out += std::to_string(layer.weights.cols);
        out += ", \"weights\": ";
        append_doubles(out, layer.weights.data);
        out += ", \"bias\": ";
        append_doubles(out, layer.bias);
        out += "}";
    }
    out += "\n],\n\"threshold\": ";
    out += format_double(ckpt.threshold);
    out += ",\n\"loss_trace\": ";
    append_doubles(out, ckpt.loss_trace);
    out += ",\n\"dataset_fingerprint\": \"";
    out += ckpt.dataset_fingerprint;
    out += "\"\n}\n";
    return out;
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + path);
    const std::string body = checkpoint_to_string(ckpt);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) throw IoError("failed writing checkpoint " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string body = buf.str();

    const nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) corrupt(path, "not parseable");

    const auto& version = field(j, "schema_version", path);
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw DataError("checkpoint " + path + " has unsupported schema version " +
                        version.dump());
    }

    ModelCheckpoint ckpt;
    ckpt.kind = kind_from_name(string_field(j, "kind", path));

    const auto& jc = field(j, "config", path);
    if (!jc.is_object()) corrupt(path, "'config' is not an object");
    NetworkConfig& c = ckpt.config;
    c.layer_sizes = int_array(jc, "layer_sizes", path);
    c.activation = activation_from_name(string_field(jc, "activation", path));
    c.loss = loss_from_name(string_field(jc, "loss", path));
    c.optimizer = optimizer_from_name(string_field(jc, "optimizer", path));
    const auto& epochs = field(jc, "epochs", path);
    if (!epochs.is_number_integer()) corrupt(path, "'epochs' is not an integer");
    c.epochs = epochs.get<int>();
    c.learning_rate = number_field(jc, "learning_rate", path);
    const auto& seed = field(jc, "seed", path);
    if (!seed.is_number_integer()) corrupt(path, "'seed' is not an integer");
    c.seed = seed.get<uint64_t>();
    c.mode = mode_from_name(string_field(jc, "mode", path));
    c.split_fraction = number_field(jc, "split_fraction", path);
    try {
        c.validate();
    } catch (const UsageError& e) {
        corrupt(path, e.what());
    }

    const auto& js = field(j, "scaler", path);
    if (!js.is_object()) corrupt(path, "'scaler' is not an object");
    ckpt.scaler.in_mean = double_array(js, "in_mean", path);
    ckpt.scaler.in_scale = double_array(js, "in_scale", path);
    ckpt.scaler.out_mean = double_array(js, "out_mean", path);
    ckpt.scaler.out_scale = double_array(js, "out_scale", path);
    ckpt.scaler.in_degenerate = int_array(js, "in_degenerate", path);
    ckpt.scaler.out_degenerate = int_array(js, "out_degenerate", path);

    const auto& layers = field(j, "layers", path);
    if (!layers.is_array() || layers.empty()) corrupt(path, "'layers' is not a non-empty array");
    if (layers.size() + 1 != c.layer_sizes.size()) {
        corrupt(path, "layer count does not match layer_sizes");
    }
    for (size_t l = 0; l < layers.size(); ++l) {
        const auto& jl = layers[l];
        if (!jl.is_object()) corrupt(path, "layer entry is not an object");
        Layer layer;
        const auto& rows = field(jl, "rows", path);
        const auto& cols = field(jl, "cols", path);
        if (!rows.is_number_integer() || !cols.is_number_integer()) {
            corrupt(path, "layer shape is not integral");
        }
        const int r = rows.get<int>();
        const int cc = cols.get<int>();
        if (r <= 0 || cc <= 0) corrupt(path, "layer shape is not positive");
        if (r != c.layer_sizes[l + 1] || cc != c.layer_sizes[l]) {
            corrupt(path, "layer " + std::to_string(l) + " shape (" + std::to_string(r) + "x" +
                              std::to_string(cc) + ") does not match layer_sizes");
        }
        layer.weights = Matrix(static_cast<size_t>(r), static_cast<size_t>(cc));
        layer.weights.data = double_array(jl, "weights", path);
        if (layer.weights.data.size() != static_cast<size_t>(r) * static_cast<size_t>(cc)) {
            corrupt(path, "layer " + std::to_string(l) + " weight count mismatch");
        }
        layer.bias = double_array(jl, "bias", path);
        if (layer.bias.size() != static_cast<size_t>(r)) {
            corrupt(path, "layer " + std::to_string(l) + " bias count mismatch");
        }
        ckpt.params.layers.push_back(std::move(layer));
    }

    const size_t d_in = static_cast<size_t>(c.input_width());
    const size_t d_out = static_cast<size_t>(c.output_width());
    if (ckpt.scaler.in_mean.size() != d_in || ckpt.scaler.in_scale.size() != d_in ||
        ckpt.scaler.out_mean.size() != d_out || ckpt.scaler.out_scale.size() != d_out) {
        corrupt(path, "scaler widths do not match layer_sizes");
    }

    ckpt.threshold = number_field(j, "threshold", path);
    ckpt.loss_trace = double_array(j, "loss_trace", path);
    if (ckpt.loss_trace.size() != static_cast<size_t>(c.epochs)) {
        corrupt(path, "loss trace length does not match epochs");
    }

    ckpt.dataset_fingerprint = string_field(j, "dataset_fingerprint", path);
    if (ckpt.dataset_fingerprint.size() != 64) {
        corrupt(path, "dataset fingerprint is not a sha-256 hex digest");
    }
    for (char ch : ckpt.dataset_fingerprint) {
        const bool hex = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f');
        if (!hex) corrupt(path, "dataset fingerprint is not lowercase hex");
    }
    return ckpt;
}

} // namespace pressflow

#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "comprate/csv.hpp"
#include "comprate/network.hpp"

namespace comprate {

inline constexpr int kModelFormatVersion = 1;

/// Versioned model file: layer sizes, row-major weights, biases, scaler
/// bounds, head type and training provenance. Serialized numbers round-trip
/// bit-exactly, so a saved and reloaded model predicts identically.
inline nlohmann::json model_to_json(const Model& model) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["head"] = model.net.head == Head::regression ? "regression" : "classifier";
    j["layer_sizes"] = model.net.layer_sizes;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : model.net.layers) {
        layers.push_back({{"weights", l.weights}, {"biases", l.biases}});
    }
    j["layers"] = layers;
    j["feature_scaler"] = {{"min", model.feature_scaler.mins()},
                           {"max", model.feature_scaler.maxs()}};
    if (model.net.head == Head::regression) {
        j["target_scaler"] = {{"min", model.target_scaler.mins()},
                              {"max", model.target_scaler.maxs()}};
    }
    j["training"] = {{"seed", model.training.seed},
                     {"learning_rate", model.training.learning_rate},
                     {"epochs", model.training.epochs},
                     {"split_fraction", model.training.split_fraction}};
    j["features"] = {{"epsilon", model.epsilon},
                     {"window_s", model.window_s},
                     {"delta_mode", model.delta_mode == DeltaMode::ratio ? "ratio" : "difference"}};
    return j;
}

inline Model model_from_json(const nlohmann::json& j) {
    if (j.value("format_version", 0) != kModelFormatVersion) {
        throw DataError("model file: unsupported format_version");
    }
    Model model;
    const std::string head = j.at("head").get<std::string>();
    if (head == "regression") {
        model.net.head = Head::regression;
    } else if (head == "classifier") {
        model.net.head = Head::classifier;
    } else {
        throw DataError("model file: unknown head '" + head + "'");
    }
    model.net.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    if (model.net.layer_sizes.size() < 2) throw DataError("model file: bad layer_sizes");
    for (std::size_t l = 0; l + 1 < model.net.layer_sizes.size(); ++l) {
        Layer layer;
        layer.in = model.net.layer_sizes[l];
        layer.out = model.net.layer_sizes[l + 1];
        const auto& jl = j.at("layers").at(l);
        layer.weights = jl.at("weights").get<std::vector<double>>();
        layer.biases = jl.at("biases").get<std::vector<double>>();
        if (layer.weights.size() != layer.in * layer.out || layer.biases.size() != layer.out) {
            throw DataError("model file: layer shape mismatch");
        }
        model.net.layers.push_back(std::move(layer));
    }
    model.feature_scaler = Scaler(j.at("feature_scaler").at("min").get<std::vector<double>>(),
                                  j.at("feature_scaler").at("max").get<std::vector<double>>());
    if (model.net.head == Head::regression) {
        model.target_scaler = Scaler(j.at("target_scaler").at("min").get<std::vector<double>>(),
                                     j.at("target_scaler").at("max").get<std::vector<double>>());
    }
    const auto& t = j.at("training");
    model.training.seed = t.at("seed").get<std::uint64_t>();
    model.training.learning_rate = t.at("learning_rate").get<double>();
    model.training.epochs = t.at("epochs").get<int>();
    model.training.split_fraction = t.at("split_fraction").get<double>();
    const auto& f = j.at("features");
    model.epsilon = f.at("epsilon").get<double>();
    model.window_s = f.at("window_s").get<double>();
    const std::string mode = f.at("delta_mode").get<std::string>();
    model.delta_mode = mode == "ratio" ? DeltaMode::ratio : DeltaMode::difference;
    return model;
}

inline std::string model_to_string(const Model& model) { return model_to_json(model).dump(2) + "\n"; }

inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void save_model(const std::string& path, const Model& model) {
    csv::write_file(path, model_to_string(model));
}

}  // namespace comprate

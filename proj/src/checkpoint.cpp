// Copyright 2026 The FFormation Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ff/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "ff/errors.hpp"

namespace ff {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "fformation-checkpoint";
constexpr int kVersion = 1;

std::string activation_name(Activation act) {
  switch (act) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
  }
  return "identity";
}

Activation activation_from(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw InputError("checkpoint has unknown activation '" + name + "'");
}

json mlp_to_json(const Mlp& mlp) {
  json layers = json::array();
  for (const DenseLayer& layer : mlp) {
    layers.push_back(json{{"in", layer.in_dim},
                          {"out", layer.out_dim},
                          {"activation", activation_name(layer.activation)},
                          {"weights", layer.weights},
                          {"bias", layer.bias}});
  }
  return layers;
}

Mlp mlp_from_json(const json& layers) {
  Mlp mlp;
  for (const json& entry : layers) {
    DenseLayer layer;
    layer.in_dim = entry.at("in").get<std::size_t>();
    layer.out_dim = entry.at("out").get<std::size_t>();
    layer.activation = activation_from(entry.at("activation").get<std::string>());
    layer.weights = entry.at("weights").get<std::vector<double>>();
    layer.bias = entry.at("bias").get<std::vector<double>>();
    if (layer.weights.size() != layer.in_dim * layer.out_dim ||
        layer.bias.size() != layer.out_dim) {
      throw InputError("checkpoint layer arrays do not match declared dims " +
                       std::to_string(layer.out_dim) + "x" +
                       std::to_string(layer.in_dim));
    }
    mlp.push_back(std::move(layer));
  }
  return mlp;
}

}  // namespace

void save_checkpoint(const DanteParams& params, const std::string& path) {
  validate_params(params);
  const DanteHyper& h = params.hyper;
  json doc{
      {"format", kFormat},
      {"version", kVersion},
      {"mode",
       h.mode == FeatureMode::kOrientation ? "orientation" : "velocity"},
      {"hyper",
       {{"dyad_widths", h.dyad_widths},
        {"context_widths", h.context_widths},
        {"combiner_widths", h.combiner_widths},
        {"use_context", h.use_context}}},
      {"dyad_mlp", mlp_to_json(params.dyad_mlp)},
      {"context_mlp", mlp_to_json(params.context_mlp)},
      {"combiner_mlp", mlp_to_json(params.combiner_mlp)},
  };
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot open '" + path + "' for writing");
  }
  out << doc.dump(2) << '\n';
}

DanteParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path + "' for reading");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError("checkpoint '" + path + "' is not valid JSON: " +
                     e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw InputError("'" + path + "' is not a model checkpoint");
    }
    if (doc.at("version").get<int>() != kVersion) {
      throw InputError("unsupported checkpoint version in '" + path + "'");
    }
    DanteParams params;
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "orientation") {
      params.hyper.mode = FeatureMode::kOrientation;
    } else if (mode == "velocity") {
      params.hyper.mode = FeatureMode::kVelocity;
    } else {
      throw InputError("checkpoint has unknown feature mode '" + mode + "'");
    }
    const json& hyper = doc.at("hyper");
    params.hyper.dyad_widths =
        hyper.at("dyad_widths").get<std::vector<std::size_t>>();
    params.hyper.context_widths =
        hyper.at("context_widths").get<std::vector<std::size_t>>();
    params.hyper.combiner_widths =
        hyper.at("combiner_widths").get<std::vector<std::size_t>>();
    params.hyper.use_context = hyper.at("use_context").get<bool>();
    params.dyad_mlp = mlp_from_json(doc.at("dyad_mlp"));
    params.context_mlp = mlp_from_json(doc.at("context_mlp"));
    params.combiner_mlp = mlp_from_json(doc.at("combiner_mlp"));
    try {
      validate_params(params);
    } catch (const InternalError& e) {
      throw InputError("checkpoint '" + path + "' is inconsistent: " +
                       e.what());
    }
    return params;
  } catch (const json::exception& e) {
    throw InputError("checkpoint '" + path + "' is malformed: " + e.what());
  }
}

}  // namespace ff

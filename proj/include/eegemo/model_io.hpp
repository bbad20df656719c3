#pragma once

// Versioned JSON model files. Doubles survive the round trip bit-exactly
// (shortest-round-trip printing on write, strtod on read), so a reloaded
// model reproduces every prediction of the original.

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "eegemo/features.hpp"
#include "eegemo/svm.hpp"
#include "eegemo/types.hpp"

namespace eegemo {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json standardizer_to_json(const Standardizer& s) {
  nlohmann::json j;
  j["mean"] = s.mean;
  j["std_dev"] = s.std_dev;
  j["passthrough"] = s.passthrough;
  return j;
}

inline Standardizer standardizer_from_json(const nlohmann::json& j) {
  Standardizer s;
  j.at("mean").get_to(s.mean);
  j.at("std_dev").get_to(s.std_dev);
  j.at("passthrough").get_to(s.passthrough);
  return s;
}

inline nlohmann::json kernel_to_json(const KernelConfig& cfg) {
  nlohmann::json j;
  j["kind"] = kernel_name(cfg.kind);
  j["gamma"] = cfg.gamma;
  j["sigma"] = cfg.sigma;
  j["degree"] = cfg.degree;
  j["coef0"] = cfg.coef0;
  return j;
}

inline KernelConfig kernel_from_json(const nlohmann::json& j) {
  KernelConfig cfg;
  cfg.kind = parse_kernel(j.at("kind").get<std::string>());
  cfg.gamma = j.at("gamma").get<double>();
  cfg.sigma = j.at("sigma").get<double>();
  cfg.degree = j.at("degree").get<int>();
  cfg.coef0 = j.at("coef0").get<double>();
  return cfg;
}

inline nlohmann::json binary_model_to_json(const BinaryModel& m) {
  nlohmann::json j;
  j["label_a"] = emotion_name(m.label_a);
  j["label_b"] = emotion_name(m.label_b);
  j["kernel"] = kernel_to_json(m.kernel);
  j["support_vectors"] = m.support_vectors;
  j["coeffs"] = m.coeffs;
  j["sv_indices"] = m.sv_indices;
  j["bias"] = m.bias;
  j["converged"] = m.converged;
  j["max_kkt_violation"] = m.max_kkt_violation;
  return j;
}

inline BinaryModel binary_model_from_json(const nlohmann::json& j) {
  BinaryModel m;
  const auto label = [&](const char* key) {
    const auto name = j.at(key).get<std::string>();
    const auto e = parse_emotion(name);
    if (!e) throw std::runtime_error("model file: unknown label '" + name + "'");
    return *e;
  };
  m.label_a = label("label_a");
  m.label_b = label("label_b");
  m.kernel = kernel_from_json(j.at("kernel"));
  j.at("support_vectors").get_to(m.support_vectors);
  j.at("coeffs").get_to(m.coeffs);
  j.at("sv_indices").get_to(m.sv_indices);
  m.bias = j.at("bias").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.max_kkt_violation = j.at("max_kkt_violation").get<double>();
  if (m.coeffs.size() != m.support_vectors.size())
    throw std::runtime_error("model file: coeff/support-vector count mismatch");
  return m;
}

inline nlohmann::json model_to_json(const MulticlassModel& model) {
  nlohmann::json j;
  j["format"] = "eegemo-model";
  j["version"] = kModelFormatVersion;
  j["kernel"] = kernel_to_json(model.kernel);
  j["c"] = model.c;
  j["seed"] = model.seed;
  j["standardizer"] = standardizer_to_json(model.standardizer);
  j["pairs"] = nlohmann::json::array();
  for (const BinaryModel& bm : model.pairs)
    j["pairs"].push_back(binary_model_to_json(bm));
  return j;
}

inline MulticlassModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "eegemo-model")
    throw std::runtime_error("not a model file (missing format marker)");
  if (j.at("version").get<int>() != kModelFormatVersion)
    throw std::runtime_error("unsupported model file version " +
                             j.at("version").dump());
  MulticlassModel model;
  model.kernel = kernel_from_json(j.at("kernel"));
  model.c = j.at("c").get<double>();
  model.seed = j.at("seed").get<uint64_t>();
  model.standardizer = standardizer_from_json(j.at("standardizer"));
  for (const auto& pj : j.at("pairs"))
    model.pairs.push_back(binary_model_from_json(pj));
  if (model.pairs.size() != 6)
    throw std::runtime_error("model file: expected 6 pairwise models, got " +
                             std::to_string(model.pairs.size()));
  return model;
}

inline void save_model(const MulticlassModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(model).dump(2) << '\n';
}

inline MulticlassModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace eegemo

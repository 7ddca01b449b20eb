// Copyright 2026 The diacal Authors.
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

#include "diacal/serialization.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "diacal/error.hpp"
#include "diacal/io.hpp"
#include "diacal/spaces.hpp"

namespace diacal {
namespace {

using Json = nlohmann::ordered_json;

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

/// Field access that remembers which keys were read so leftovers can be
/// reported.
class Object {
 public:
  Object(const Json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + " must be a JSON object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json& at(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(context_ + " lacks field '" + key + "'");
    return *it;
  }

  template <typename T>
  T get(const char* key) {
    const Json& v = at(key);
    try {
      return v.get<T>();
    } catch (const Json::exception&) {
      throw ConfigError(context_ + " field '" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T get_or(const char* key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(context_ + " has unknown field '" + key + "'");
    }
  }

 private:
  const Json& j_;
  std::string context_;
  std::set<std::string> used_;
};

Json row_major(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  }
  return a;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(what + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Matrix matrix_from(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  const auto v = numbers(j, what);
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) {
    throw ConfigError(what + " must hold " + std::to_string(rows * cols) + " values");
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

Vector vector_from(const Json& j, Eigen::Index size, const std::string& what) {
  return matrix_from(j, size, 1, what).col(0);
}

template <typename F>
auto wrap_parse(const std::string& what, F&& f) {
  try {
    return f(what);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

Json calibration_json(const CalibrationModel& m) {
  m.validate();
  Json j;
  j["strategy"] = to_string(m.strategy);
  j["space"] = to_string(m.space);
  j["S"] = m.num_speakers;
  j["K"] = m.dims();
  j["feature"] = to_string(m.feature);
  j["scale"] = row_major(m.scale);
  j["bias"] = vector_json(m.bias);
  j["epsilon"] = m.epsilon;
  j["trained_on"] = m.trained_on;
  return j;
}

CalibrationModel calibration_from(const Json& j) {
  return wrap_parse("calibration model", [&](const std::string& what) {
    Object o(j, what);
    CalibrationModel m;
    m.strategy = parse_calibration_strategy(o.get<std::string>("strategy"));
    m.space = parse_space(o.get<std::string>("space"));
    m.num_speakers = o.get<int>("S");
    const int k = o.get<int>("K");
    if (m.num_speakers < 1 || m.num_speakers > kMaxPowersetSpeakers ||
        k != space_dimension(m.space, m.num_speakers)) {
      throw ConfigError(what + ": S and K do not agree with the space");
    }
    m.feature = parse_calibration_feature(o.get_or<std::string>("feature", "log"));
    const Eigen::Index cols = m.strategy == CalibrationStrategy::kIndependentMult ? 1 : k;
    m.scale = matrix_from(o.at("scale"), k, cols, what + " scale");
    m.bias = vector_from(o.at("bias"), k, what + " bias");
    m.epsilon = o.get<double>("epsilon");
    m.trained_on = o.get_or<std::string>("trained_on", "");
    o.finish();
    m.validate();
    return m;
  });
}

Json metalearner_json(const MetaLearnerModel& m) {
  m.validate();
  Json j;
  j["space"] = to_string(m.space);
  j["S"] = m.num_speakers;
  j["K"] = m.dims();
  j["m_systems"] = m.m_systems;
  j["system_ids"] = m.system_ids;
  j["weights"] = row_major(m.weights);
  j["bias"] = vector_json(m.bias);
  j["epsilon"] = m.epsilon;
  j["trained_on"] = m.trained_on;
  return j;
}

MetaLearnerModel metalearner_from(const Json& j) {
  return wrap_parse("metalearner model", [&](const std::string& what) {
    Object o(j, what);
    MetaLearnerModel m;
    m.space = parse_space(o.get<std::string>("space"));
    m.num_speakers = o.get<int>("S");
    const int k = o.get<int>("K");
    if (m.num_speakers < 1 || m.num_speakers > kMaxPowersetSpeakers ||
        k != space_dimension(m.space, m.num_speakers)) {
      throw ConfigError(what + ": S and K do not agree with the space");
    }
    m.m_systems = o.get<int>("m_systems");
    if (m.m_systems < 1) throw ConfigError(what + ": m_systems must be positive");
    m.system_ids = o.get<std::vector<std::string>>("system_ids");
    m.weights = matrix_from(o.at("weights"), k, static_cast<Eigen::Index>(k) * m.m_systems,
                            what + " weights");
    m.bias = vector_from(o.at("bias"), k, what + " bias");
    m.epsilon = o.get<double>("epsilon");
    m.trained_on = o.get_or<std::string>("trained_on", "");
    o.finish();
    m.validate();
    return m;
  });
}

Json config_json(const PipelineConfig& c) {
  Json j;
  j["name"] = c.name;
  j["order"] = to_string(c.order);
  j["calibrate"] = c.calibrate;
  j["calibration_space"] = to_string(c.calibration_space);
  j["calibration_strategy"] = to_string(c.calibration_strategy);
  j["feature"] = to_string(c.feature);
  j["fusion_space"] = to_string(c.fusion_space);
  j["fusion_method"] = to_string(c.fusion_method);
  j["systems"] = c.systems;
  j["post"] = {{"upsample_factor", c.post.upsample_factor},
               {"median_window", c.post.median_window},
               {"threshold", c.post.threshold}};
  j["hard_powerset_decisions"] = c.hard_powerset_decisions;
  j["l2_c"] = c.l2_c;
  j["max_iter"] = c.max_iter;
  j["epsilon"] = c.epsilon;
  return j;
}

PipelineConfig config_from(const Json& j, const PipelineConfig& defaults) {
  return wrap_parse("pipeline config", [&](const std::string& what) {
    Object o(j, what);
    PipelineConfig c = defaults;
    c.name = o.get_or<std::string>("name", c.name);
    if (o.has("order")) c.order = parse_pipeline_order(o.get<std::string>("order"));
    c.calibrate = o.get_or<bool>("calibrate", c.calibrate);
    if (o.has("calibration_space")) c.calibration_space = parse_space(o.get<std::string>("calibration_space"));
    if (o.has("calibration_strategy")) {
      c.calibration_strategy = parse_strategy_kind(o.get<std::string>("calibration_strategy"));
    }
    if (o.has("feature")) c.feature = parse_calibration_feature(o.get<std::string>("feature"));
    if (o.has("fusion_space")) c.fusion_space = parse_space(o.get<std::string>("fusion_space"));
    if (o.has("fusion_method")) c.fusion_method = parse_fusion_method(o.get<std::string>("fusion_method"));
    c.systems = o.get_or<std::vector<std::string>>("systems", c.systems);
    if (o.has("post")) {
      Object p(o.at("post"), what + " post");
      c.post.upsample_factor = p.get_or<int>("upsample_factor", c.post.upsample_factor);
      c.post.median_window = p.get_or<int>("median_window", c.post.median_window);
      c.post.threshold = p.get_or<double>("threshold", c.post.threshold);
      p.finish();
    }
    c.hard_powerset_decisions = o.get_or<bool>("hard_powerset_decisions", c.hard_powerset_decisions);
    c.l2_c = o.get_or<double>("l2_c", c.l2_c);
    c.max_iter = o.get_or<int>("max_iter", c.max_iter);
    c.epsilon = o.get_or<double>("epsilon", c.epsilon);
    o.finish();
    c.validate();
    return c;
  });
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string relative_to(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (base.empty()) return p.generic_string();
  const auto rel = p.lexically_relative(base);
  if (rel.empty() || *rel.begin() == "..") return p.generic_string();
  return rel.generic_string();
}

}  // namespace

std::string serialize(const CalibrationModel& model) { return dump(calibration_json(model)); }

CalibrationModel parse_calibration_model(std::string_view json) {
  return calibration_from(parse_document(json));
}

std::string serialize(const MetaLearnerModel& model) { return dump(metalearner_json(model)); }

MetaLearnerModel parse_metalearner_model(std::string_view json) {
  return metalearner_from(parse_document(json));
}

std::string serialize(const PipelineConfig& config) { return dump(config_json(config)); }

PipelineConfig parse_pipeline_config(std::string_view json) {
  return config_from(parse_document(json), PipelineConfig{});
}

std::string serialize(const TrainedPipeline& tp) {
  tp.validate();
  Json j;
  j["config"] = config_json(tp.config);
  j["system_ids"] = tp.system_ids;
  j["S"] = tp.num_speakers;
  Json models = Json::array();
  for (const auto& m : tp.calibration_models) models.push_back(calibration_json(m));
  j["calibration_models"] = models;
  j["metalearner"] = tp.metalearner ? metalearner_json(*tp.metalearner) : Json(nullptr);
  Json align = Json::array();
  for (const auto& a : tp.training_alignments) {
    align.push_back({{"recording", a.recording_id}, {"permutations", a.permutations}});
  }
  j["training_alignments"] = align;
  return dump(j);
}

TrainedPipeline parse_trained_pipeline(std::string_view json) {
  const Json doc = parse_document(json);
  return wrap_parse("trained pipeline", [&](const std::string& what) {
    Object o(doc, what);
    TrainedPipeline tp;
    tp.config = config_from(o.at("config"), PipelineConfig{});
    tp.system_ids = o.get<std::vector<std::string>>("system_ids");
    tp.num_speakers = o.get<int>("S");
    const Json& models = o.at("calibration_models");
    if (!models.is_array()) throw ConfigError(what + ": calibration_models must be an array");
    for (const auto& m : models) tp.calibration_models.push_back(calibration_from(m));
    const Json& meta = o.at("metalearner");
    if (!meta.is_null()) tp.metalearner = metalearner_from(meta);
    if (o.has("training_alignments")) {
      for (const auto& a : o.at("training_alignments")) {
        Object ao(a, what + " alignment");
        tp.training_alignments.push_back(
            {ao.get<std::string>("recording"), ao.get<std::vector<Permutation>>("permutations")});
        ao.finish();
      }
    }
    o.finish();
    tp.validate();
    return tp;
  });
}

ExperimentConfig parse_experiment_config(std::string_view json, const std::filesystem::path& base_dir) {
  const Json doc = parse_document(json);
  return wrap_parse("experiment config", [&](const std::string& what) {
    Object o(doc, what);
    ExperimentConfig cfg;
    const Json& systems = o.at("systems");
    if (!systems.is_object() || systems.empty()) {
      throw ConfigError(what + ": 'systems' must be a non-empty object");
    }
    for (const auto& [sys_id, recs] : systems.items()) {
      if (!recs.is_object()) throw ConfigError(what + ": scores of '" + sys_id + "' must be an object");
      ExperimentConfig::SystemFiles files;
      files.system_id = sys_id;
      for (const auto& [rec_id, path] : recs.items()) {
        if (!path.is_string()) throw ConfigError(what + ": score paths must be strings");
        files.recordings.emplace_back(rec_id, resolve(base_dir, path.get<std::string>()));
      }
      cfg.systems.push_back(std::move(files));
    }
    cfg.reference = resolve(base_dir, o.get<std::string>("reference"));
    if (o.has("train")) cfg.train = o.get<std::vector<std::string>>("train");
    if (o.has("test")) cfg.test = o.get<std::vector<std::string>>("test");
    if (o.has("configs")) {
      const Json& configs = o.at("configs");
      if (!configs.is_array()) throw ConfigError(what + ": 'configs' must be an array");
      for (const auto& c : configs) cfg.configs.push_back(config_from(c, PipelineConfig{}));
    }
    o.finish();
    return cfg;
  });
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path), path.parent_path());
}

std::string serialize(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  Json j;
  Json systems = Json::object();
  for (const auto& s : config.systems) {
    Json recs = Json::object();
    for (const auto& [rec_id, path] : s.recordings) recs[rec_id] = relative_to(base_dir, path);
    systems[s.system_id] = recs;
  }
  j["systems"] = systems;
  j["reference"] = relative_to(base_dir, config.reference);
  if (config.train) j["train"] = *config.train;
  if (config.test) j["test"] = *config.test;
  Json configs = Json::array();
  for (const auto& c : config.configs) configs.push_back(config_json(c));
  j["configs"] = configs;
  return dump(j);
}

}  // namespace diacal

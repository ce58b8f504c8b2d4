// Copyright (c) 2026 The ttsspk Authors
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

#include "ttsspk/cli/run_config.h"

#include <functional>
#include <map>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::cli {
namespace {

using Json = nlohmann::json;
using Setter = std::function<void(const Json&)>;

// Applies `setters` to the members of `j`, rejecting unknown keys.
void ApplyStrict(const Json& j, const std::string& section,
                 const std::map<std::string, Setter>& setters) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const std::string where = section.empty() ? key : section + "." + key;
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + where + "'");
    try {
      it->second(value);
    } catch (const Json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

template <typename T>
T Unsigned(const Json& v) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError("expected a non-negative integer");
  return v.get<T>();
}

std::string TokenizationString(text::TokenizationMode m) {
  return m == text::TokenizationMode::kChar ? "char" : "word";
}

}  // namespace

void RunConfig::Validate() const {
  features.Validate();
  model.Validate();
  backend.Validate();
  if (text.frame_sr < 1 || text.target_sr < 1 || text.frame_sr % text.target_sr != 0) {
    throw ConfigError("text.frame_sr must be a positive multiple of text.target_sr");
  }
  if (train.epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (train.batch < 1) throw ConfigError("train.batch must be >= 1");
  if (!(train.lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (train.max_steps < 0) throw ConfigError("train.max_steps must be >= 0");
  if (!(train.clip_norm > 0.0)) throw ConfigError("train.clip_norm must be positive");
  if (model.mel_dim != features.n_mels) {
    throw ConfigError("model.mel_dim (" + std::to_string(model.mel_dim) +
                      ") must equal features.n_mels (" + std::to_string(features.n_mels) + ")");
  }
}

Json FeatureConfigToJson(const feat::FeatureConfig& c) {
  return {{"sample_rate", c.sample_rate}, {"frame_length_ms", c.frame_length_ms},
          {"hop_ms", c.hop_ms},           {"n_fft", c.n_fft},
          {"n_mels", c.n_mels},           {"f_min", c.f_min},
          {"f_max", c.f_max},             {"log_floor", c.log_floor}};
}

feat::FeatureConfig FeatureConfigFromJson(const Json& j) {
  feat::FeatureConfig c;
  ApplyStrict(j, "features",
              {{"sample_rate", [&](const Json& v) { c.sample_rate = v.get<int>(); }},
               {"frame_length_ms", [&](const Json& v) { c.frame_length_ms = v.get<double>(); }},
               {"hop_ms", [&](const Json& v) { c.hop_ms = v.get<double>(); }},
               {"n_fft", [&](const Json& v) { c.n_fft = Unsigned<std::size_t>(v); }},
               {"n_mels", [&](const Json& v) { c.n_mels = Unsigned<std::size_t>(v); }},
               {"f_min", [&](const Json& v) { c.f_min = v.get<double>(); }},
               {"f_max", [&](const Json& v) { c.f_max = v.get<double>(); }},
               {"log_floor", [&](const Json& v) { c.log_floor = v.get<double>(); }}});
  c.Validate();
  return c;
}

Json RunConfigToJson(const RunConfig& c) {
  Json j;
  j["features"] = FeatureConfigToJson(c.features);
  j["text"] = {{"mode", text::TokenKindString(c.text.mode)},
               {"tokenization", TokenizationString(c.text.tokenization)},
               {"frame_sr", c.text.frame_sr},
               {"target_sr", c.text.target_sr},
               {"align_tolerance", c.text.align_tolerance}};
  j["model"] = model::ModelConfigToJson(c.model);
  j["train"] = {{"epochs", c.train.epochs}, {"batch", c.train.batch},
                {"lr", c.train.lr},         {"seed", c.train.seed},
                {"max_steps", c.train.max_steps}, {"clip_norm", c.train.clip_norm}};
  j["backend"] = backend::BackendConfigToJson(c.backend);
  j["paths"] = {{"manifest", c.paths.manifest}, {"prepared", c.paths.prepared}};
  return j;
}

RunConfig RunConfigFromJson(const Json& j) {
  RunConfig c;
  // Model fields are parsed last so a partial model section still gets
  // mel_dim from the feature section.
  bool model_has_mel_dim = false;
  Json model_json = Json::object();
  ApplyStrict(
      j, "",
      {{"features", [&](const Json& v) { c.features = FeatureConfigFromJson(v); }},
       {"text",
        [&](const Json& v) {
          ApplyStrict(v, "text",
                      {{"mode", [&](const Json& x) { c.text.mode = text::ParseTokenKind(x.get<std::string>()); }},
                       {"tokenization",
                        [&](const Json& x) {
                          c.text.tokenization = text::ParseTokenizationMode(x.get<std::string>());
                        }},
                       {"frame_sr", [&](const Json& x) { c.text.frame_sr = x.get<int>(); }},
                       {"target_sr", [&](const Json& x) { c.text.target_sr = x.get<int>(); }},
                       {"align_tolerance",
                        [&](const Json& x) { c.text.align_tolerance = Unsigned<std::size_t>(x); }}});
        }},
       {"model",
        [&](const Json& v) {
          model_json = v;
          model_has_mel_dim = v.is_object() && v.contains("mel_dim");
        }},
       {"train",
        [&](const Json& v) {
          ApplyStrict(v, "train",
                      {{"epochs", [&](const Json& x) { c.train.epochs = x.get<int>(); }},
                       {"batch", [&](const Json& x) { c.train.batch = Unsigned<std::size_t>(x); }},
                       {"lr", [&](const Json& x) { c.train.lr = x.get<double>(); }},
                       {"seed", [&](const Json& x) { c.train.seed = Unsigned<std::uint64_t>(x); }},
                       {"max_steps", [&](const Json& x) { c.train.max_steps = x.get<std::int64_t>(); }},
                       {"clip_norm", [&](const Json& x) { c.train.clip_norm = x.get<double>(); }}});
        }},
       {"backend", [&](const Json& v) { c.backend = backend::BackendConfigFromJson(v); }},
       {"paths", [&](const Json& v) {
          ApplyStrict(v, "paths",
                      {{"manifest", [&](const Json& x) { c.paths.manifest = x.get<std::string>(); }},
                       {"prepared", [&](const Json& x) { c.paths.prepared = x.get<std::string>(); }}});
        }}});
  if (!model_has_mel_dim) {
    if (!model_json.is_object()) throw ConfigError("config section 'model' must be an object");
    model_json["mel_dim"] = c.features.n_mels;
  }
  try {
    c.model = model::ModelConfigFromJson(model_json);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(io::ReadTextFile(path));
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return RunConfigFromJson(j);
}

RunConfig WithSetting(const RunConfig& c, const std::string& param, const std::string& value) {
  const auto dot = param.find('.');
  const std::string section = dot == std::string::npos ? "model" : param.substr(0, dot);
  const std::string key = dot == std::string::npos ? param : param.substr(dot + 1);
  Json j = RunConfigToJson(c);
  if (!j.contains(section) || !j[section].contains(key)) {
    throw ConfigError("unknown setting '" + section + "." + key + "'");
  }
  Json& slot = j[section][key];
  try {
    if (slot.is_string()) {
      slot = value;
    } else if (slot.is_number_integer() || slot.is_number_unsigned()) {
      std::size_t used = 0;
      const long long v = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      if (v >= 0) {
        slot = static_cast<unsigned long long>(v);
      } else {
        slot = v;
      }
    } else if (slot.is_number_float()) {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      slot = v;
    } else if (slot.is_boolean()) {
      if (value != "true" && value != "false") throw std::invalid_argument(value);
      slot = value == "true";
    } else {
      throw ConfigError("setting '" + param + "' cannot be overridden from the command line");
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad value '" + value + "' for " + section + "." + key);
  }
  return RunConfigFromJson(j);
}

}  // namespace ttsspk::cli

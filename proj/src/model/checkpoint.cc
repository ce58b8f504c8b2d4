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

#include "ttsspk/model/checkpoint.h"

#include <fstream>
#include <map>
#include <sstream>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::model {
namespace {

void WriteSection(std::ostream& os, const std::string& name, const num::Shape& shape,
                  std::span<const double> data) {
  io::WriteU32(os, static_cast<std::uint32_t>(name.size()));
  io::WriteBytes(os, name);
  io::WriteU32(os, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t d : shape) io::WriteU64(os, d);
  io::WriteF64s(os, data);
}

struct Section {
  num::Shape shape;
  std::vector<double> data;
};

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const TtsModel& model,
                    const nlohmann::json& metadata, const num::AdamState* adam) {
  nlohmann::json header = metadata.is_object() ? metadata : nlohmann::json::object();
  header["config"] = ModelConfigToJson(model.config());
  const auto params = model.params().All();
  const auto trainable = model.params().Trainable();
  if (adam) {
    if (adam->first_moment.size() != trainable.size()) {
      throw UsageError("optimizer state does not match the model's parameters");
    }
    header["adam"] = {{"step_count", adam->step_count},
                      {"learning_rate", adam->hyper.learning_rate},
                      {"beta1", adam->hyper.beta1},
                      {"beta2", adam->hyper.beta2},
                      {"epsilon", adam->hyper.epsilon}};
  }
  std::ostringstream os;
  io::WriteBytes(os, "TTSE");
  io::WriteU32(os, kCheckpointVersion);
  const std::string text = header.dump();
  io::WriteU64(os, text.size());
  io::WriteBytes(os, text);
  io::WriteU64(os, params.size() + (adam ? 2 * trainable.size() : 0));
  for (const auto& p : params) WriteSection(os, p.name, p.value.shape(), p.value.data());
  if (adam) {
    for (std::size_t i = 0; i < trainable.size(); ++i) {
      WriteSection(os, "adam/m/" + trainable[i].name, trainable[i].value.shape(),
                   adam->first_moment[i]);
      WriteSection(os, "adam/v/" + trainable[i].name, trainable[i].value.shape(),
                   adam->second_moment[i]);
    }
  }
  io::WriteFileAtomic(path, os.str());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  const std::string where = "checkpoint " + path.string();
  if (io::ReadBytes(in, 4) != "TTSE") throw InputError(where + ": bad magic");
  const std::uint32_t version = io::ReadU32(in);
  if (version != kCheckpointVersion) {
    throw InputError(where + ": unsupported version " + std::to_string(version));
  }
  const std::uint64_t header_len = io::ReadU64(in);
  if (header_len > (1u << 26)) throw InputError(where + ": implausible header length");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(io::ReadBytes(in, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": bad header: " + e.what());
  }
  if (!header.contains("config")) throw InputError(where + ": header lacks config");
  const ModelConfig config = ModelConfigFromJson(header.at("config"));
  const std::uint64_t count = io::ReadU64(in);
  std::map<std::string, Section> sections;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = io::ReadU32(in);
    if (name_len > 4096) throw InputError(where + ": implausible section name length");
    const std::string name = io::ReadBytes(in, name_len);
    const std::uint32_t rank = io::ReadU32(in);
    if (rank > 8) throw InputError(where + ": implausible rank in section " + name);
    Section s;
    std::size_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      s.shape.push_back(io::ReadU64(in));
      n *= s.shape.back();
    }
    if (n > (std::size_t{1} << 28)) throw InputError(where + ": section " + name + " too large");
    s.data.resize(n);
    io::ReadF64s(in, s.data);
    sections[name] = std::move(s);
  }

  Checkpoint ck;
  ck.model = std::make_unique<TtsModel>(config, 0);
  for (auto& p : ck.model->params().All()) {
    auto it = sections.find(p.name);
    if (it == sections.end()) throw InputError(where + ": missing parameter " + p.name);
    if (it->second.shape != p.value.shape()) {
      throw InputError(where + ": parameter " + p.name + " has shape " +
                       num::ShapeString(it->second.shape) + ", expected " +
                       num::ShapeString(p.value.shape()));
    }
    auto dst = ck.model->params().Get(p.name).mutable_data();
    std::copy(it->second.data.begin(), it->second.data.end(), dst.begin());
  }
  if (header.contains("adam")) {
    const auto trainable = ck.model->params().Trainable();
    num::AdamHyper hyper;
    const auto& a = header.at("adam");
    hyper.learning_rate = a.at("learning_rate").get<double>();
    hyper.beta1 = a.at("beta1").get<double>();
    hyper.beta2 = a.at("beta2").get<double>();
    hyper.epsilon = a.at("epsilon").get<double>();
    num::AdamState st = num::AdamState::For(trainable, hyper);
    st.step_count = a.at("step_count").get<std::int64_t>();
    for (std::size_t i = 0; i < trainable.size(); ++i) {
      for (int which = 0; which < 2; ++which) {
        const std::string name = (which == 0 ? "adam/m/" : "adam/v/") + trainable[i].name;
        auto it = sections.find(name);
        if (it == sections.end() || it->second.data.size() != trainable[i].value.size()) {
          throw InputError(where + ": missing or malformed optimizer section " + name);
        }
        (which == 0 ? st.first_moment[i] : st.second_moment[i]) = it->second.data;
      }
    }
    ck.adam = std::move(st);
  }
  header.erase("config");
  header.erase("adam");
  ck.metadata = std::move(header);
  return ck;
}

std::string CheckpointId(const std::filesystem::path& path) {
  return io::HexU64(io::Fnv1a64(io::ReadTextFile(path)));
}

}  // namespace ttsspk::model

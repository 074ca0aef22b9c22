// Copyright 2026 The nerdistill Authors.
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

#include "nerdistill/tagger/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nerdistill/error.h"
#include "nerdistill/hash.h"

namespace nerdistill::tagger {
namespace {

constexpr char kMagic[8] = {'N', 'E', 'R', 'D', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string bytes() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw FormatError("checkpoint is truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const TaggerModel& model,
                      const nlohmann::ordered_json& provenance) {
  Writer w;
  w.raw(std::string_view(kMagic, sizeof(kMagic)));
  w.u32(kCheckpointVersion);
  nlohmann::ordered_json header;
  header["config"] = model.config();
  header["provenance"] = provenance;
  w.bytes(header.dump());
  const auto& tokens = model.vocab().tokens();
  w.u32(static_cast<std::uint32_t>(tokens.size()));
  for (const std::string& t : tokens) w.bytes(t);
  const auto& tensors = model.layout().tensors();
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const TensorInfo& t : tensors) {
    w.bytes(t.name);
    w.u32(static_cast<std::uint32_t>(t.rows));
    w.u32(static_cast<std::uint32_t>(t.cols));
    for (float v : model.tensor(t)) w.f32(v);
  }
  w.u64(fnv1a64(w.str()));
  return std::move(w.str());
}

Checkpoint deserialize(const std::string& bytes) {
  Reader r(bytes);
  if (r.raw(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                      " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < 8 + 8) throw FormatError("checkpoint is truncated");
  const std::string_view body(bytes.data(), bytes.size() - 8);
  Reader tail(std::string_view(bytes).substr(bytes.size() - 8));
  if (tail.u64() != fnv1a64(body)) {
    throw FormatError("checkpoint checksum mismatch");
  }

  nlohmann::ordered_json header;
  TaggerConfig config;
  try {
    header = nlohmann::ordered_json::parse(r.bytes());
    config = header.at("config").get<TaggerConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }
  std::vector<std::string> tokens(r.u32());
  for (std::string& t : tokens) t = r.bytes();
  auto make_model = [&] {
    try {
      return TaggerModel(config, corpus::Vocabulary::from_tokens(std::move(tokens)));
    } catch (const ConfigError& e) {
      throw FormatError(std::string("bad checkpoint model: ") + e.what());
    } catch (const ValidationError& e) {
      throw FormatError(std::string("bad checkpoint vocabulary: ") + e.what());
    }
  };
  Checkpoint ck{make_model(), header.value("provenance", nlohmann::ordered_json::object())};
  const auto& tensors = ck.model.layout().tensors();
  if (r.u32() != tensors.size()) throw FormatError("tensor count mismatch");
  for (const TensorInfo& t : tensors) {
    const std::string name = r.bytes();
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (name != t.name || rows != static_cast<std::uint32_t>(t.rows) ||
        cols != static_cast<std::uint32_t>(t.cols)) {
      throw FormatError("tensor '" + name + "' does not match layout entry '" +
                        t.name + "'");
    }
    for (float& v : ck.model.tensor(t)) v = r.f32();
  }
  if (r.pos() != body.size()) throw FormatError("trailing bytes in checkpoint");
  return ck;
}

void save(const TaggerModel& model, const std::filesystem::path& path,
          const nlohmann::ordered_json& provenance) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = serialize(model, provenance);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

TaggerModel load(const std::filesystem::path& path) {
  return std::move(load_checkpoint(path).model);
}

std::string model_id(const TaggerModel& model) {
  return hex64(fnv1a64(serialize(model)));
}

}  // namespace nerdistill::tagger

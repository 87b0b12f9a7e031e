// src/model/checkpoint.cc

// Copyright 2026  The dysarthria-mtl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dmtl/common/error.h"
#include "dmtl/model/mtl_model.h"

namespace dmtl {
namespace {

constexpr char kMagic[8] = {'D', 'M', 'T', 'L', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void F64(double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    U64(v);
  }
  void Str(const std::string &s) {
    U64(s.size());
    buf_.append(s);
  }
  void Raw(const char *p, std::size_t n) { buf_.append(p, n); }
  void Tensors(const ParameterSet &set) {
    U64(set.size());
    for (const auto &t : set.tensors()) {
      Str(t.name);
      U64(static_cast<std::uint64_t>(t.value.rows()));
      U64(static_cast<std::uint64_t>(t.value.cols()));
      for (Eigen::Index r = 0; r < t.value.rows(); ++r)
        for (Eigen::Index c = 0; c < t.value.cols(); ++c) F64(t.value(r, c));
    }
  }
  const std::string &data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double F64() {
    std::uint64_t v = U64();
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  }
  std::string Str() {
    std::uint64_t n = U64();
    Need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void Expect(const char *p, std::size_t n) {
    Need(n);
    if (std::memcmp(data_.data() + pos_, p, n) != 0) throw IoError(path_ + ": not a checkpoint");
    pos_ += n;
  }
  ParameterSet Tensors() {
    ParameterSet set;
    std::uint64_t count = U64();
    for (std::uint64_t i = 0; i < count; ++i) {
      std::string name = Str();
      std::uint64_t rows = U64(), cols = U64();
      if (rows * cols * 8 > data_.size()) throw IoError(path_ + ": tensor too large");
      Eigen::MatrixXd m(rows, cols);
      for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t c = 0; c < cols; ++c) m(r, c) = F64();
      set.Add(name, std::move(m));
    }
    return set;
  }
  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  void Need(std::uint64_t n) {
    if (n > data_.size() - pos_) throw IoError(path_ + ": truncated checkpoint");
  }
  std::string data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void SaveCheckpoint(const std::string &path, const ModelCheckpoint &ckpt) {
  nlohmann::json meta = {{"model", ToJson(ckpt.config)},
                         {"alpha", ckpt.alpha},
                         {"warmup_epochs", ckpt.warmup_epochs},
                         {"epoch", ckpt.epoch},
                         {"extra", ckpt.extra}};
  Writer w;
  w.Raw(kMagic, sizeof kMagic);
  w.U32(kCheckpointVersion);
  w.Str(meta.dump());
  w.Tensors(ckpt.params);
  w.U64(ckpt.extra_tensors.size());
  for (const auto &[group, set] : ckpt.extra_tensors) {
    w.Str(group);
    w.Tensors(set);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  if (!out) throw IoError("failed writing " + path);
}

ModelCheckpoint LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(data), path);
  r.Expect(kMagic, sizeof kMagic);
  std::uint32_t version = r.U32();
  if (version != kCheckpointVersion)
    throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));
  ModelCheckpoint ckpt;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(r.Str());
    ckpt.config = ModelConfigFromJson(meta.at("model"));
    ckpt.alpha = meta.at("alpha").get<double>();
    ckpt.warmup_epochs = meta.at("warmup_epochs").get<int>();
    ckpt.epoch = meta.at("epoch").get<int>();
    ckpt.extra = meta.at("extra");
  } catch (const nlohmann::json::exception &e) {
    throw IoError(path + ": bad checkpoint metadata: " + e.what());
  }
  ckpt.params = r.Tensors();
  std::uint64_t groups = r.U64();
  for (std::uint64_t i = 0; i < groups; ++i) {
    std::string name = r.Str();
    ckpt.extra_tensors.emplace_back(name, r.Tensors());
  }
  if (!r.AtEnd()) throw IoError(path + ": trailing bytes in checkpoint");
  return ckpt;
}

}  // namespace dmtl

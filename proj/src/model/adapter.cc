// src/model/adapter.cc

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

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "dmtl/common/error.h"
#include "dmtl/model/encoder.h"

namespace dmtl {
namespace {

void PutI64(std::ofstream &out, std::int64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char *>(b), 8);
}

std::int64_t GetI64(std::ifstream &in, const std::string &path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char *>(b), 8)) throw IoError(path + ": truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<std::int64_t>(v);
}

void PutF32(std::ofstream &out, double v) {
  float f = static_cast<float>(v);
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char *>(b), 4);
}

double GetF32(std::ifstream &in, const std::string &path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char *>(b), 4)) throw IoError(path + ": truncated payload");
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

std::string ShellQuote(const std::string &s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "'\\''";
    else out += ch;
  }
  return out + "'";
}

}  // namespace

void WriteLatentFile(const std::string &path, const Eigen::MatrixXd &h) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  PutI64(out, h.rows());
  PutI64(out, h.cols());
  for (Eigen::Index t = 0; t < h.rows(); ++t)
    for (Eigen::Index f = 0; f < h.cols(); ++f) PutF32(out, h(t, f));
}

Eigen::MatrixXd ReadLatentFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::int64_t T = GetI64(in, path), F = GetI64(in, path);
  if (T < 1 || F < 1 || T > (1 << 24) || F > (1 << 20))
    throw IoError(path + ": implausible latent shape " + std::to_string(T) + "x" +
                  std::to_string(F));
  Eigen::MatrixXd h(T, F);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index f = 0; f < F; ++f) {
      h(t, f) = GetF32(in, path);
      if (!std::isfinite(h(t, f))) throw IoError(path + ": non-finite latent value");
    }
  return h;
}

void WriteAudioExchangeFile(const std::string &path, const RawAudio &audio) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  PutI64(out, static_cast<std::int64_t>(audio.samples.size()));
  PutI64(out, audio.sample_rate);
  for (double s : audio.samples) PutF32(out, s);
}

RawAudio ReadAudioExchangeFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::int64_t n = GetI64(in, path), rate = GetI64(in, path);
  if (n < 0 || rate <= 0) throw IoError(path + ": bad audio header");
  RawAudio a;
  a.sample_rate = static_cast<int>(rate);
  a.samples.resize(static_cast<std::size_t>(n));
  for (auto &s : a.samples) s = GetF32(in, path);
  return a;
}

LatentSequence EncodeWithAdapter(const EncoderConfig &config, const RawAudio &audio) {
  config.Validate();
  if (config.kind != EncoderKind::kExternalAdapter)
    throw Error("encoder is not an external adapter");
  audio.Validate();
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("dmtl-adapter-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  static int counter = 0;
  std::string stem = std::to_string(counter++);
  std::string in_path = (dir / (stem + ".audio")).string();
  std::string out_path = (dir / (stem + ".latent")).string();
  WriteAudioExchangeFile(in_path, audio);
  std::string cmd = config.adapter_command + " " + ShellQuote(in_path) + " " +
                    ShellQuote(out_path);
  int rc = std::system(cmd.c_str());
  std::error_code ec;
  fs::remove(in_path, ec);
  if (rc != 0) {
    fs::remove(out_path, ec);
    throw Error("encoder adapter exited with status " + std::to_string(rc));
  }
  Eigen::MatrixXd h = ReadLatentFile(out_path);
  fs::remove(out_path, ec);
  if (h.cols() != config.feature_dim)
    throw DimensionError("adapter returned F=" + std::to_string(h.cols()) +
                         ", expected " + std::to_string(config.feature_dim));
  LatentSequence out;
  out.valid_length = h.rows();
  out.values = std::move(h);
  return out;
}

}  // namespace dmtl

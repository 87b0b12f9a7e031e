// src/cli/synth.cc

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

#include "dmtl/cli/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numbers>

#include "dmtl/common/error.h"
#include "dmtl/common/rng.h"
#include "dmtl/common/wav.h"

namespace dmtl {

namespace {

// Formant centre per token, Hz.
constexpr double kTokenFormant[kSynthVocabularySize] = {500, 750, 1000, 1350,
                                                        1700, 2100, 2600, 3100};

constexpr double kTokenSeconds = 0.09;
constexpr double kGapSeconds = 0.03;
constexpr double kEdgeSeconds = 0.05;
constexpr double kTokenRms = 0.05;

double Clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

void AppendToken(std::vector<double> &out, int token, double f0, int severity,
                 double tempo, int rate, Rng &rng) {
  const double tilt = 1.0 + 0.4 * severity;
  const double jitter = 0.004 + 0.01 * severity;
  const double seconds = kTokenSeconds * tempo * Uniform(rng, 0.9, 1.1);
  const int n = static_cast<int>(std::lround(seconds * rate));
  const double formant = kTokenFormant[token];
  const double bandwidth = 150.0 + 40.0 * severity;
  const double nyquist = 0.5 * rate;

  std::vector<double> seg(n, 0.0);
  double phase = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    double f = f0 * (1.0 + jitter * Gaussian(rng));
    phase += 2.0 * std::numbers::pi * f / rate;
    double s = 0.0;
    for (int k = 1; k * f0 < nyquist * 0.9; ++k) {
      double fk = k * f0;
      double d = (fk - formant) / bandwidth;
      double amp = std::pow(static_cast<double>(k), -tilt) + std::exp(-0.5 * d * d);
      s += amp * std::sin(k * phase);
    }
    seg[i] = s;
  }
  double ss = 0.0;
  for (double v : seg) ss += v * v;
  const double rms = std::sqrt(ss / std::max(n, 1));
  const double spread = 0.1 + 0.15 * severity;
  const double gain = std::exp(spread * Clamp(Gaussian(rng), -2.0, 2.0));
  const int ramp = std::min(n / 4, rate / 200);
  for (int i = 0; i < n; ++i) {
    double env = 1.0;
    if (i < ramp) env = static_cast<double>(i) / ramp;
    if (n - 1 - i < ramp) env = static_cast<double>(n - 1 - i) / ramp;
    out.push_back(kTokenRms * gain * env * seg[i] / rms);
  }
}

std::vector<double> Synthesize(const std::vector<int> &tokens, double f0, int severity,
                               int rate, Rng &rng) {
  const double tempo = (1.0 + 0.15 * severity) * Uniform(rng, 0.95, 1.05);
  std::vector<double> out(static_cast<std::size_t>(kEdgeSeconds * rate), 0.0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    AppendToken(out, tokens[i], f0, severity, tempo, rate, rng);
    out.insert(out.end(), static_cast<std::size_t>(kGapSeconds * tempo * rate), 0.0);
  }
  out.insert(out.end(), static_cast<std::size_t>(kEdgeSeconds * rate), 0.0);
  // Additive white noise at a class-dependent SNR relative to the speech.
  double ss = 0.0;
  for (double s : out) ss += s * s;
  const double snr_db = 30.0 - 6.0 * severity;
  const double noise = std::sqrt(ss / out.size()) * std::pow(10.0, -snr_db / 20.0);
  double peak = 0.0;
  for (double &s : out) {
    s += noise * Gaussian(rng);
    peak = std::max(peak, std::fabs(s));
  }
  if (peak > 0.99)
    for (double &s : out) s *= 0.99 / peak;
  return out;
}

}  // namespace

const std::vector<int> &SynthText(int text_id) {
  static const std::vector<std::vector<int>> texts = {
      {0, 3, 5, 1},
      {2, 6, 2, 7, 4},
      {1, 4, 0, 6, 3, 5},
      {7, 5, 3, 1, 2},
      {6, 0, 4, 4, 7, 2}};
  if (text_id < 1 || text_id > kSynthTexts)
    throw ValidationError("text id " + std::to_string(text_id) + " out of range");
  return texts[text_id - 1];
}

SynthCorpus GenerateSynthCorpus(const SynthConfig &config) {
  if (config.speakers < 5 * kNumSeverityClasses)
    throw ValidationError("synthetic corpus needs at least 5 speakers per severity class (" +
                          std::to_string(5 * kNumSeverityClasses) + "), got " +
                          std::to_string(config.speakers));
  if (config.repetitions < 1 || config.repetitions > 2)
    throw ValidationError("repetitions must be 1 or 2");
  if (config.sample_rate < 8000) throw ValidationError("sample rate below 8 kHz");

  SynthCorpus corpus;
  int per_class_index[kNumSeverityClasses] = {};
  for (int s = 0; s < config.speakers; ++s) {
    SpeakerRecord spk;
    spk.severity = s % kNumSeverityClasses;
    int idx = ++per_class_index[spk.severity];
    spk.gender = (idx % 2 == 1) ? Gender::kMale : Gender::kFemale;
    char id[32];
    std::snprintf(id, sizeof id, "syn%d%s%02d", spk.severity, GenderCode(spk.gender), idx);
    spk.speaker_id = id;
    corpus.roster.push_back(spk);
  }
  std::sort(corpus.roster.begin(), corpus.roster.end(),
            [](const SpeakerRecord &a, const SpeakerRecord &b) {
              return a.speaker_id < b.speaker_id;
            });

  for (const SpeakerRecord &spk : corpus.roster) {
    Rng srng(DeriveSeed(config.seed, "speaker:" + spk.speaker_id));
    const double f0 = spk.gender == Gender::kMale ? Uniform(srng, 100.0, 140.0)
                                                  : Uniform(srng, 180.0, 240.0);
    for (int text = 1; text <= kSynthTexts; ++text) {
      for (int rep = 1; rep <= config.repetitions; ++rep) {
        Utterance u;
        u.speaker_id = spk.speaker_id;
        u.text_id = text;
        u.repetition = rep;
        u.utterance_id = spk.speaker_id + "_t" + std::to_string(text) + "_r" + std::to_string(rep);
        u.audio_path = "audio/" + u.utterance_id + ".wav";
        u.transcript = SynthText(text);
        Rng urng(DeriveSeed(config.seed, "utterance:" + u.utterance_id));
        RawAudio audio;
        audio.sample_rate = config.sample_rate;
        audio.samples = Synthesize(u.transcript, f0 * Uniform(urng, 0.97, 1.03), spk.severity,
                                   config.sample_rate, urng);
        u.audio = std::move(audio);
        corpus.utterances.push_back(std::move(u));
      }
    }
  }
  return corpus;
}

void WriteSynthCorpus(const std::string &dir, const SynthCorpus &corpus, int sample_rate) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "audio", ec);
  if (ec) throw IoError("cannot create " + dir + "/audio: " + ec.message());
  for (const Utterance &u : corpus.utterances) {
    if (!u.audio) throw ValidationError("utterance " + u.utterance_id + " has no audio");
    WriteWav((fs::path(dir) / u.audio_path).string(), u.audio->samples, sample_rate);
  }
  WriteRoster((fs::path(dir) / "roster.jsonl").string(), corpus.roster);
  WriteManifest((fs::path(dir) / "manifest.jsonl").string(), corpus.utterances);
}

std::vector<double> FrameEnergyVarianceBySeverity(const SynthCorpus &corpus) {
  std::map<std::string, int> severity;
  for (const SpeakerRecord &s : corpus.roster) severity[s.speaker_id] = s.severity;
  std::vector<double> sum(kNumSeverityClasses, 0.0);
  std::vector<int> count(kNumSeverityClasses, 0);
  for (const Utterance &u : corpus.utterances) {
    const std::vector<double> &x = u.audio->samples;
    const int rate = u.audio->sample_rate;
    const std::size_t len = rate / 40, hop = rate / 100;
    std::vector<double> e;
    for (std::size_t start = 0; start + len <= x.size(); start += hop) {
      double ss = 0.0;
      for (std::size_t i = start; i < start + len; ++i) ss += x[i] * x[i];
      e.push_back(ss / len);
    }
    if (e.empty()) continue;
    double mean = 0.0, var = 0.0;
    for (double v : e) mean += v;
    mean /= e.size();
    for (double v : e) var += (v - mean) * (v - mean);
    var /= e.size();
    int sev = severity.at(u.speaker_id);
    sum[sev] += var;
    ++count[sev];
  }
  for (int k = 0; k < kNumSeverityClasses; ++k)
    if (count[k]) sum[k] /= count[k];
  return sum;
}

}  // namespace dmtl

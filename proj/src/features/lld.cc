// src/features/lld.cc

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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "dmtl/common/error.h"
#include "dmtl/features/features.h"

namespace dmtl {
namespace {

constexpr double kEnergyEps = 1e-10;  // 10*log10 -> -100 dB floor

int ToSamples(double seconds, int rate) {
  return static_cast<int>(std::lround(seconds * rate));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// num_filters x num_bins triangular mel weights.
Eigen::MatrixXd MelFilterbank(int num_filters, int nfft, int rate) {
  int bins = nfft / 2 + 1;
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(num_filters, bins);
  double lo = HzToMel(0.0), hi = HzToMel(rate / 2.0);
  std::vector<double> edges(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i)
    edges[i] = MelToHz(lo + (hi - lo) * i / (num_filters + 1));
  for (int m = 0; m < num_filters; ++m) {
    double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      double f = static_cast<double>(k) * rate / nfft;
      if (f > left && f <= center)
        fb(m, k) = (f - left) / (center - left);
      else if (f > center && f < right)
        fb(m, k) = (right - f) / (right - center);
    }
  }
  return fb;
}

// Orthonormal DCT-II rows 0..num_ceps-1.
Eigen::MatrixXd DctMatrix(int num_ceps, int n) {
  Eigen::MatrixXd d(num_ceps, n);
  for (int k = 0; k < num_ceps; ++k) {
    double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i)
      d(k, i) = scale * std::cos(std::numbers::pi * k * (i + 0.5) / n);
  }
  return d;
}

}  // namespace

Eigen::MatrixXd FrameSignal(const RawAudio &audio, double frame_length,
                            double hop_length) {
  if (!(hop_length > 0.0) || frame_length < hop_length)
    throw Error("framing requires frame_length >= hop_length > 0");
  int size = ToSamples(frame_length, audio.sample_rate);
  int hop = ToSamples(hop_length, audio.sample_rate);
  if (size < 1 || hop < 1) throw Error("frame shorter than one sample");
  auto length = static_cast<long>(audio.samples.size());
  if (length < size)
    throw Error("audio of " + std::to_string(length) +
                " samples is shorter than one frame of " + std::to_string(size));
  long count = (length - size) / hop + 1;
  Eigen::MatrixXd frames(count, size);
  for (long t = 0; t < count; ++t)
    for (int i = 0; i < size; ++i) frames(t, i) = audio.samples[t * hop + i];
  return frames;
}

double EstimateF0(const double *frame, int size, int sample_rate,
                  const FrameConfig &config, double *peak) {
  if (peak) *peak = 0.0;
  double mean = 0.0;
  for (int i = 0; i < size; ++i) mean += frame[i];
  mean /= size;
  std::vector<double> x(size);
  double energy = 0.0;
  for (int i = 0; i < size; ++i) {
    x[i] = frame[i] - mean;
    energy += x[i] * x[i];
  }
  if (energy / size < kEnergyEps) return 0.0;

  int min_lag = std::max(2, static_cast<int>(std::floor(sample_rate / config.max_f0)));
  int max_lag = std::min(size - 2, static_cast<int>(std::ceil(sample_rate / config.min_f0)));
  if (max_lag <= min_lag) return 0.0;

  std::vector<double> r(max_lag + 2, 0.0);
  for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
    double num = 0.0, e0 = 0.0, e1 = 0.0;
    for (int i = 0; i + lag < size; ++i) {
      num += x[i] * x[i + lag];
      e0 += x[i] * x[i];
      e1 += x[i + lag] * x[i + lag];
    }
    double den = std::sqrt(e0 * e1);
    r[lag] = den > 0.0 ? num / den : 0.0;
  }
  double best = -1.0;
  for (int lag = min_lag; lag <= max_lag; ++lag) best = std::max(best, r[lag]);
  if (peak) *peak = best;
  if (best < config.voicing_threshold) return 0.0;

  // The shortest lag that is a local maximum close to the global peak; longer
  // lags at period multiples score almost as high.
  int chosen = -1;
  for (int lag = min_lag; lag <= max_lag; ++lag) {
    if (r[lag] >= 0.9 * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
      chosen = lag;
      break;
    }
  }
  if (chosen < 0) return 0.0;
  double a = r[chosen - 1], b = r[chosen], c = r[chosen + 1];
  double denom = a - 2.0 * b + c;
  double offset = std::fabs(denom) > 1e-12 ? 0.5 * (a - c) / denom : 0.0;
  offset = std::clamp(offset, -0.5, 0.5);
  return sample_rate / (chosen + offset);
}

LldMatrix ExtractLlds(const RawAudio &audio, const FrameConfig &config) {
  audio.Validate();
  Eigen::MatrixXd frames = FrameSignal(audio, config.frame_length, config.hop_length);
  const auto count = frames.rows();
  const int size = static_cast<int>(frames.cols());
  const int rate = audio.sample_rate;
  int nfft = 1;
  while (nfft < size) nfft <<= 1;
  const int bins = nfft / 2 + 1;

  LldMatrix lld;
  lld.frame_length = config.frame_length;
  lld.hop_length = config.hop_length;
  lld.sample_rate = rate;
  lld.descriptor_names = {"f0_hz", "log_energy_db", "jitter_rel", "shimmer_rel",
                          "spectral_centroid_hz", "spectral_flux", "zcr"};
  lld.scopes = {FrameScope::kVoiced, FrameScope::kAll, FrameScope::kVoicedPairs,
                FrameScope::kVoicedPairs, FrameScope::kAll, FrameScope::kAll,
                FrameScope::kAll};
  for (int k = 0; k < config.num_cepstra; ++k) {
    lld.descriptor_names.push_back("mfcc_" + std::to_string(k));
    lld.scopes.push_back(FrameScope::kAll);
  }
  const auto dims = static_cast<Eigen::Index>(lld.descriptor_names.size());
  lld.values = Eigen::MatrixXd::Zero(count, dims);
  lld.voiced_mask.assign(count, false);

  std::vector<double> window(size);
  for (int i = 0; i < size; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (size - 1 > 0 ? size - 1 : 1));
  Eigen::MatrixXd mel = MelFilterbank(config.num_mel_filters, nfft, rate);
  Eigen::MatrixXd dct = DctMatrix(config.num_cepstra, config.num_mel_filters);
  Eigen::FFT<double> fft;
  std::vector<double> buffer(nfft);
  std::vector<std::complex<double>> spectrum;
  Eigen::VectorXd magnitude(bins), prev_magnitude = Eigen::VectorXd::Zero(bins);
  std::vector<double> peak_amplitude(count, 0.0);

  for (Eigen::Index t = 0; t < count; ++t) {
    Eigen::RowVectorXd row = frames.row(t);
    const double *x = row.data();

    double f0 = EstimateF0(x, size, rate, config);
    lld.voiced_mask[t] = f0 > 0.0;
    lld.values(t, 0) = f0;

    double power = row.squaredNorm() / size;
    lld.values(t, 1) = 10.0 * std::log10(power + kEnergyEps);
    peak_amplitude[t] = row.cwiseAbs().maxCoeff();

    int crossings = 0;
    for (int i = 1; i < size; ++i)
      if ((x[i - 1] >= 0.0) != (x[i] >= 0.0)) ++crossings;
    lld.values(t, 6) = static_cast<double>(crossings) / (size - 1);

    // Pre-emphasized, Hamming-windowed power spectrum.
    std::fill(buffer.begin(), buffer.end(), 0.0);
    for (int i = 0; i < size; ++i) {
      double prev = i > 0 ? x[i - 1] : x[0];
      buffer[i] = (x[i] - config.pre_emphasis * prev) * window[i];
    }
    fft.fwd(spectrum, buffer);
    for (int k = 0; k < bins; ++k) magnitude[k] = std::abs(spectrum[k]);
    Eigen::VectorXd pspec = magnitude.array().square();

    double total = magnitude.sum();
    double centroid = 0.0;
    if (total > 1e-12) {
      for (int k = 0; k < bins; ++k) centroid += magnitude[k] * k * rate / nfft;
      centroid /= total;
    }
    lld.values(t, 4) = centroid;

    Eigen::VectorXd normalized = total > 1e-12 ? Eigen::VectorXd(magnitude / total)
                                               : Eigen::VectorXd::Zero(bins);
    lld.values(t, 5) = t > 0 ? (normalized - prev_magnitude).squaredNorm() : 0.0;
    prev_magnitude = normalized;

    Eigen::VectorXd mel_energy = (mel * pspec).array().max(kEnergyEps).log();
    Eigen::VectorXd cepstra = dct * mel_energy;
    for (int k = 0; k < config.num_cepstra; ++k) lld.values(t, 7 + k) = cepstra[k];
  }

  for (Eigen::Index t = 1; t < count; ++t) {
    if (!(lld.voiced_mask[t] && lld.voiced_mask[t - 1])) continue;
    double p0 = 1.0 / lld.values(t - 1, 0), p1 = 1.0 / lld.values(t, 0);
    lld.values(t, 2) = std::fabs(p1 - p0) / (0.5 * (p0 + p1));
    double a0 = peak_amplitude[t - 1], a1 = peak_amplitude[t];
    lld.values(t, 3) = (a0 + a1) > 0.0 ? std::fabs(a1 - a0) / (0.5 * (a0 + a1)) : 0.0;
  }
  return lld;
}

}  // namespace dmtl

// include/dmtl/common/wav.h

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

#ifndef DMTL_COMMON_WAV_H_
#define DMTL_COMMON_WAV_H_

#include <string>
#include <vector>

namespace dmtl {

struct WavData {
  std::vector<double> samples;  // mono, in [-1, 1]
  int sample_rate = 0;
};

// Reads a RIFF/WAVE file with 16-bit PCM or 32-bit float samples. Multi-channel
// input is averaged down to mono.
WavData ReadWav(const std::string &path);

// Writes mono 16-bit PCM. Samples are clipped to [-1, 1] before quantization.
void WriteWav(const std::string &path, const std::vector<double> &samples,
              int sample_rate);

}  // namespace dmtl

#endif  // DMTL_COMMON_WAV_H_

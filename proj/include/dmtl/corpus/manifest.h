// include/dmtl/corpus/manifest.h

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

#ifndef DMTL_CORPUS_MANIFEST_H_
#define DMTL_CORPUS_MANIFEST_H_

#include <string>
#include <vector>

#include "dmtl/corpus/types.h"

namespace dmtl {

// Roster file: JSON lines, one speaker per line with keys
//   speaker_id, gender ("M"|"F"), severity (0..4).
// Manifest file: JSON lines, one utterance per line with keys
//   utterance_id, speaker_id, audio_path (relative to the manifest's
//   directory), transcript (space-separated token ids), text_id, repetition.
// Blank lines and lines starting with '#' are skipped.

std::vector<SpeakerRecord> LoadRoster(const std::string &path);

struct Corpus {
  std::vector<SpeakerRecord> roster;
  std::vector<Utterance> utterances;
  std::string base_dir;  // directory audio paths are resolved against

  const SpeakerRecord &Speaker(const std::string &speaker_id) const;
  std::string ResolveAudioPath(const Utterance &u) const;
};

// Parses both files and cross-validates them. Malformed lines raise ParseError
// with the line number; references to unknown speakers, duplicate ids and out
// of range fields raise ValidationError. With load_audio set every utterance's
// audio is read eagerly; otherwise LoadAudio() fetches it on demand.
Corpus LoadCorpus(const std::string &roster_path,
                  const std::string &manifest_path, bool load_audio);

RawAudio LoadAudio(const Corpus &corpus, const Utterance &u);

void WriteRoster(const std::string &path,
                 const std::vector<SpeakerRecord> &roster);
void WriteManifest(const std::string &path,
                   const std::vector<Utterance> &utterances);

}  // namespace dmtl

#endif  // DMTL_CORPUS_MANIFEST_H_

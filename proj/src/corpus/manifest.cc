// src/corpus/manifest.cc

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

#include "dmtl/corpus/manifest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "dmtl/common/error.h"
#include "dmtl/common/strings.h"
#include "dmtl/common/wav.h"

namespace dmtl {
namespace {

using nlohmann::json;

template <typename Fn>
void ForEachRecord(const std::string &path, Fn &&fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    json rec;
    try {
      rec = json::parse(t);
    } catch (const json::parse_error &e) {
      throw ParseError(path, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(path, lineno, "record is not an object");
    fn(rec, lineno);
  }
}

void CheckKeys(const json &rec, const std::set<std::string> &allowed,
               const std::string &path, std::size_t lineno) {
  for (const auto &[key, value] : rec.items()) {
    if (!allowed.count(key))
      throw ParseError(path, lineno, "unknown field '" + key + "'");
  }
  for (const auto &key : allowed) {
    if (!rec.contains(key))
      throw ParseError(path, lineno, "missing field '" + key + "'");
  }
}

std::string GetString(const json &rec, const char *key, const std::string &path,
                      std::size_t lineno) {
  const json &v = rec.at(key);
  if (!v.is_string())
    throw ParseError(path, lineno, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

long long GetInt(const json &rec, const char *key, const std::string &path,
                 std::size_t lineno) {
  const json &v = rec.at(key);
  if (!v.is_number_integer())
    throw ParseError(path, lineno, std::string("field '") + key + "' must be an integer");
  return v.get<long long>();
}

std::vector<int> ParseTranscript(const std::string &text,
                                 const std::string &path, std::size_t lineno) {
  std::vector<int> tokens;
  for (const auto &field : SplitWhitespace(text)) {
    long long id;
    if (!ParseInt(field, &id) || id < 0)
      throw ParseError(path, lineno, "invalid transcript token '" + field + "'");
    tokens.push_back(static_cast<int>(id));
  }
  return tokens;
}

}  // namespace

std::vector<SpeakerRecord> LoadRoster(const std::string &path) {
  std::vector<SpeakerRecord> roster;
  std::set<std::string> seen;
  ForEachRecord(path, [&](const json &rec, std::size_t lineno) {
    CheckKeys(rec, {"speaker_id", "gender", "severity"}, path, lineno);
    SpeakerRecord s;
    s.speaker_id = GetString(rec, "speaker_id", path, lineno);
    try {
      s.gender = ParseGender(GetString(rec, "gender", path, lineno));
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw ParseError(path, lineno, e.what());
    }
    long long sev = GetInt(rec, "severity", path, lineno);
    if (sev < 0 || sev >= kNumSeverityClasses)
      throw ParseError(path, lineno, "severity must be in 0..4");
    s.severity = static_cast<int>(sev);
    if (s.speaker_id.empty()) throw ParseError(path, lineno, "empty speaker_id");
    if (!seen.insert(s.speaker_id).second)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": duplicate speaker_id '" + s.speaker_id + "'");
    roster.push_back(std::move(s));
  });
  return roster;
}

const SpeakerRecord &Corpus::Speaker(const std::string &speaker_id) const {
  for (const auto &s : roster)
    if (s.speaker_id == speaker_id) return s;
  throw ValidationError("unknown speaker '" + speaker_id + "'");
}

std::string Corpus::ResolveAudioPath(const Utterance &u) const {
  std::filesystem::path p(u.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

Corpus LoadCorpus(const std::string &roster_path,
                  const std::string &manifest_path, bool load_audio) {
  Corpus corpus;
  corpus.roster = LoadRoster(roster_path);
  corpus.base_dir = std::filesystem::path(manifest_path).parent_path().string();

  std::set<std::string> speakers;
  for (const auto &s : corpus.roster) speakers.insert(s.speaker_id);
  std::set<std::string> seen;
  ForEachRecord(manifest_path, [&](const json &rec, std::size_t lineno) {
    CheckKeys(rec,
              {"utterance_id", "speaker_id", "audio_path", "transcript",
               "text_id", "repetition"},
              manifest_path, lineno);
    Utterance u;
    u.utterance_id = GetString(rec, "utterance_id", manifest_path, lineno);
    u.speaker_id = GetString(rec, "speaker_id", manifest_path, lineno);
    u.audio_path = GetString(rec, "audio_path", manifest_path, lineno);
    u.transcript = ParseTranscript(
        GetString(rec, "transcript", manifest_path, lineno), manifest_path, lineno);
    long long text_id = GetInt(rec, "text_id", manifest_path, lineno);
    long long rep = GetInt(rec, "repetition", manifest_path, lineno);
    if (text_id < 1 || text_id > 5)
      throw ParseError(manifest_path, lineno, "text_id must be in 1..5");
    if (rep < 1 || rep > 2)
      throw ParseError(manifest_path, lineno, "repetition must be 1 or 2");
    u.text_id = static_cast<int>(text_id);
    u.repetition = static_cast<int>(rep);
    std::string where = manifest_path + ":" + std::to_string(lineno);
    if (!speakers.count(u.speaker_id))
      throw ValidationError(where + ": utterance '" + u.utterance_id +
                            "' references unknown speaker '" + u.speaker_id + "'");
    if (!seen.insert(u.utterance_id).second)
      throw ValidationError(where + ": duplicate utterance_id '" +
                            u.utterance_id + "'");
    corpus.utterances.push_back(std::move(u));
  });

  if (load_audio) {
    for (auto &u : corpus.utterances) u.audio = LoadAudio(corpus, u);
  }
  return corpus;
}

RawAudio LoadAudio(const Corpus &corpus, const Utterance &u) {
  if (u.audio) return *u.audio;
  WavData wav = ReadWav(corpus.ResolveAudioPath(u));
  RawAudio audio{std::move(wav.samples), wav.sample_rate};
  audio.Validate();
  return audio;
}

void WriteRoster(const std::string &path,
                 const std::vector<SpeakerRecord> &roster) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto &s : roster) {
    json rec = {{"speaker_id", s.speaker_id},
                {"gender", GenderCode(s.gender)},
                {"severity", s.severity}};
    out << rec.dump() << '\n';
  }
}

void WriteManifest(const std::string &path,
                   const std::vector<Utterance> &utterances) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto &u : utterances) {
    std::string transcript;
    for (std::size_t i = 0; i < u.transcript.size(); ++i) {
      if (i) transcript += ' ';
      transcript += std::to_string(u.transcript[i]);
    }
    json rec = {{"utterance_id", u.utterance_id},
                {"speaker_id", u.speaker_id},
                {"audio_path", u.audio_path},
                {"transcript", transcript},
                {"text_id", u.text_id},
                {"repetition", u.repetition}};
    out << rec.dump() << '\n';
  }
}

}  // namespace dmtl

// pipeline/corpus_io.cc

// Copyright 2026  Dynprec Authors

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

#include "pipeline/corpus_io.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "util/binio.h"
#include "util/errors.h"

namespace dynprec {
namespace pipeline {

namespace {
constexpr char kFeatureMagic[4] = {'D', 'P', 'F', 'T'};
}

void SaveFeatures(const qnn::FeatureMatrix &features, const std::string &path) {
  if (features.frames <= 0 || features.dim <= 0) {
    throw ValidationError("SaveFeatures: empty feature matrix");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open feature file for writing: " + path);
  PutBytes(os, kFeatureMagic, 4);
  PutRaw<std::uint32_t>(os, static_cast<std::uint32_t>(features.frames));
  PutRaw<std::uint32_t>(os, static_cast<std::uint32_t>(features.dim));
  PutBytes(os, features.data.data(), features.data.size() * sizeof(float));
  if (!os) throw IoError("write failure on feature file: " + path);
}

qnn::FeatureMatrix LoadFeatures(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open feature file: " + path);
  char magic[4];
  GetBytes(is, magic, 4, "magic");
  if (std::memcmp(magic, kFeatureMagic, 4) != 0) {
    throw IoError("not a feature file (bad magic): " + path);
  }
  qnn::FeatureMatrix f;
  f.frames = static_cast<int>(GetRaw<std::uint32_t>(is, "frame count"));
  f.dim = static_cast<int>(GetRaw<std::uint32_t>(is, "dim"));
  if (f.frames <= 0 || f.dim <= 0 || f.frames > (1 << 24) || f.dim > (1 << 16)) {
    throw ValidationError("feature file: implausible header: " + path);
  }
  f.data.resize(static_cast<std::size_t>(f.frames) * f.dim);
  GetBytes(is, f.data.data(), f.data.size() * sizeof(float), "frame data");
  for (float v : f.data) {
    if (!std::isfinite(v)) {
      throw ValidationError("feature file: non-finite value: " + path);
    }
  }
  return f;
}

std::vector<ManifestEntry> LoadManifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest: " + path);
  const auto base = std::filesystem::path(path).parent_path();

  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string feat;
    if (!(ls >> feat)) continue;
    ManifestEntry e;
    const std::filesystem::path fp(feat);
    e.feature_path = fp.is_absolute() ? feat : (base / fp).string();
    e.utt_id = fp.stem().string();
    std::string w;
    while (ls >> w) e.words.push_back(w);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    throw ValidationError("manifest has no utterances: " + path);
  }
  return entries;
}

void SaveManifest(const std::vector<ManifestEntry> &entries,
                  const std::string &path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open manifest for writing: " + path);
  for (const auto &e : entries) {
    os << e.feature_path;
    for (const auto &w : e.words) os << ' ' << w;
    os << '\n';
  }
  if (!os) throw IoError("write failure on manifest: " + path);
}

}  // namespace pipeline
}  // namespace dynprec

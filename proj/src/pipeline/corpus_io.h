// pipeline/corpus_io.h

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

// Feature file: binary little-endian, magic "DPFT", u32 frame count,
// u32 dim, then frame-major f32 values.
// Manifest: one utterance per line, `feature_path word word ...`; paths are
// relative to the manifest's directory.

#ifndef DYNPREC_PIPELINE_CORPUS_IO_H_
#define DYNPREC_PIPELINE_CORPUS_IO_H_

#include <string>
#include <vector>

#include "qnn/model.h"

namespace dynprec {
namespace pipeline {

void SaveFeatures(const qnn::FeatureMatrix &features, const std::string &path);
qnn::FeatureMatrix LoadFeatures(const std::string &path);

struct ManifestEntry {
  std::string utt_id;        // derived from the feature file stem
  std::string feature_path;  // resolved against the manifest directory
  std::vector<std::string> words;
};

std::vector<ManifestEntry> LoadManifest(const std::string &path);
// Entries are written with feature paths as given (keep them relative).
void SaveManifest(const std::vector<ManifestEntry> &entries,
                  const std::string &path);

}  // namespace pipeline
}  // namespace dynprec

#endif  // DYNPREC_PIPELINE_CORPUS_IO_H_

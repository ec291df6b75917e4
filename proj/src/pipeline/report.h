// pipeline/report.h

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

// Report files written by a decode run (all CSV schemas carry a
// `# schema: ...` version line):
//   transcript.txt        utt_id followed by the hypothesis words
//   wer_summary.txt       corpus WER in compute-wer style
//   per_utterance.csv     per-utterance WER, ratio and cost columns
//   rollup.csv            metric,value rows for the corpus totals
//   controller_trace.csv  frame,token_count,threshold,decision
//   config.json           effective run configuration echo
// The report command turns one or more runs' files into per-figure data
// series (tokens per frame, cumulative token-count frequency, threshold
// trace, half-ratio histogram, percentile-threshold discrepancy).

#ifndef DYNPREC_PIPELINE_REPORT_H_
#define DYNPREC_PIPELINE_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "pipeline/decode.h"

namespace dynprec {
namespace pipeline {

// Baseline totals used for the system-level delta rows in rollup.csv.
struct BaselineTotals {
  double total_time_s = 0.0;
  double total_energy_j = 0.0;
};

void WriteDecodeReport(const std::string &dir, const CorpusResult &result,
                       const RunConfig &cfg, const wfst::SymbolTable &words,
                       const std::optional<BaselineTotals> &baseline,
                       const std::string &config_echo_json);

// Reads the two totals needed for baseline comparisons back out of a
// previous run's rollup.csv.
BaselineTotals ReadBaselineTotals(const std::string &run_dir);

void WriteSweepCsv(const std::string &path, const std::vector<SweepRow> &rows);

// Figure-data extraction. `run_dir` must hold a decode report; the base and
// half run dirs are optional and enable the distribution-shift outputs.
struct ReportInputs {
  std::string run_dir;
  std::string base_run_dir;  // optional
  std::string half_run_dir;  // optional
};

void WriteFigureData(const ReportInputs &inputs, const std::string &out_dir);

// Trace readback used by the report command and the acceptance suite.
struct TraceRow {
  std::int64_t frame = 0;
  std::int64_t token_count = 0;
  std::int64_t threshold = -1;
  std::string decision;
};
std::vector<TraceRow> ReadTrace(const std::string &run_dir);

std::vector<double> ReadPerUtteranceHalfRatios(const std::string &run_dir);

}  // namespace pipeline
}  // namespace dynprec

#endif  // DYNPREC_PIPELINE_REPORT_H_

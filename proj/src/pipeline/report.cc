// pipeline/report.cc

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

#include "pipeline/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "util/errors.h"

namespace dynprec {
namespace pipeline {

namespace fs = std::filesystem;

namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream OpenOut(const fs::path &path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

// Minimal reader for our own CSV files: skips `#` lines, returns the header
// then data rows split on commas.
std::vector<std::vector<std::string>> ReadCsvRows(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open report input: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw ValidationError("empty report input: " + path);
  return rows;
}

int ColumnIndex(const std::vector<std::string> &header, const std::string &name,
                const std::string &path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw ValidationError("column '" + name + "' missing in " + path);
}

std::vector<std::int64_t> TraceCounts(const std::string &run_dir) {
  std::vector<std::int64_t> counts;
  for (const auto &row : ReadTrace(run_dir)) counts.push_back(row.token_count);
  return counts;
}

// Nearest-rank percentile of a sorted vector.
std::int64_t Percentile(const std::vector<std::int64_t> &sorted, double pct) {
  const std::size_t n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

double FractionBelow(const std::vector<std::int64_t> &counts,
                     std::int64_t threshold) {
  std::int64_t below = 0;
  for (const auto c : counts) {
    if (c < threshold) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(counts.size());
}

}  // namespace

void WriteDecodeReport(const std::string &dir, const CorpusResult &result,
                       const RunConfig &cfg, const wfst::SymbolTable &words,
                       const std::optional<BaselineTotals> &baseline,
                       const std::string &config_echo_json) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory: " + dir);

  {
    auto os = OpenOut(fs::path(dir) / "transcript.txt");
    for (const auto &utt : result.utterances) {
      os << utt.id;
      for (const auto id : utt.hyp_words) os << ' ' << words.Name(id);
      os << '\n';
    }
  }

  {
    auto os = OpenOut(fs::path(dir) / "wer_summary.txt");
    char line[160];
    std::snprintf(line, sizeof(line), "%%WER %.2f [ %lld / %lld, %lld ins, %lld del, %lld sub ]\n",
                  100.0 * result.wer.Rate(),
                  static_cast<long long>(result.wer.Errors()),
                  static_cast<long long>(result.wer.ref_words),
                  static_cast<long long>(result.wer.insertions),
                  static_cast<long long>(result.wer.deletions),
                  static_cast<long long>(result.wer.substitutions));
    os << line;
    os << "utterances " << result.utterances.size() << '\n';
    os << "failures " << result.failures << '\n';
    os << "mode " << DecodeModeName(cfg.mode) << '\n';
    os << "half_ratio " << Num(result.half_ratio) << '\n';
  }

  {
    auto os = OpenOut(fs::path(dir) / "per_utterance.csv");
    os << "# schema: dynprec.per_utterance v1\n";
    os << "utt,frames,half_frames,half_ratio,ref_words,sub,del,ins,wer,"
          "am_time_s,am_energy_j,beam_time_s,beam_energy_j,fe_time_s,"
          "fe_energy_j,total_time_s,total_energy_j,am_time_saving_pct,"
          "am_energy_saving_pct,reached_final,failed\n";
    for (const auto &utt : result.utterances) {
      const auto &led = utt.ledger;
      const auto am = cost::ComputeAmSavings(led, cfg.hw);
      const double fe_time = led.StageTime(cost::kStageFeature) +
                             led.StageTime(cost::kStageIvector);
      const double fe_energy = led.StageEnergy(cost::kStageFeature) +
                               led.StageEnergy(cost::kStageIvector);
      os << utt.id << ',' << led.frames << ',' << led.half_frames << ','
         << Num(utt.HalfRatio()) << ',' << utt.wer.ref_words << ','
         << utt.wer.substitutions << ',' << utt.wer.deletions << ','
         << utt.wer.insertions << ',' << Num(utt.wer.Rate()) << ','
         << Num(led.StageTime(cost::kStageAm)) << ','
         << Num(led.StageEnergy(cost::kStageAm)) << ','
         << Num(led.StageTime(cost::kStageBeam)) << ','
         << Num(led.StageEnergy(cost::kStageBeam)) << ',' << Num(fe_time) << ','
         << Num(fe_energy) << ',' << Num(led.TotalTime()) << ','
         << Num(led.TotalEnergy()) << ',' << Num(am.time_pct) << ','
         << Num(am.energy_pct) << ',' << (utt.reached_final ? 1 : 0) << ','
         << (utt.failed ? 1 : 0) << '\n';
    }
  }

  {
    auto os = OpenOut(fs::path(dir) / "rollup.csv");
    os << "# schema: dynprec.rollup v1\n";
    os << "metric,value\n";
    const auto &led = result.ledger;
    os << "utterances," << result.utterances.size() << '\n';
    os << "failures," << result.failures << '\n';
    os << "frames," << led.frames << '\n';
    os << "half_frames," << led.half_frames << '\n';
    os << "half_ratio," << Num(result.half_ratio) << '\n';
    os << "wer," << Num(result.wer.Rate()) << '\n';
    os << "substitutions," << result.wer.substitutions << '\n';
    os << "deletions," << result.wer.deletions << '\n';
    os << "insertions," << result.wer.insertions << '\n';
    os << "ref_words," << result.wer.ref_words << '\n';
    for (int s = 0; s < cost::kNumStages; ++s) {
      os << "time_s." << cost::StageName(s) << ','
         << Num(led.time_s[s]) << '\n';
      os << "energy_j." << cost::StageName(s) << ','
         << Num(led.StageEnergy(static_cast<cost::Stage>(s))) << '\n';
    }
    for (int c = 0; c < cost::kNumComponents; ++c) {
      os << "energy_j.component." << cost::ComponentName(c) << ','
         << Num(led.ComponentEnergy(static_cast<cost::Component>(c))) << '\n';
    }
    os << "total_time_s," << Num(led.TotalTime()) << '\n';
    os << "total_energy_j," << Num(led.TotalEnergy()) << '\n';
    os << "dram_weight_bytes," << Num(led.dram_weight_bytes) << '\n';
    os << "dram_other_bytes," << Num(led.dram_other_bytes) << '\n';

    const auto am = cost::ComputeAmSavings(led, cfg.hw);
    os << "am_time_saving_pct," << Num(am.time_pct) << '\n';
    os << "am_energy_saving_pct," << Num(am.energy_pct) << '\n';

    // Fig-10-style extremes, ranked by the fraction of half-precision frames.
    if (!result.utterances.empty()) {
      const auto extreme = std::minmax_element(
          result.utterances.begin(), result.utterances.end(),
          [](const UtteranceResult &a, const UtteranceResult &b) {
            return a.HalfRatio() < b.HalfRatio();
          });
      const auto &worst = *extreme.first;
      const auto &best = *extreme.second;
      os << "best_utt," << best.id << '\n';
      os << "best_utt_half_ratio," << Num(best.HalfRatio()) << '\n';
      os << "best_utt_am_time_saving_pct,"
         << Num(cost::ComputeAmSavings(best.ledger, cfg.hw).time_pct) << '\n';
      os << "best_utt_am_energy_saving_pct,"
         << Num(cost::ComputeAmSavings(best.ledger, cfg.hw).energy_pct) << '\n';
      os << "worst_utt," << worst.id << '\n';
      os << "worst_utt_half_ratio," << Num(worst.HalfRatio()) << '\n';
      os << "worst_utt_am_time_saving_pct,"
         << Num(cost::ComputeAmSavings(worst.ledger, cfg.hw).time_pct) << '\n';
      os << "worst_utt_am_energy_saving_pct,"
         << Num(cost::ComputeAmSavings(worst.ledger, cfg.hw).energy_pct) << '\n';
    }

    if (baseline.has_value()) {
      cost::CostLedger base;  // only the totals matter for the deltas
      os << "baseline_total_time_s," << Num(baseline->total_time_s) << '\n';
      os << "baseline_total_energy_j," << Num(baseline->total_energy_j) << '\n';
      os << "sys_time_saving_pct,"
         << Num(100.0 * (1.0 - led.TotalTime() / baseline->total_time_s)) << '\n';
      os << "sys_energy_saving_pct,"
         << Num(100.0 * (1.0 - led.TotalEnergy() / baseline->total_energy_j))
         << '\n';
      (void)base;
    }
  }

  {
    auto os = OpenOut(fs::path(dir) / "controller_trace.csv");
    os << "# schema: dynprec.controller_trace v1\n";
    os << "frame,token_count,threshold,decision\n";
    std::int64_t frame = 0;
    for (const auto &utt : result.utterances) {
      for (const auto &f : utt.frames) {
        os << frame++ << ',' << f.tokens << ',' << f.threshold << ','
           << (f.mode == arith::Precision::kHalf ? "half" : "base") << '\n';
      }
    }
  }

  {
    auto os = OpenOut(fs::path(dir) / "config.json");
    os << config_echo_json;
    if (!config_echo_json.empty() && config_echo_json.back() != '\n') os << '\n';
  }
}

BaselineTotals ReadBaselineTotals(const std::string &run_dir) {
  const std::string path = (fs::path(run_dir) / "rollup.csv").string();
  const auto rows = ReadCsvRows(path);
  BaselineTotals totals;
  bool have_time = false, have_energy = false;
  for (const auto &row : rows) {
    if (row.size() != 2) continue;
    if (row[0] == "total_time_s") {
      totals.total_time_s = std::stod(row[1]);
      have_time = true;
    } else if (row[0] == "total_energy_j") {
      totals.total_energy_j = std::stod(row[1]);
      have_energy = true;
    }
  }
  if (!have_time || !have_energy) {
    throw ValidationError("baseline rollup lacks totals: " + path);
  }
  return totals;
}

void WriteSweepCsv(const std::string &path, const std::vector<SweepRow> &rows) {
  auto os = OpenOut(path);
  os << "# schema: dynprec.sweep v1\n";
  os << "target,achieved_ratio,wer,am_time_saving,am_energy_saving,"
        "sys_time_saving,sys_energy_saving\n";
  for (const auto &r : rows) {
    os << Num(r.target) << ',' << Num(r.achieved_ratio) << ',' << Num(r.wer)
       << ',' << Num(r.am_time_saving) << ',' << Num(r.am_energy_saving) << ','
       << Num(r.sys_time_saving) << ',' << Num(r.sys_energy_saving) << '\n';
  }
}

std::vector<TraceRow> ReadTrace(const std::string &run_dir) {
  const std::string path =
      (fs::path(run_dir) / "controller_trace.csv").string();
  const auto rows = ReadCsvRows(path);
  const int col_frame = ColumnIndex(rows[0], "frame", path);
  const int col_count = ColumnIndex(rows[0], "token_count", path);
  const int col_th = ColumnIndex(rows[0], "threshold", path);
  const int col_dec = ColumnIndex(rows[0], "decision", path);
  std::vector<TraceRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    TraceRow r;
    r.frame = std::stoll(rows[i][col_frame]);
    r.token_count = std::stoll(rows[i][col_count]);
    r.threshold = std::stoll(rows[i][col_th]);
    r.decision = rows[i][col_dec];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> ReadPerUtteranceHalfRatios(const std::string &run_dir) {
  const std::string path = (fs::path(run_dir) / "per_utterance.csv").string();
  const auto rows = ReadCsvRows(path);
  const int col = ColumnIndex(rows[0], "half_ratio", path);
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out.push_back(std::stod(rows[i][col]));
  }
  return out;
}

void WriteFigureData(const ReportInputs &inputs, const std::string &out_dir) {
  if (inputs.run_dir.empty()) {
    throw ValidationError("report: a run directory is required");
  }
  if (inputs.base_run_dir.empty() != inputs.half_run_dir.empty()) {
    throw ValidationError(
        "report: the base and half run directories must be given together");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create report directory: " + out_dir);

  const auto trace = ReadTrace(inputs.run_dir);
  {
    auto os = OpenOut(fs::path(out_dir) / "tokens_per_frame.csv");
    os << "# schema: dynprec.tokens_per_frame v1\n";
    os << "frame,token_count\n";
    for (const auto &r : trace) os << r.frame << ',' << r.token_count << '\n';
  }
  {
    auto os = OpenOut(fs::path(out_dir) / "threshold_trace.csv");
    os << "# schema: dynprec.threshold_trace v1\n";
    os << "frame,threshold\n";
    for (const auto &r : trace) os << r.frame << ',' << r.threshold << '\n';
  }
  {
    const auto ratios = ReadPerUtteranceHalfRatios(inputs.run_dir);
    auto os = OpenOut(fs::path(out_dir) / "half_ratio_hist.csv");
    os << "# schema: dynprec.half_ratio_hist v1\n";
    os << "bin_lo,bin_hi,utterances\n";
    constexpr int kBins = 20;
    std::array<int, kBins> hist{};
    for (const double r : ratios) {
      int b = static_cast<int>(r * kBins);
      if (b >= kBins) b = kBins - 1;
      if (b < 0) b = 0;
      ++hist[b];
    }
    for (int b = 0; b < kBins; ++b) {
      os << Num(static_cast<double>(b) / kBins) << ','
         << Num(static_cast<double>(b + 1) / kBins) << ',' << hist[b] << '\n';
    }
  }

  if (inputs.base_run_dir.empty()) return;

  auto base_counts = TraceCounts(inputs.base_run_dir);
  auto half_counts = TraceCounts(inputs.half_run_dir);
  std::sort(base_counts.begin(), base_counts.end());
  std::sort(half_counts.begin(), half_counts.end());

  {
    std::vector<std::int64_t> grid;
    grid.reserve(base_counts.size() + half_counts.size());
    grid.insert(grid.end(), base_counts.begin(), base_counts.end());
    grid.insert(grid.end(), half_counts.begin(), half_counts.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto cum = [](const std::vector<std::int64_t> &sorted, std::int64_t v) {
      const auto it = std::upper_bound(sorted.begin(), sorted.end(), v);
      return static_cast<double>(it - sorted.begin()) /
             static_cast<double>(sorted.size());
    };
    auto os = OpenOut(fs::path(out_dir) / "token_count_cum_freq.csv");
    os << "# schema: dynprec.token_count_cum_freq v1\n";
    os << "tokens,cum_freq_base,cum_freq_half\n";
    for (const auto v : grid) {
      os << v << ',' << Num(cum(base_counts, v)) << ','
         << Num(cum(half_counts, v)) << '\n';
    }
  }
  {
    auto os = OpenOut(fs::path(out_dir) / "threshold_discrepancy.csv");
    os << "# schema: dynprec.threshold_discrepancy v1\n";
    os << "percentile,threshold_tokens,selected_ratio_base,selected_ratio_half\n";
    for (const double pct : {30.0, 50.0, 70.0}) {
      const std::int64_t th = Percentile(base_counts, pct);
      os << Num(pct) << ',' << th << ',' << Num(FractionBelow(base_counts, th))
         << ',' << Num(FractionBelow(half_counts, th)) << '\n';
    }
  }
}

}  // namespace pipeline
}  // namespace dynprec

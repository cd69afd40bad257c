#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsebench/quality.hpp"
#include "pulsebench/restore.hpp"
#include "pulsebench/rppg.hpp"
#include "pulsebench/types.hpp"

namespace pulsebench {

struct ConfigError : Error { using Error::Error; };

struct PipelineConfig {
  // [input]
  std::string input_root;
  std::vector<std::string> videos;  // subdirectory names; empty = scan root
  double fps = 20.0;
  // [protocol]
  double segment_seconds = 16.0;
  double target_fps = 20.0;
  double band_low = 0.75;
  double band_high = 2.5;
  // [degrade]
  std::string degrade_kind = "none";  // none|blur|noise|eyemask|facemask
  double blur_sigma = 2.5;
  int blur_kernel = 15;
  double noise_sigma = 10.0;
  std::uint64_t degrade_seed = 7;
  // [restore]
  std::string restore_kind = "none";  // none|nlm|fmm
  NlmParams nlm;
  FmmParams fmm;
  // [rppg]
  std::vector<std::string> methods{"green", "ica", "chrom", "pbv", "pos", "lgi"};
  std::uint64_t ica_seed = 42;
  IcaSelect ica_select = IcaSelect::Second;
  // [output]
  std::string output_dir = "out";
};

struct VideoRow {
  std::string video;
  std::string method;
  double predicted_bpm = 0;
  double reference_bpm = 0;
  std::string error_code;  // empty on success
};

struct QualityRow {
  std::string video;
  double psnr_db = 0;
  double ssim = 0;
};

struct AggregateRow {
  std::string method;
  ErrorReport errors;
};

struct RunReport {
  PipelineConfig config;
  std::vector<VideoRow> rows;
  std::vector<QualityRow> quality;  // empty when degrade_kind == none
  std::vector<AggregateRow> aggregates;
  bool any_failures = false;
};

// INI-style config: [section] headers, key = value lines, '#'/';' comments.
PipelineConfig parse_config(const std::string& path);

// Full batch: per video, segment -> degrade -> restore -> trace -> resample
// -> transforms -> band-pass -> HR, plus reference HR and image quality.
// Per-video failures become error rows; the batch continues.
RunReport run_pipeline(const PipelineConfig& config);

// Writes per_video.csv, aggregate.csv, quality.csv, manifest.txt.
// Re-reads per_video.csv and verifies the aggregates reproduce exactly.
void emit_report(const RunReport& report, const std::string& out_dir);

// 0 full success, 2 partial per-video failures.
int report_exit_code(const RunReport& report);

const char* version_string();

}  // namespace pulsebench

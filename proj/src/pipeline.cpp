#include "pulsebench/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "pulsebench/degrade.hpp"
#include "pulsebench/media.hpp"
#include "pulsebench/rng.hpp"
#include "pulsebench/signal.hpp"

namespace fs = std::filesystem;

namespace pulsebench {

namespace {

std::string fmt6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<std::string> kAllMethods{"green", "ica", "chrom",
                                           "pbv",   "pos", "lgi"};

struct VideoOutcome {
  std::vector<VideoRow> rows;
  bool has_quality = false;
  QualityRow quality;
};

RgbTrace resample_trace(const RgbTrace& trace, double target_fps) {
  if (trace.fps == target_fps) return trace;
  const std::size_t m = static_cast<std::size_t>(std::llround(
      static_cast<double>(trace.samples.size()) * target_fps / trace.fps));
  RgbTrace out;
  out.fps = target_fps;
  out.samples.resize(m);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> col(trace.samples.size());
    for (std::size_t t = 0; t < col.size(); ++t) col[t] = trace.samples[t][c];
    auto res = fourier_resample(col, m);
    for (std::size_t t = 0; t < m; ++t) out.samples[t][c] = res[t];
  }
  return out;
}

double reference_bpm(const ReferenceSignal& ref, const PipelineConfig& cfg) {
  auto [lo, hi] = segment_range(ref.samples.size(), ref.sample_rate,
                                cfg.segment_seconds);
  if (ref.kind == SignalKind::HrSeriesBpm) {
    double sum = 0;
    for (std::size_t i = lo; i < hi; ++i) sum += ref.samples[i];
    return sum / static_cast<double>(hi - lo);
  }
  ReferenceSignal seg;
  seg.kind = ref.kind;
  seg.sample_rate = ref.sample_rate;
  seg.samples.assign(ref.samples.begin() + static_cast<long>(lo),
                     ref.samples.begin() + static_cast<long>(hi));
  ReferenceSignal res = fourier_resample(seg, cfg.target_fps);
  PulseSignal sig;
  sig.samples = standardize(res.samples);
  sig.fps = res.sample_rate;
  sig = butterworth_bandpass(sig, cfg.band_low, cfg.band_high);
  return estimate_hr(sig, cfg.band_low, cfg.band_high).bpm;
}

VideoOutcome process_video(const PipelineConfig& cfg, const std::string& video) {
  VideoOutcome outcome;
  const fs::path dir = fs::path(cfg.input_root) / video;

  FrameSequence seq = load_frame_sequence(dir.string(), cfg.fps);
  std::vector<LandmarkSet> landmarks;
  if (cfg.degrade_kind == "eyemask" || cfg.degrade_kind == "facemask")
    landmarks = load_landmarks((dir / "landmarks.csv").string());
  ReferenceSignal ref = load_reference((dir / "reference.csv").string());

  auto [lo, hi] = segment_range(seq.frames.size(), seq.fps, cfg.segment_seconds);
  FrameSequence clean;
  clean.fps = seq.fps;
  clean.source_id = video;
  clean.frames.assign(seq.frames.begin() + static_cast<long>(lo),
                      seq.frames.begin() + static_cast<long>(hi));
  seq.frames.clear();

  // Degrade.
  FrameSequence stage = clean;
  std::vector<MaskImage> masks;
  const bool mask_kind =
      cfg.degrade_kind == "eyemask" || cfg.degrade_kind == "facemask";
  if (cfg.degrade_kind == "blur") {
    BlurParams bp{cfg.blur_sigma, cfg.blur_kernel};
    for (auto& f : stage.frames) f = blur(f, bp);
  } else if (cfg.degrade_kind == "noise") {
    for (std::size_t i = 0; i < stage.frames.size(); ++i)
      stage.frames[i] = add_noise(
          stage.frames[i], NoiseParams{cfg.noise_sigma, mix_seed(cfg.degrade_seed, i)});
  } else if (mask_kind) {
    if (landmarks.size() < hi)
      throw WrongPointCount("fewer landmark frames than video frames");
    for (std::size_t i = 0; i < stage.frames.size(); ++i) {
      const LandmarkSet& lm = landmarks[lo + i];
      auto [masked, mask] =
          cfg.degrade_kind == "eyemask"
              ? apply_mask(stage.frames[i], eyemask_geometry(lm))
              : apply_mask(stage.frames[i], facemask_geometry(lm));
      stage.frames[i] = std::move(masked);
      masks.push_back(std::move(mask));
    }
  } else if (cfg.degrade_kind != "none") {
    throw ConfigError("unknown degradation kind: " + cfg.degrade_kind);
  }

  // Restore.
  if (cfg.restore_kind == "nlm") {
    NlmParams np = cfg.nlm;
    if (cfg.degrade_kind == "noise" && np.sigma_hat == 0.0)
      np.sigma_hat = cfg.noise_sigma;
    for (auto& f : stage.frames) f = nlm_denoise(f, np);
  } else if (cfg.restore_kind == "fmm") {
    for (std::size_t i = 0; i < stage.frames.size(); ++i) {
      const MaskImage mask = i < masks.size()
                                 ? masks[i]
                                 : infer_mask_from_white(stage.frames[i]);
      stage.frames[i] = fmm_inpaint(stage.frames[i], mask, cfg.fmm);
    }
  } else if (cfg.restore_kind != "none") {
    throw ConfigError("unknown restoration kind: " + cfg.restore_kind);
  }

  // Image quality of the processed frames against the clean segment.
  if (cfg.degrade_kind != "none") {
    double psnr_sum = 0, ssim_sum = 0;
    for (std::size_t i = 0; i < stage.frames.size(); ++i) {
      psnr_sum += psnr(clean.frames[i], stage.frames[i]);
      ssim_sum += ssim(clean.frames[i], stage.frames[i]);
    }
    outcome.quality = {video, psnr_sum / stage.frames.size(),
                       ssim_sum / stage.frames.size()};
    outcome.has_quality = true;
  }

  // Masked pixels are excluded from the trace only while they remain
  // occluded (no inpainting restored them).
  const std::vector<MaskImage>* mask_ptr =
      (mask_kind && cfg.restore_kind == "none") ? &masks : nullptr;
  RgbTrace trace = extract_trace(stage, mask_ptr);
  trace = resample_trace(trace, cfg.target_fps);

  const double ref_bpm = reference_bpm(ref, cfg);
  for (const auto& method : cfg.methods) {
    VideoRow row;
    row.video = video;
    row.method = method;
    row.reference_bpm = ref_bpm;
    try {
      PulseSignal sig = apply_method(method, trace, cfg.ica_seed, cfg.ica_select);
      sig = butterworth_bandpass(sig, cfg.band_low, cfg.band_high);
      row.predicted_bpm = estimate_hr(sig, cfg.band_low, cfg.band_high).bpm;
    } catch (const Error& e) {
      row.error_code = e.what();
    }
    outcome.rows.push_back(std::move(row));
  }
  return outcome;
}

std::vector<AggregateRow> compute_aggregates(const std::vector<VideoRow>& rows,
                                             const std::vector<std::string>& methods) {
  std::vector<AggregateRow> aggs;
  for (const auto& method : methods) {
    std::vector<double> pred, ref;
    for (const auto& r : rows)
      if (r.method == method && r.error_code.empty()) {
        pred.push_back(r.predicted_bpm);
        ref.push_back(r.reference_bpm);
      }
    if (pred.empty()) continue;
    aggs.push_back({method, hr_errors(pred, ref)});
  }
  return aggs;
}

}  // namespace

PipelineConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  PipelineConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;
    try {
      if (qualified == "input.root") cfg.input_root = value;
      else if (qualified == "input.videos") cfg.videos = split_list(value);
      else if (qualified == "input.fps") cfg.fps = std::stod(value);
      else if (qualified == "protocol.segment_seconds") cfg.segment_seconds = std::stod(value);
      else if (qualified == "protocol.target_fps") cfg.target_fps = std::stod(value);
      else if (qualified == "protocol.band_low") cfg.band_low = std::stod(value);
      else if (qualified == "protocol.band_high") cfg.band_high = std::stod(value);
      else if (qualified == "degrade.kind") cfg.degrade_kind = value;
      else if (qualified == "degrade.blur_sigma") cfg.blur_sigma = std::stod(value);
      else if (qualified == "degrade.blur_kernel") cfg.blur_kernel = std::stoi(value);
      else if (qualified == "degrade.noise_sigma") cfg.noise_sigma = std::stod(value);
      else if (qualified == "degrade.seed") cfg.degrade_seed = std::stoull(value);
      else if (qualified == "restore.kind") cfg.restore_kind = value;
      else if (qualified == "restore.h") cfg.nlm.h = std::stod(value);
      else if (qualified == "restore.patch_radius") cfg.nlm.patch_radius = std::stoi(value);
      else if (qualified == "restore.search_radius") cfg.nlm.search_radius = std::stoi(value);
      else if (qualified == "restore.sigma_hat") cfg.nlm.sigma_hat = std::stod(value);
      else if (qualified == "restore.epsilon") cfg.fmm.epsilon = std::stod(value);
      else if (qualified == "rppg.methods") cfg.methods = split_list(value);
      else if (qualified == "rppg.ica_seed") cfg.ica_seed = std::stoull(value);
      else if (qualified == "rppg.ica_select") {
        if (value == "second") cfg.ica_select = IcaSelect::Second;
        else if (value == "periodic") cfg.ica_select = IcaSelect::Periodic;
        else throw ConfigError("ica_select must be second|periodic");
      }
      else if (qualified == "output.dir") cfg.output_dir = value;
      else throw ConfigError("unknown config key: " + qualified);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for " +
                        qualified);
    }
  }
  if (cfg.input_root.empty()) throw ConfigError("input.root is required");
  for (const auto& m : cfg.methods)
    if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end())
      throw ConfigError("unknown rPPG method: " + m);
  return cfg;
}

RunReport run_pipeline(const PipelineConfig& config) {
  RunReport report;
  report.config = config;

  std::vector<std::string> videos = config.videos;
  if (videos.empty()) {
    for (const auto& entry : fs::directory_iterator(config.input_root))
      if (entry.is_directory()) videos.push_back(entry.path().filename().string());
    std::sort(videos.begin(), videos.end());
  }

  for (const auto& video : videos) {
    try {
      VideoOutcome outcome = process_video(config, video);
      for (auto& row : outcome.rows) {
        if (!row.error_code.empty()) report.any_failures = true;
        report.rows.push_back(std::move(row));
      }
      if (outcome.has_quality) report.quality.push_back(outcome.quality);
    } catch (const Error& e) {
      report.any_failures = true;
      for (const auto& method : config.methods)
        report.rows.push_back({video, method, 0, 0, e.what()});
    }
  }
  report.aggregates = compute_aggregates(report.rows, config.methods);
  return report;
}

void emit_report(const RunReport& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const std::string deg = report.config.degrade_kind;
  const std::string res = report.config.restore_kind;

  {
    std::ofstream out(fs::path(out_dir) / "per_video.csv");
    if (!out) throw IoFailure("cannot write per_video.csv");
    out << "video,method,degradation,restoration,predicted_bpm,reference_bpm,error_code\n";
    for (const auto& r : report.rows) {
      out << r.video << ',' << r.method << ',' << deg << ',' << res << ',';
      if (r.error_code.empty())
        out << fmt6(r.predicted_bpm) << ',' << fmt6(r.reference_bpm) << ",\n";
      else
        out << ",," << r.error_code << "\n";
    }
  }
  // aggregate.csv is derived from the BPM values as written (6 decimals) so
  // the file re-aggregates to itself exactly.
  std::vector<VideoRow> rounded = report.rows;
  for (auto& r : rounded)
    if (r.error_code.empty()) {
      r.predicted_bpm = std::stod(fmt6(r.predicted_bpm));
      r.reference_bpm = std::stod(fmt6(r.reference_bpm));
    }
  const auto written = compute_aggregates(rounded, report.config.methods);
  {
    std::ofstream out(fs::path(out_dir) / "aggregate.csv");
    if (!out) throw IoFailure("cannot write aggregate.csv");
    out << "method,degradation,restoration,n,mae,rmse,mape\n";
    for (const auto& a : written)
      out << a.method << ',' << deg << ',' << res << ',' << a.errors.n << ','
          << fmt6(a.errors.mae) << ',' << fmt6(a.errors.rmse) << ','
          << fmt6(a.errors.mape) << "\n";
  }
  {
    std::ofstream out(fs::path(out_dir) / "quality.csv");
    if (!out) throw IoFailure("cannot write quality.csv");
    out << "video,degradation,restoration,psnr_db,ssim\n";
    double psum = 0, ssum = 0;
    for (const auto& q : report.quality) {
      out << q.video << ',' << deg << ',' << res << ',' << fmt6(q.psnr_db) << ','
          << fmt6(q.ssim) << "\n";
      psum += q.psnr_db;
      ssum += q.ssim;
    }
    if (!report.quality.empty())
      out << "ALL," << deg << ',' << res << ','
          << fmt6(psum / report.quality.size()) << ','
          << fmt6(ssum / report.quality.size()) << "\n";
  }
  {
    const auto& c = report.config;
    std::ofstream out(fs::path(out_dir) / "manifest.txt");
    if (!out) throw IoFailure("cannot write manifest.txt");
    out << "pulsebench " << version_string() << "\n";
    out << "input.root = " << c.input_root << "\n";
    out << "input.fps = " << fmt6(c.fps) << "\n";
    out << "protocol.segment_seconds = " << fmt6(c.segment_seconds) << "\n";
    out << "protocol.target_fps = " << fmt6(c.target_fps) << "\n";
    out << "protocol.band_low = " << fmt6(c.band_low) << "\n";
    out << "protocol.band_high = " << fmt6(c.band_high) << "\n";
    out << "degrade.kind = " << c.degrade_kind << "\n";
    out << "degrade.blur_sigma = " << fmt6(c.blur_sigma) << "\n";
    out << "degrade.blur_kernel = " << c.blur_kernel << "\n";
    out << "degrade.noise_sigma = " << fmt6(c.noise_sigma) << "\n";
    out << "degrade.seed = " << c.degrade_seed << "\n";
    out << "restore.kind = " << c.restore_kind << "\n";
    out << "restore.h = " << fmt6(c.nlm.h) << "\n";
    out << "restore.patch_radius = " << c.nlm.patch_radius << "\n";
    out << "restore.search_radius = " << c.nlm.search_radius << "\n";
    out << "restore.sigma_hat = " << fmt6(c.nlm.sigma_hat) << "\n";
    out << "restore.epsilon = " << fmt6(c.fmm.epsilon) << "\n";
    out << "rppg.methods =";
    for (const auto& m : c.methods) out << ' ' << m;
    out << "\n";
    out << "rppg.ica_seed = " << c.ica_seed << "\n";
    out << "rppg.ica_select = "
        << (c.ica_select == IcaSelect::Second ? "second" : "periodic") << "\n";
  }

  // Self-consistency: re-read per_video.csv and re-derive the aggregates.
  std::vector<VideoRow> reread;
  {
    std::ifstream in(fs::path(out_dir) / "per_video.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string f[7];
      for (int i = 0; i < 7; ++i) std::getline(row, f[i], ',');
      VideoRow r;
      r.video = f[0];
      r.method = f[1];
      r.error_code = f[6];
      if (r.error_code.empty() && !f[4].empty()) {
        r.predicted_bpm = std::stod(f[4]);
        r.reference_bpm = std::stod(f[5]);
      } else if (r.error_code.empty()) {
        r.error_code = "unparsed";
      }
      reread.push_back(std::move(r));
    }
  }
  const auto rederived = compute_aggregates(reread, report.config.methods);
  if (rederived.size() != written.size())
    throw IoFailure("aggregate re-derivation check failed (row count)");
  for (std::size_t i = 0; i < rederived.size(); ++i) {
    const auto& a = written[i];
    const auto& b = rederived[i];
    if (a.method != b.method || a.errors.n != b.errors.n ||
        fmt6(a.errors.mae) != fmt6(b.errors.mae) ||
        fmt6(a.errors.rmse) != fmt6(b.errors.rmse) ||
        fmt6(a.errors.mape) != fmt6(b.errors.mape))
      throw IoFailure("aggregate re-derivation check failed at row " +
                      std::to_string(i));
  }
}

int report_exit_code(const RunReport& report) {
  return report.any_failures ? 2 : 0;
}

const char* version_string() { return "0.1.0"; }

}  // namespace pulsebench

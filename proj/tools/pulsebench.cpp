#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pulsebench/degrade.hpp"
#include "pulsebench/media.hpp"
#include "pulsebench/pipeline.hpp"
#include "pulsebench/quality.hpp"
#include "pulsebench/restore.hpp"
#include "pulsebench/rng.hpp"
#include "pulsebench/rppg.hpp"
#include "pulsebench/signal.hpp"
#include "pulsebench/synth.hpp"

namespace pb = pulsebench;

namespace {

std::vector<pb::MaskImage> load_masks_if_present(const std::string& dir,
                                                 std::size_t count) {
  std::vector<pb::MaskImage> masks;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string path = dir + "/" + pb::mask_filename(i);
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) {
      if (i == 0) return {};
      throw pb::MissingFrame("mask sequence has a gap at index " +
                             std::to_string(i));
    }
    std::fclose(f);
    masks.push_back(pb::load_pbm(path));
  }
  return masks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulsebench: remote photoplethysmography benchmark pipeline"};
  app.require_subcommand(1);

  // --- synth ---
  auto* synth = app.add_subcommand("synth", "generate a synthetic pulsatile video");
  std::string synth_out;
  pb::SynthSpec spec;
  synth->add_option("--out", synth_out, "output video directory")->required();
  synth->add_option("--seconds,--duration", spec.duration_s, "seconds");
  synth->add_option("--fps", spec.fps, "frames per second");
  synth->add_option("--side", spec.side, "frame side, pixels");
  synth->add_option("--bpm", spec.pulse_bpm, "pulse rate, BPM");
  synth->add_option("--texture-sigma", spec.texture_sigma, "static texture std");
  synth->add_option("--sensor-noise", spec.sensor_noise_sigma, "per-frame noise std");
  synth->add_option("--drift-amplitude", spec.drift_amplitude);
  synth->add_option("--drift-freq", spec.drift_freq_hz);
  synth->add_option("--seed", spec.seed, "RNG seed");

  // --- degrade ---
  auto* degrade = app.add_subcommand("degrade", "apply a controlled degradation");
  std::string deg_in, deg_out, deg_kind;
  double deg_fps = 20.0;
  pb::BlurParams blur_params;
  double deg_noise_sigma = 10.0;
  std::uint64_t deg_seed = 7;
  degrade->add_option("--in", deg_in, "input video directory")->required();
  degrade->add_option("--out", deg_out, "output video directory")->required();
  degrade->add_option("--kind", deg_kind, "blur|noise|eyemask|facemask")->required();
  degrade->add_option("--fps", deg_fps);
  degrade->add_option("--blur-sigma", blur_params.sigma);
  degrade->add_option("--kernel", blur_params.kernel_size);
  degrade->add_option("--noise-sigma", deg_noise_sigma);
  degrade->add_option("--seed", deg_seed);

  // --- restore ---
  auto* restore = app.add_subcommand("restore", "denoise or inpaint a video");
  std::string res_in, res_out, res_kind;
  double res_fps = 20.0;
  pb::NlmParams nlm_params;
  pb::FmmParams fmm_params;
  restore->add_option("--in", res_in, "input video directory")->required();
  restore->add_option("--out", res_out, "output video directory")->required();
  restore->add_option("--kind", res_kind, "nlm|fmm")->required();
  restore->add_option("--fps", res_fps);
  restore->add_option("--strength", nlm_params.h, "NLM filtering strength h");
  restore->add_option("--patch-radius", nlm_params.patch_radius);
  restore->add_option("--search-radius", nlm_params.search_radius);
  restore->add_option("--sigma-hat", nlm_params.sigma_hat);
  restore->add_option("--epsilon", fmm_params.epsilon, "FMM neighborhood radius");

  // --- extract ---
  auto* extract = app.add_subcommand("extract", "frames -> pulse signal CSV");
  std::string ext_in, ext_out, ext_method = "pos", ext_select = "second";
  double ext_fps = 20.0, ext_target = 20.0;
  std::uint64_t ext_seed = 42;
  bool ext_masks = false;
  extract->add_option("--in", ext_in, "input video directory")->required();
  extract->add_option("--out", ext_out, "output pulse CSV")->required();
  extract->add_option("--method", ext_method, "green|ica|chrom|pbv|pos|lgi");
  extract->add_option("--fps", ext_fps);
  extract->add_option("--target-fps", ext_target);
  extract->add_option("--ica-seed", ext_seed);
  extract->add_option("--ica-select", ext_select, "second|periodic");
  extract->add_flag("--use-masks", ext_masks, "exclude masked pixels");

  // --- hr ---
  auto* hr = app.add_subcommand("hr", "pulse CSV -> heart rate estimate");
  std::string hr_in;
  double hr_low = 0.75, hr_high = 2.5;
  hr->add_option("--in", hr_in, "pulse CSV")->required();
  hr->add_option("--band-low", hr_low, "Hz");
  hr->add_option("--band-high", hr_high, "Hz");

  // --- quality ---
  auto* quality = app.add_subcommand("quality", "PSNR/SSIM between two videos");
  std::string q_ref, q_test;
  quality->add_option("--ref", q_ref, "reference video directory")->required();
  quality->add_option("--test", q_test, "test video directory")->required();

  // --- run ---
  auto* run = app.add_subcommand("run", "full batch from a config file");
  std::string run_config, run_out_override;
  run->add_option("--config", run_config, "INI config")->required();
  run->add_option("--out", run_out_override, "override output directory");

  // --- version ---
  auto* version = app.add_subcommand("version", "print version");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*version) {
      std::printf("pulsebench %s\n", pb::version_string());
      return 0;
    }
    if (*synth) {
      pb::SynthOutput out = pb::generate(spec);
      pb::save_frame_sequence(out.frames, synth_out);
      pb::save_reference(out.reference, synth_out + "/reference.csv");
      std::vector<pb::LandmarkSet> per_frame(out.frames.frames.size(),
                                             out.landmarks);
      pb::save_landmarks(per_frame, synth_out + "/landmarks.csv");
      std::printf("wrote %zu frames to %s\n", out.frames.frames.size(),
                  synth_out.c_str());
      return 0;
    }
    if (*degrade) {
      pb::FrameSequence seq = pb::load_frame_sequence(deg_in, deg_fps);
      std::vector<pb::LandmarkSet> landmarks;
      const bool mask_kind = deg_kind == "eyemask" || deg_kind == "facemask";
      if (mask_kind) landmarks = pb::load_landmarks(deg_in + "/landmarks.csv");
      pb::FrameSequence out = seq;
      std::vector<pb::MaskImage> masks;
      for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        if (deg_kind == "blur") {
          out.frames[i] = pb::blur(seq.frames[i], blur_params);
        } else if (deg_kind == "noise") {
          out.frames[i] = pb::add_noise(
              seq.frames[i],
              pb::NoiseParams{deg_noise_sigma, pb::mix_seed(deg_seed, i)});
        } else if (mask_kind) {
          if (i >= landmarks.size())
            throw pb::WrongPointCount("fewer landmark frames than video frames");
          auto [masked, mask] =
              deg_kind == "eyemask"
                  ? pb::apply_mask(seq.frames[i], pb::eyemask_geometry(landmarks[i]))
                  : pb::apply_mask(seq.frames[i], pb::facemask_geometry(landmarks[i]));
          out.frames[i] = std::move(masked);
          masks.push_back(std::move(mask));
        } else {
          throw pb::ConfigError("unknown degradation kind: " + deg_kind);
        }
      }
      pb::save_frame_sequence(out, deg_out);
      for (std::size_t i = 0; i < masks.size(); ++i)
        pb::save_pbm(masks[i], deg_out + "/" + pb::mask_filename(i));
      std::printf("wrote %zu frames to %s\n", out.frames.size(), deg_out.c_str());
      return 0;
    }
    if (*restore) {
      pb::FrameSequence seq = pb::load_frame_sequence(res_in, res_fps);
      pb::FrameSequence out = seq;
      if (res_kind == "nlm") {
        for (auto& f : out.frames) f = pb::nlm_denoise(f, nlm_params);
      } else if (res_kind == "fmm") {
        auto masks = load_masks_if_present(res_in, seq.frames.size());
        for (std::size_t i = 0; i < out.frames.size(); ++i) {
          const pb::MaskImage mask = masks.empty()
                                         ? pb::infer_mask_from_white(out.frames[i])
                                         : masks[i];
          out.frames[i] = pb::fmm_inpaint(out.frames[i], mask, fmm_params);
        }
      } else {
        throw pb::ConfigError("unknown restoration kind: " + res_kind);
      }
      pb::save_frame_sequence(out, res_out);
      std::printf("wrote %zu frames to %s\n", out.frames.size(), res_out.c_str());
      return 0;
    }
    if (*extract) {
      pb::FrameSequence seq = pb::load_frame_sequence(ext_in, ext_fps);
      auto masks = load_masks_if_present(ext_in, ext_masks ? seq.frames.size() : 0);
      if (ext_masks && masks.empty())
        throw pb::MissingFrame("--use-masks given but no mask files found");
      pb::RgbTrace trace = pb::extract_trace(seq, ext_masks ? &masks : nullptr);
      if (trace.fps != ext_target) {
        std::vector<std::array<double, 3>> resampled;
        const std::size_t m = static_cast<std::size_t>(std::llround(
            static_cast<double>(trace.samples.size()) * ext_target / trace.fps));
        resampled.resize(m);
        for (int c = 0; c < 3; ++c) {
          std::vector<double> col(trace.samples.size());
          for (std::size_t t = 0; t < col.size(); ++t) col[t] = trace.samples[t][c];
          auto rc = pb::fourier_resample(col, m);
          for (std::size_t t = 0; t < m; ++t) resampled[t][c] = rc[t];
        }
        trace.samples = std::move(resampled);
        trace.fps = ext_target;
      }
      const pb::IcaSelect select = ext_select == "periodic"
                                       ? pb::IcaSelect::Periodic
                                       : pb::IcaSelect::Second;
      pb::PulseSignal sig = pb::apply_method(ext_method, trace, ext_seed, select);
      pb::save_pulse_csv(sig, ext_out);
      std::printf("wrote %zu samples to %s\n", sig.samples.size(), ext_out.c_str());
      return 0;
    }
    if (*hr) {
      pb::PulseSignal sig = pb::load_pulse_csv(hr_in);
      sig = pb::butterworth_bandpass(sig, hr_low, hr_high);
      pb::HrEstimate est = pb::estimate_hr(sig, hr_low, hr_high);
      std::printf("bpm=%.6f peak_freq=%.6f snr_db=%.6f\n", est.bpm,
                  est.peak_freq, est.spectrum_snr);
      return 0;
    }
    if (*quality) {
      pb::FrameSequence ref = pb::load_frame_sequence(q_ref, 1.0);
      pb::FrameSequence test = pb::load_frame_sequence(q_test, 1.0);
      if (ref.frames.size() != test.frames.size())
        throw pb::DimensionMismatch("videos have different frame counts");
      double psum = 0, ssum = 0;
      for (std::size_t i = 0; i < ref.frames.size(); ++i) {
        psum += pb::psnr(ref.frames[i], test.frames[i]);
        ssum += pb::ssim(ref.frames[i], test.frames[i]);
      }
      std::printf("psnr_db=%.6f ssim=%.6f n=%zu\n", psum / ref.frames.size(),
                  ssum / ref.frames.size(), ref.frames.size());
      return 0;
    }
    if (*run) {
      pb::PipelineConfig cfg = pb::parse_config(run_config);
      if (!run_out_override.empty()) cfg.output_dir = run_out_override;
      pb::RunReport report = pb::run_pipeline(cfg);
      pb::emit_report(report, cfg.output_dir);
      std::printf("processed %zu rows, %zu aggregates -> %s\n",
                  report.rows.size(), report.aggregates.size(),
                  cfg.output_dir.c_str());
      return pb::report_exit_code(report);
    }
  } catch (const pb::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pulsebench/types.hpp"

namespace pulsebench {

struct AllMaskedFirstFrame : Error { using Error::Error; };
struct ConstantChannel : Error { using Error::Error; };
struct ZeroMeanChannel : Error { using Error::Error; };
struct SingularGram : Error { using Error::Error; };

// Normalized blood-volume signature; unit norm, all components positive.
class PbvVector {
 public:
  explicit PbvVector(const std::array<double, 3>& p);
  static PbvVector normalized(double r, double g, double b);
  static const PbvVector& standard();  // (0.33, 0.77, 0.53) normalized
  const std::array<double, 3>& get() const { return p_; }

 private:
  std::array<double, 3> p_;
};

enum class IcaSelect { Second, Periodic };

// Per-frame channel means over non-masked pixels; a fully masked frame
// carries the previous frame's value forward.
RgbTrace extract_trace(const FrameSequence& seq,
                       const std::vector<MaskImage>* masks = nullptr);

// Green channel, mean-subtracted, band-passed 0.75-4 Hz.
PulseSignal green(const RgbTrace& trace);

// FastICA (cubic nonlinearity, deflation) on standardized channels; the
// extracted components are ordered by descending energy in channel space and
// the second is returned (or the most in-band-periodic one with Periodic).
PulseSignal ica(const RgbTrace& trace, std::uint64_t seed,
                IcaSelect select = IcaSelect::Second);

// Chrominance projection X = 3Rn-2Gn, Y = 1.5Rn+Gn-1.5Bn; S = Xf - alpha*Yf.
PulseSignal chrom(const RgbTrace& trace);

// Blood-volume signature projection: solve (Cn*Cn^T) w = p, S = w^T Cn.
PulseSignal pbv(const RgbTrace& trace,
                const PbvVector& signature = PbvVector::standard());

// Plane-orthogonal-to-skin with 1.6 s sliding windows, overlap-add.
PulseSignal pos(const RgbTrace& trace);

// Projects out the leading singular direction of the mean-centered trace and
// returns the green component, unit-variance scaled.
PulseSignal lgi(const RgbTrace& trace);

using RppgMethod = PulseSignal (*)(const RgbTrace&);

// Applies a method by name ("green","ica","chrom","pbv","pos","lgi").
PulseSignal apply_method(const std::string& name, const RgbTrace& trace,
                         std::uint64_t ica_seed,
                         IcaSelect ica_select = IcaSelect::Second);

}  // namespace pulsebench

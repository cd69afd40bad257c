#pragma once

#include <string>
#include <vector>

#include "pulsebench/types.hpp"

namespace pulsebench {

struct MissingFrame : Error { using Error::Error; };
struct MalformedPixmap : Error { using Error::Error; };
struct WrongPointCount : Error { using Error::Error; };
struct NonMonotonicFrames : Error { using Error::Error; };
struct NonUniformSampling : Error { using Error::Error; };
struct EmptySignal : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// Binary NetPBM P6, maxval 255. Byte-exact round trip.
Frame load_ppm(const std::string& path);
void save_ppm(const Frame& frame, const std::string& path);

// Binary NetPBM P4 bitmap for occlusion masks (1 = occluded).
MaskImage load_pbm(const std::string& path);
void save_pbm(const MaskImage& mask, const std::string& path);

// Directory of frame_%06d.ppm, consecutive from index 0.
FrameSequence load_frame_sequence(const std::string& dir_path, double fps);
void save_frame_sequence(const FrameSequence& seq, const std::string& dir_path);

std::string frame_filename(std::size_t index);
std::string mask_filename(std::size_t index);

// CSV "frame,idx,x,y", 68 rows per frame, frames consecutive from 0.
// Coordinates written with 4 decimal places.
std::vector<LandmarkSet> load_landmarks(const std::string& file_path);
void save_landmarks(const std::vector<LandmarkSet>& sets, const std::string& file_path);

// CSV "t,value" preceded by a "# kind=BVP" or "# kind=HR" line.
// Sample rate inferred as 1/median(dt); spacing must be uniform to 1e-6.
ReferenceSignal load_reference(const std::string& file_path);
void save_reference(const ReferenceSignal& sig, const std::string& file_path);

// CSV "t,value" preceded by "# kind=PULSE"; rate inferred like load_reference.
PulseSignal load_pulse_csv(const std::string& file_path);
void save_pulse_csv(const PulseSignal& sig, const std::string& file_path);

}  // namespace pulsebench

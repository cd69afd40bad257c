#include "pulsebench/media.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace pulsebench {

namespace {

// Skips whitespace and '#' comments, then reads one unsigned integer.
int read_pnm_int(std::istream& in, const std::string& path) {
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (!std::isspace(ch)) {
      break;
    }
  }
  if (ch == EOF || !std::isdigit(ch))
    throw MalformedPixmap("malformed pixmap header: " + path);
  int value = ch - '0';
  while ((ch = in.peek()) != EOF && std::isdigit(ch)) {
    value = value * 10 + (in.get() - '0');
    if (value > 1000000) throw MalformedPixmap("header value overflow: " + path);
  }
  return value;
}

std::vector<double> parse_csv_signal(const std::string& path, std::string* kind_out) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  std::string line;
  std::vector<double> ts, vs;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("kind=");
      if (pos != std::string::npos && kind_out)
        *kind_out = line.substr(pos + 5);
      continue;
    }
    if (!header_seen) {  // "t,value"
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw IoFailure("malformed signal row in " + path + ": " + line);
    ts.push_back(std::stod(a));
    vs.push_back(std::stod(b));
  }
  if (vs.size() < 2) throw EmptySignal("need >= 2 samples in " + path);

  std::vector<double> dts(ts.size() - 1);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    dts[i] = ts[i + 1] - ts[i];
    if (dts[i] <= 0.0) throw NonUniformSampling("non-increasing t in " + path);
  }
  std::vector<double> sorted = dts;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double median = sorted[sorted.size() / 2];
  for (double dt : dts)
    if (std::abs(dt - median) > 1e-6 * median)
      throw NonUniformSampling("non-uniform sampling in " + path);
  if (kind_out) {
    // trim trailing whitespace/CR
    while (!kind_out->empty() && std::isspace(static_cast<unsigned char>(kind_out->back())))
      kind_out->pop_back();
  }
  vs.push_back(1.0 / median);  // rate carried in last slot, popped by caller
  return vs;
}

void write_csv_signal(const std::string& path, const std::string& kind,
                      const std::vector<double>& samples, double rate) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path);
  out << "# kind=" << kind << "\n";
  out << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9f,%.9f\n", static_cast<double>(i) / rate,
                  samples[i]);
    out << buf;
  }
  if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace

Frame load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '6') throw MalformedPixmap("not a P6 file: " + path);
  int w = read_pnm_int(in, path);
  int h = read_pnm_int(in, path);
  int maxval = read_pnm_int(in, path);
  if (w < 1 || h < 1) throw MalformedPixmap("bad dimensions in " + path);
  if (maxval != 255) throw MalformedPixmap("maxval must be 255 in " + path);
  in.get();  // single whitespace after maxval
  Frame f(w, h);
  in.read(reinterpret_cast<char*>(f.pixels.data()),
          static_cast<std::streamsize>(f.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
    throw MalformedPixmap("truncated pixel data in " + path);
  return f;
}

void save_ppm(const Frame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path);
  out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw IoFailure("write failed: " + path);
}

MaskImage load_pbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '4') throw MalformedPixmap("not a P4 file: " + path);
  int w = read_pnm_int(in, path);
  int h = read_pnm_int(in, path);
  if (w < 1 || h < 1) throw MalformedPixmap("bad dimensions in " + path);
  in.get();
  MaskImage m(w, h);
  int row_bytes = (w + 7) / 8;
  std::vector<char> row(row_bytes);
  for (int y = 0; y < h; ++y) {
    in.read(row.data(), row_bytes);
    if (in.gcount() != row_bytes) throw MalformedPixmap("truncated bitmap: " + path);
    for (int x = 0; x < w; ++x)
      m.set(x, y, (row[x / 8] >> (7 - x % 8)) & 1);
  }
  return m;
}

void save_pbm(const MaskImage& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path);
  out << "P4\n" << mask.width << " " << mask.height << "\n";
  int row_bytes = (mask.width + 7) / 8;
  std::vector<char> row(row_bytes);
  for (int y = 0; y < mask.height; ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) row[x / 8] |= static_cast<char>(1 << (7 - x % 8));
    out.write(row.data(), row_bytes);
  }
  if (!out) throw IoFailure("write failed: " + path);
}

std::string frame_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.ppm", index);
  return buf;
}

std::string mask_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "mask_%06zu.pbm", index);
  return buf;
}

FrameSequence load_frame_sequence(const std::string& dir_path, double fps) {
  if (fps <= 0.0) throw Error("fps must be positive");
  std::size_t count = 0;
  while (fs::exists(fs::path(dir_path) / frame_filename(count))) ++count;
  if (count == 0) throw MissingFrame("no frame_000000.ppm in " + dir_path);
  // A gap means some frame_%06d.ppm beyond `count` still exists.
  for (const auto& entry : fs::directory_iterator(dir_path)) {
    const std::string name = entry.path().filename().string();
    std::size_t idx = 0;
    if (std::sscanf(name.c_str(), "frame_%6zu.ppm", &idx) == 1 && idx >= count)
      throw MissingFrame("gap in frame indices: missing index " +
                         std::to_string(count) + " in " + dir_path);
  }
  FrameSequence seq;
  seq.fps = fps;
  seq.source_id = fs::path(dir_path).filename().string();
  seq.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Frame f = load_ppm((fs::path(dir_path) / frame_filename(i)).string());
    if (!seq.frames.empty() && !f.same_size(seq.frames.front()))
      throw DimensionMismatch("frame size differs at index " + std::to_string(i));
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

void save_frame_sequence(const FrameSequence& seq, const std::string& dir_path) {
  fs::create_directories(dir_path);
  for (std::size_t i = 0; i < seq.frames.size(); ++i)
    save_ppm(seq.frames[i], (fs::path(dir_path) / frame_filename(i)).string());
}

std::vector<LandmarkSet> load_landmarks(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw IoFailure("cannot open " + file_path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<LandmarkSet> sets;
  long cur_frame = -1;
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long frame, idx;
    double x, y;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf", &frame, &idx, &x, &y) != 4)
      throw IoFailure("malformed landmark row: " + line);
    if (frame != cur_frame) {
      if (cur_frame >= 0 && count != 68)
        throw WrongPointCount("frame " + std::to_string(cur_frame) + " has " +
                              std::to_string(count) + " points");
      if (frame != cur_frame + 1)
        throw NonMonotonicFrames("frame indices must be consecutive from 0");
      cur_frame = frame;
      count = 0;
      sets.emplace_back();
    }
    if (idx < 0 || idx >= 68) throw WrongPointCount("point index out of range");
    sets.back().points[idx] = {x, y};
    ++count;
  }
  if (cur_frame < 0) throw EmptySignal("no landmark rows in " + file_path);
  if (count != 68)
    throw WrongPointCount("frame " + std::to_string(cur_frame) + " has " +
                          std::to_string(count) + " points");
  return sets;
}

void save_landmarks(const std::vector<LandmarkSet>& sets, const std::string& file_path) {
  std::ofstream out(file_path);
  if (!out) throw IoFailure("cannot write " + file_path);
  out << "frame,idx,x,y\n";
  char buf[96];
  for (std::size_t f = 0; f < sets.size(); ++f)
    for (int i = 0; i < 68; ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%d,%.4f,%.4f\n", f, i,
                    sets[f].points[i].x, sets[f].points[i].y);
      out << buf;
    }
  if (!out) throw IoFailure("write failed: " + file_path);
}

ReferenceSignal load_reference(const std::string& file_path) {
  std::string kind;
  std::vector<double> vs = parse_csv_signal(file_path, &kind);
  ReferenceSignal sig;
  sig.sample_rate = vs.back();
  vs.pop_back();
  sig.samples = std::move(vs);
  if (kind == "BVP")
    sig.kind = SignalKind::BvpWaveform;
  else if (kind == "HR")
    sig.kind = SignalKind::HrSeriesBpm;
  else
    throw IoFailure("unknown or missing kind line in " + file_path);
  return sig;
}

void save_reference(const ReferenceSignal& sig, const std::string& file_path) {
  write_csv_signal(file_path, sig.kind == SignalKind::BvpWaveform ? "BVP" : "HR",
                   sig.samples, sig.sample_rate);
}

PulseSignal load_pulse_csv(const std::string& file_path) {
  std::string kind;
  std::vector<double> vs = parse_csv_signal(file_path, &kind);
  if (kind != "PULSE") throw IoFailure("expected kind=PULSE in " + file_path);
  PulseSignal sig;
  sig.fps = vs.back();
  vs.pop_back();
  sig.samples = std::move(vs);
  return sig;
}

void save_pulse_csv(const PulseSignal& sig, const std::string& file_path) {
  write_csv_signal(file_path, "PULSE", sig.samples, sig.fps);
}

}  // namespace pulsebench

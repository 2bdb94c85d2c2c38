#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "perch/error.hpp"

namespace perch {

/// Timestamped position of the tracked surface reference point.
struct SurfaceSample {
  double t = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Append-only history of surface samples with strictly increasing time.
/// One writer appends; readers work on snapshot() copies.
class SurfaceTrack {
 public:
  void append(const SurfaceSample& s) {
    if (!samples_.empty() && !(s.t > samples_.back().t)) {
      throw PerchError(ErrorKind::kInvalidArgument, "surface timestamps must strictly increase");
    }
    samples_.push_back(s);
  }

  std::span<const SurfaceSample> samples() const { return samples_; }
  std::vector<SurfaceSample> snapshot() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  void clear() { samples_.clear(); }

 private:
  std::vector<SurfaceSample> samples_;
};

/// Predicted surface state at time tau after the fit reference instant.
struct SurfaceState {
  double y = 0.0;
  double vy = 0.0;
  double z = 0.0;
  double vz = 0.0;
  double phi = 0.0;
};

/// Constant-velocity surface model. The reference instant is the time of the
/// newest sample used in the fit; prediction time is measured from there.
struct SurfacePrediction {
  double t_ref = 0.0;
  double y = 0.0;
  double vy = 0.0;
  double z = 0.0;
  double vz = 0.0;  // always zero: the surface moves along Y only
  double phi = 0.0;
};

inline SurfaceState predict(const SurfacePrediction& p, double tau) {
  return {p.y + p.vy * tau, p.vy, p.z + p.vz * tau, p.vz, p.phi};
}

/// First-order least-squares fit of y over the trailing `window` seconds;
/// z is the window mean. Samples need not be strictly increasing here.
inline SurfacePrediction fit(std::span<const SurfaceSample> track, double window, double phi) {
  if (track.size() < 2) {
    throw PerchError(ErrorKind::kInsufficientHistory, "need at least two surface samples");
  }
  const double t_last = track.back().t;
  std::size_t first = track.size();
  while (first > 0 && track[first - 1].t >= t_last - window) --first;
  const auto used = track.subspan(first);
  if (used.size() < 2) {
    throw PerchError(ErrorKind::kInsufficientHistory, "fewer than two samples inside the window");
  }

  const double n = static_cast<double>(used.size());
  double mt = 0.0, my = 0.0, mz = 0.0;
  for (const auto& s : used) {
    mt += s.t - t_last;
    my += s.y;
    mz += s.z;
  }
  mt /= n;
  my /= n;
  mz /= n;
  double stt = 0.0, sty = 0.0;
  for (const auto& s : used) {
    const double dt = (s.t - t_last) - mt;
    stt += dt * dt;
    sty += dt * (s.y - my);
  }
  if (!(stt > 0.0)) {
    throw PerchError(ErrorKind::kDegenerateFit, "all timestamps in the window are equal");
  }
  const double slope = sty / stt;

  SurfacePrediction p;
  p.t_ref = t_last;
  p.vy = slope;
  p.y = my - slope * mt;  // intercept at tau = 0
  p.z = mz;
  p.vz = 0.0;
  p.phi = phi;
  return p;
}

inline SurfacePrediction fit(const SurfaceTrack& track, double window, double phi) {
  return fit(track.samples(), window, phi);
}

/// Reads a track from CSV with a header row naming columns t, y_s, z_s.
inline SurfaceTrack read_track_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw PerchError(ErrorKind::kConfig, "empty track CSV");
  SurfaceTrack track;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',')) {
      throw PerchError(ErrorKind::kConfig, "track CSV line " + std::to_string(line_no) +
                                               ": expected t,y_s,z_s");
    }
    try {
      track.append({std::stod(a), std::stod(b), std::stod(c)});
    } catch (const std::logic_error&) {
      throw PerchError(ErrorKind::kConfig,
                       "track CSV line " + std::to_string(line_no) + ": not a number");
    }
  }
  return track;
}

inline SurfaceTrack read_track_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PerchError(ErrorKind::kConfig, "cannot open track file " + path);
  return read_track_csv(in);
}

}  // namespace perch

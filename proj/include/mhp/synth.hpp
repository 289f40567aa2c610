#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "mhp/scenario.hpp"
#include "mhp/types.hpp"

namespace mhp {

// Scripted actor for the synthetic world: a rigid shape on a constant-
// velocity course.  Larger depth draws nearer the camera and occludes.
struct SynthObjectCfg {
  enum class Shape { Rectangle, Ellipse };
  Shape shape = Shape::Rectangle;
  double width = 20.0;
  double height = 20.0;
  double start_x = 0.0;  // centre at frame 0
  double start_y = 0.0;
  double vx = 0.0;       // pixels per frame
  double vy = 0.0;
  int depth = 0;
  // frames (inclusive range) where the object is forced fully hidden,
  // over and above whatever the depth ordering hides
  std::optional<std::pair<int, int>> hidden_frames;
};

struct DetectorCfg {
  double miss_prob = 0.0;            // chance a visible object goes undetected
  double jitter_sigma = 0.0;         // stddev of the centre jitter, pixels
  double false_positive_rate = 0.0;  // expected clutter boxes per frame
  double conf_min = 0.5;             // reported confidence range
  double conf_max = 1.0;
};

struct SynthConfig {
  int width = 128;
  int height = 128;
  int frame_count = 30;
  std::uint64_t seed = 0;
  std::vector<SynthObjectCfg> objects;  // ids 1..C in this order
  DetectorCfg detector;
};

SynthConfig load_synth_config(const std::filesystem::path& path);

// Noisy detections from per-frame true boxes (nullopt = not detectable).
// Misses, centre jitter, confidence draws and clutter all come off a
// stream derived from (cfg.seed, frame), then the confidence filter
// (keep strictly above conf_threshold) and greedy overlap suppression
// (drop IoU strictly above nms_iou against an already-kept box) run.
// Proposal ids number the kept boxes 0..k-1 in confidence order.
std::vector<std::vector<Proposal>> simulate_detector(
    const std::vector<std::vector<std::optional<BBox>>>& true_boxes,
    const SynthConfig& cfg, double conf_threshold, double nms_iou);

// Renders the whole scenario: ground-truth masks from the scripted
// shapes with depth occlusion, exact flow from the scripted velocities,
// and detections from simulate_detector.
ScenarioStream synth_scenario(const SynthConfig& cfg, double conf_threshold,
                              double nms_iou);

}  // namespace mhp

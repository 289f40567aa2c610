#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mhp/types.hpp"

namespace mhp {

// First-frame ground truth for one object.
struct ObjectAnnotation {
  BBox box;
  MaskGrid mask;
};

struct ScenarioFrame {
  int frame_index = 0;
  std::vector<Proposal> proposals;
  std::optional<FlowField> flow;       // to the next frame; absent on the last
  std::map<int, MaskGrid> gt_masks;    // optional evaluation truth
  std::optional<std::string> image;    // opaque reference, passed through
};

// A full input sequence: frame size, per-object annotations on frame 0,
// and per-frame detections plus flow.  Object ids must be 1..C.
struct ScenarioStream {
  int width = 0;
  int height = 0;
  std::map<int, ObjectAnnotation> annotations;
  std::vector<ScenarioFrame> frames;

  int num_objects() const { return static_cast<int>(annotations.size()); }
  int num_frames() const { return static_cast<int>(frames.size()); }
};

// --- run-length coding for masks (row-major, counts alternate starting
// --- with background, separated by single spaces; counts sum to w*h)
std::string mask_to_rle(const MaskGrid& mask);
MaskGrid mask_from_rle(const std::string& rle, int width, int height);

// --- dense flow sidecar files ("MHPF", i32 width, i32 height, then
// --- row-major float32 (dx, dy) pairs; little-endian throughout)
void write_flow(const FlowField& flow, const std::filesystem::path& path);
FlowField read_flow(const std::filesystem::path& path);

// --- label grids as binary PGM (P5, maxval 255, pixel value = object id)
void write_label_pgm(const LabelGrid& labels, const std::filesystem::path& path);
LabelGrid read_label_pgm(const std::filesystem::path& path);

// --- whole scenarios as JSON with flow sidecars in "<stem>_flow/" next to
// --- the file.  Loading validates shape, ordering, ids and value ranges
// --- and reports the offending frame/field on failure.
void save_scenario(const ScenarioStream& scenario, const std::filesystem::path& path);
ScenarioStream load_scenario(const std::filesystem::path& path);

}  // namespace mhp

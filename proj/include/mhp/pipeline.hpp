#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mhp/forest.hpp"
#include "mhp/metrics.hpp"
#include "mhp/mwis.hpp"
#include "mhp/params.hpp"
#include "mhp/scenario.hpp"
#include "mhp/segmentation.hpp"

namespace mhp {

struct GeneratorOptions {
  std::string name = "oracle";  // "oracle" or "flowprop"
  double oracle_noise = 0.0;    // boundary flip probability for the oracle
  int flowprop_radius = 2;      // feathering radius for the propagator
};

// Builds a generator by name; the oracle is preloaded with the scenario's
// ground-truth masks and draws its noise from `seed`.
std::shared_ptr<MaskGenerator> make_generator(const GeneratorOptions& options,
                                              const ScenarioStream& scenario,
                                              std::uint64_t seed);

struct FrameTimings {
  int frame_index = 0;
  double extend_ms = 0.0;  // tree growth + branch capping
  double solve_ms = 0.0;   // path enumeration + conflict graph + selection
  double prune_ms = 0.0;   // decision commitment
  double merge_ms = 0.0;   // readout + instance merging
  double total_ms = 0.0;
};

struct RunResult {
  std::vector<LabelGrid> labels;                 // final label grid per frame
  std::vector<std::map<int, BBox>> boxes;        // final box per present object
  std::vector<std::map<int, MaskGrid>> masks;    // final instance masks
  std::vector<FrameTimings> timings;
  double total_ms = 0.0;
};

// Frame-by-frame driver.  One step grows every object's trees by a frame,
// selects the best compatible track set per object, commits decisions
// older than the scan window, and merges a provisional label grid.  After
// the last step, finish() re-reads masks along the surviving selected
// paths and produces the definitive outputs.
class Pipeline {
 public:
  Pipeline(const ScenarioStream& scenario, const Params& params,
           std::shared_ptr<const MaskGenerator> generator, std::uint64_t seed);

  int frames_total() const;
  int current_frame() const { return processed_; }  // last frame folded in
  bool done() const { return processed_ + 1 >= frames_total(); }
  void step();
  RunResult finish();

  // introspection for tests and tools
  const HypothesisForest& forest(int object_id) const;
  const std::vector<TrackPath>& selection(int object_id) const;
  const std::vector<LabelGrid>& provisional_labels() const { return online_labels_; }
  std::vector<int> object_ids() const;

 private:
  struct Readout {  // one object's state at one frame
    const HypothesisNode* node = nullptr;  // null when absent
  };
  Readout pick_readout(int object_id, int frame,
                       const std::vector<TrackPath>& paths) const;
  ProbGrid regenerate_probs(int object_id, const HypothesisNode* node,
                            const FlowField& flow) const;

  const ScenarioStream* scenario_;
  Params params_;
  std::shared_ptr<const MaskGenerator> generator_;
  std::uint64_t seed_;
  int processed_ = 0;

  std::map<int, HypothesisForest> forests_;
  std::map<int, std::vector<TrackPath>> selections_;
  std::map<int, MaskGrid> online_prev_masks_;
  std::vector<LabelGrid> online_labels_;
  std::vector<FrameTimings> timings_;
};

// Convenience wrapper: construct, run every frame, finish.
RunResult run_pipeline(const ScenarioStream& scenario, const Params& params,
                       const GeneratorOptions& generator, std::uint64_t seed);

// --- evaluation of finished label grids against scenario ground truth ---

struct EvalRow {
  int frame_index = 0;
  int object_id = 0;
  double j = 0.0;
  double f = 0.0;
};

struct EvalResult {
  std::vector<EvalRow> rows;                    // frame-major, object-minor
  std::map<int, SeriesStats> j_stats;           // per object
  std::map<int, SeriesStats> f_stats;
  double mean_j = 0.0;                          // across objects
  double mean_f = 0.0;
  double mean_g = 0.0;                          // mean of (J+F)/2
};

// Scores each object's label-grid footprint against the scenario's stored
// truth masks.  Frame 0 is the given annotation and is skipped unless
// `include_first_frame`.  Throws when the scenario carries no truth.
EvalResult evaluate_labels(const std::vector<LabelGrid>& labels,
                           const ScenarioStream& scenario,
                           bool include_first_frame = false);

// --- result files ---

// Writes frame_%04d.pgm, outputs.csv (per frame/object: box and, when the
// scenario has truth, J/F) and timings.csv under `directory`.
void write_run_outputs(const std::filesystem::path& directory, const RunResult& result,
                       const ScenarioStream& scenario);

// Reads the frame_%04d.pgm grids that write_run_outputs produced.
std::vector<LabelGrid> read_label_grids(const std::filesystem::path& directory,
                                        int frame_count);

// Writes rows plus per-object and overall summary lines.
void write_metrics_csv(const std::filesystem::path& path, const EvalResult& result);

}  // namespace mhp

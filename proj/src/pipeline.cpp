#include "mhp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mhp/geometry.hpp"
#include "mhp/rng.hpp"
#include "mhp/scoring.hpp"

namespace mhp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

// path ordering when a single best track must be named outright:
// weight first, then the annotation tree, then longer-lived, then stable
bool better_by_weight(const TrackPath& a, const TrackPath& b) {
  if (a.total_weight != b.total_weight) return a.total_weight > b.total_weight;
  if (a.annotation_rooted != b.annotation_rooted) return a.annotation_rooted;
  if (a.root_frame() != b.root_frame()) return a.root_frame() < b.root_frame();
  if (a.leaf_frame() != b.leaf_frame()) return a.leaf_frame() > b.leaf_frame();
  for (std::size_t i = 0; i < std::min(a.nodes.size(), b.nodes.size()); ++i) {
    const auto ka = std::make_pair(a.nodes[i]->frame(), a.nodes[i]->proposal.proposal_id);
    const auto kb = std::make_pair(b.nodes[i]->frame(), b.nodes[i]->proposal.proposal_id);
    if (ka != kb) return ka < kb;
  }
  return a.nodes.size() < b.nodes.size();
}

// readout ordering: identity continuity beats raw weight, so the tree
// grown from the annotation wins whenever it reaches the frame at all
bool better_for_readout(const TrackPath& a, const TrackPath& b) {
  if (a.annotation_rooted != b.annotation_rooted) return a.annotation_rooted;
  return better_by_weight(a, b);
}

std::string frame_file(int frame_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d.pgm", frame_index);
  return buf;
}

}  // namespace

std::shared_ptr<MaskGenerator> make_generator(const GeneratorOptions& options,
                                              const ScenarioStream& scenario,
                                              std::uint64_t seed) {
  if (options.name == "flowprop") {
    if (options.flowprop_radius < 0)
      throw std::invalid_argument("make_generator: negative flowprop radius");
    return std::make_shared<FlowPropGenerator>(options.flowprop_radius);
  }
  if (options.name == "oracle") {
    if (options.oracle_noise < 0.0 || options.oracle_noise > 1.0)
      throw std::invalid_argument("make_generator: oracle noise outside [0,1]");
    auto gen = std::make_shared<OracleGenerator>(options.oracle_noise,
                                                 rng::derive(seed, 0x04AC1Eull));
    for (const auto& [id, ann] : scenario.annotations) gen->add_truth(id, 0, ann.mask);
    for (const auto& frame : scenario.frames)
      for (const auto& [id, mask] : frame.gt_masks)
        gen->add_truth(id, frame.frame_index, mask);
    return gen;
  }
  throw std::invalid_argument("make_generator: unknown generator '" + options.name +
                              "' (expected oracle or flowprop)");
}

Pipeline::Pipeline(const ScenarioStream& scenario, const Params& params,
                   std::shared_ptr<const MaskGenerator> generator, std::uint64_t seed)
    : scenario_(&scenario),
      params_(validate_params(params)),
      generator_(std::move(generator)),
      seed_(seed) {
  if (!generator_) throw std::invalid_argument("pipeline: null mask generator");
  if (scenario.frames.empty()) throw std::invalid_argument("pipeline: no frames");
  if (scenario.annotations.empty())
    throw std::invalid_argument("pipeline: no annotated objects");
  if (scenario.width <= 0 || scenario.height <= 0)
    throw std::invalid_argument("pipeline: empty frame size");

  int expected = 1;
  for (const auto& [id, ann] : scenario.annotations) {
    if (id != expected)
      throw std::invalid_argument("pipeline: object ids must be contiguous from 1");
    ++expected;
    if (ann.mask.width != scenario.width || ann.mask.height != scenario.height)
      throw std::invalid_argument("pipeline: annotation mask size mismatch");
  }
  const int total = scenario.num_frames();
  for (int t = 0; t < total; ++t) {
    const auto& frame = scenario.frames[t];
    if (frame.frame_index != t)
      throw std::invalid_argument("pipeline: frame indices must be 0..n-1 in order");
    for (const auto& p : frame.proposals)
      if (p.frame_index != t)
        throw std::invalid_argument("pipeline: proposal frame index mismatch");
    const bool last = t == total - 1;
    if (!last) {
      if (!frame.flow)
        throw std::invalid_argument("pipeline: missing flow before frame " +
                                    std::to_string(t + 1));
      if (frame.flow->width != scenario.width || frame.flow->height != scenario.height)
        throw std::invalid_argument("pipeline: flow size mismatch at frame " +
                                    std::to_string(t));
    }
  }

  for (const auto& [id, ann] : scenario.annotations) {
    forests_.emplace(id, init_forest(id, ann.box, ann.mask, params_));
    selections_[id] = {};
    online_prev_masks_[id] = ann.mask;
  }

  // frame 0 label grid straight from the annotations, resolved by the
  // same merge rule as every later frame
  std::vector<MaskGrid> masks;
  std::vector<ProbGrid> probs;
  std::vector<std::optional<BBox>> boxes;
  std::vector<MaskGrid> prev;
  for (const auto& [id, ann] : scenario.annotations) {
    masks.push_back(ann.mask);
    ProbGrid pg(scenario.width, scenario.height);
    for (std::size_t i = 0; i < pg.values.size(); ++i)
      pg.values[i] = ann.mask.bits[i] ? 1.f : 0.f;
    probs.push_back(std::move(pg));
    boxes.push_back(ann.box);
    prev.push_back(ann.mask);
  }
  const FlowField still(scenario.width, scenario.height);
  online_labels_.push_back(
      merge_masks_boxed(masks, probs, boxes, prev, still, params_.merge_margin));
  timings_.push_back(FrameTimings{});  // frame 0 costs nothing
}

int Pipeline::frames_total() const { return scenario_->num_frames(); }

std::vector<int> Pipeline::object_ids() const {
  std::vector<int> ids;
  ids.reserve(forests_.size());
  for (const auto& [id, f] : forests_) ids.push_back(id);
  return ids;
}

const HypothesisForest& Pipeline::forest(int object_id) const {
  return forests_.at(object_id);
}

const std::vector<TrackPath>& Pipeline::selection(int object_id) const {
  return selections_.at(object_id);
}

Pipeline::Readout Pipeline::pick_readout(int object_id, int frame,
                                         const std::vector<TrackPath>& paths) const {
  (void)object_id;
  const TrackPath* best = nullptr;
  for (const auto& path : paths) {
    if (path.root_frame() > frame || path.leaf_frame() < frame) continue;
    if (!best || better_for_readout(path, *best)) best = &path;
  }
  if (!best) return {};
  return {best->nodes[frame - best->root_frame()]};
}

ProbGrid Pipeline::regenerate_probs(int object_id, const HypothesisNode* node,
                                    const FlowField& flow) const {
  MaskGenContext ctx;
  ctx.frame_index = node->frame();
  ctx.object_id = object_id;
  const auto& frame = scenario_->frames[node->frame()];
  if (frame.image) ctx.image = &*frame.image;
  const MaskGrid prior = node->is_root()
                             ? MaskGrid(scenario_->width, scenario_->height)
                             : warp_mask(node->parent->mask, flow);
  return generate_mask(*generator_, ctx, node->proposal.box, prior, params_);
}

void Pipeline::step() {
  if (done()) throw std::logic_error("pipeline: step past the final frame");
  const int t = processed_ + 1;
  const auto& frame = scenario_->frames[t];
  const FlowField& flow = *scenario_->frames[t - 1].flow;
  const std::vector<int> ids = object_ids();
  const int n_ids = static_cast<int>(ids.size());

  const auto t0 = Clock::now();

  // previous-frame boxes per object, snapshotted before anything grows
  std::map<int, std::vector<BBox>> frontier_boxes;
  for (int id : ids) {
    auto& forest = forests_.at(id);
    std::vector<BBox> boxes;
    for (auto* leaf : forest.frontier_leaves(processed_))
      boxes.push_back(leaf->proposal.box);
    frontier_boxes.emplace(id, std::move(boxes));
  }

  std::exception_ptr failure = nullptr;

  // grow and cap every object's trees
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < n_ids; ++i) {
    try {
      const int id = ids[i];
      std::vector<BBox> rivals;
      if (params_.cross_object_penalty) {
        for (int other : ids)
          if (other != id)
            rivals.insert(rivals.end(), frontier_boxes.at(other).begin(),
                          frontier_boxes.at(other).end());
      }
      extend(forests_.at(id), frame.proposals, flow, *generator_, params_, rivals);
      cap_branches(forests_.at(id), params_);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  const auto t1 = Clock::now();

  // pick the best compatible track set per object
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < n_ids; ++i) {
    try {
      const int id = ids[i];
      const auto paths = enumerate_paths(forests_.at(id));
      const auto graph = build_conflict_graph(paths);
      std::vector<int> chosen;
      if (graph.size() <= 24)
        chosen = solve_exact(graph);
      else
        chosen = solve_pls(graph, rng::derive(seed_, static_cast<std::uint64_t>(id),
                                              static_cast<std::uint64_t>(t)),
                           params_.pls_iterations);
      std::vector<TrackPath> selected;
      selected.reserve(chosen.size());
      for (int idx : chosen) selected.push_back(paths[idx]);
      if (selected.empty() && !paths.empty()) {
        // every candidate weighs below zero; still commit to the best one
        const TrackPath* best = &paths[0];
        for (const auto& p : paths)
          if (better_by_weight(p, *best)) best = &p;
        selected.push_back(*best);
      }
      selections_[id] = std::move(selected);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  const auto t2 = Clock::now();

  for (int id : ids) n_scan_prune(forests_.at(id), selections_.at(id), params_.scan_depth);
  const auto t3 = Clock::now();

  // provisional readout and label grid for this frame
  std::vector<MaskGrid> masks;
  std::vector<ProbGrid> probs;
  std::vector<std::optional<BBox>> boxes;
  std::vector<MaskGrid> prev;
  for (int id : ids) {
    const Readout r = pick_readout(id, t, selections_.at(id));
    if (r.node) {
      masks.push_back(r.node->mask);
      probs.push_back(regenerate_probs(id, r.node, flow));
      boxes.push_back(r.node->proposal.box);
    } else {
      masks.emplace_back(scenario_->width, scenario_->height);
      probs.emplace_back(scenario_->width, scenario_->height);
      boxes.push_back(std::nullopt);
    }
    prev.push_back(online_prev_masks_.at(id));
  }
  online_labels_.push_back(
      merge_masks_boxed(masks, probs, boxes, prev, flow, params_.merge_margin));
  for (int i = 0; i < n_ids; ++i) online_prev_masks_[ids[i]] = masks[i];
  const auto t4 = Clock::now();

  FrameTimings timing;
  timing.frame_index = t;
  timing.extend_ms = ms_between(t0, t1);
  timing.solve_ms = ms_between(t1, t2);
  timing.prune_ms = ms_between(t2, t3);
  timing.merge_ms = ms_between(t3, t4);
  timing.total_ms = ms_between(t0, t4);
  timings_.push_back(timing);

  processed_ = t;
}

RunResult Pipeline::finish() {
  if (!done()) throw std::logic_error("pipeline: finish with frames still pending");
  const auto start = Clock::now();
  const std::vector<int> ids = object_ids();
  const int total = frames_total();

  RunResult result;
  result.labels.reserve(total);
  result.boxes.resize(total);
  result.masks.resize(total);

  result.labels.push_back(online_labels_.front());
  for (const auto& [id, ann] : scenario_->annotations) {
    result.boxes[0][id] = ann.box;
    result.masks[0][id] = ann.mask;
  }

  std::vector<MaskGrid> prev;
  for (const auto& [id, ann] : scenario_->annotations) prev.push_back(ann.mask);

  for (int t = 1; t < total; ++t) {
    const FlowField& flow = *scenario_->frames[t - 1].flow;
    std::vector<MaskGrid> masks;
    std::vector<ProbGrid> probs;
    std::vector<std::optional<BBox>> boxes;
    for (int id : ids) {
      const Readout r = pick_readout(id, t, selections_.at(id));
      if (r.node) {
        masks.push_back(r.node->mask);
        probs.push_back(regenerate_probs(id, r.node, flow));
        boxes.push_back(r.node->proposal.box);
        result.boxes[t][id] = r.node->proposal.box;
        result.masks[t][id] = r.node->mask;
      } else {
        masks.emplace_back(scenario_->width, scenario_->height);
        probs.emplace_back(scenario_->width, scenario_->height);
        boxes.push_back(std::nullopt);
      }
    }
    result.labels.push_back(
        merge_masks_boxed(masks, probs, boxes, prev, flow, params_.merge_margin));
    prev = std::move(masks);
  }

  result.timings = timings_;
  double steps_ms = 0.0;
  for (const auto& tm : timings_) steps_ms += tm.total_ms;
  result.total_ms = steps_ms + ms_between(start, Clock::now());
  return result;
}

RunResult run_pipeline(const ScenarioStream& scenario, const Params& params,
                       const GeneratorOptions& generator, std::uint64_t seed) {
  auto gen = make_generator(generator, scenario, seed);
  Pipeline pipeline(scenario, params, gen, seed);
  while (!pipeline.done()) pipeline.step();
  return pipeline.finish();
}

// ------------------------------------------------------------- evaluation

EvalResult evaluate_labels(const std::vector<LabelGrid>& labels,
                           const ScenarioStream& scenario, bool include_first_frame) {
  if (static_cast<int>(labels.size()) != scenario.num_frames())
    throw std::invalid_argument("evaluate_labels: one label grid per frame required");
  const int start = include_first_frame ? 0 : 1;
  if (scenario.num_frames() <= start)
    throw std::invalid_argument("evaluate_labels: nothing to evaluate");
  const double tolerance = default_contour_tolerance(scenario.width, scenario.height);

  EvalResult result;
  std::map<int, std::vector<double>> j_series, f_series;
  for (int t = start; t < scenario.num_frames(); ++t) {
    const auto& grid = labels[t];
    if (grid.width != scenario.width || grid.height != scenario.height)
      throw std::invalid_argument("evaluate_labels: label grid size mismatch");
    for (const auto& [id, ann] : scenario.annotations) {
      const auto it = scenario.frames[t].gt_masks.find(id);
      if (it == scenario.frames[t].gt_masks.end())
        throw std::runtime_error("evaluate_labels: no truth for object " +
                                 std::to_string(id) + " at frame " + std::to_string(t));
      MaskGrid pred(scenario.width, scenario.height);
      for (std::size_t i = 0; i < grid.labels.size(); ++i)
        pred.bits[i] = grid.labels[i] == id ? 1 : 0;
      EvalRow row;
      row.frame_index = t;
      row.object_id = id;
      row.j = region_similarity(pred, it->second);
      row.f = contour_accuracy(pred, it->second, tolerance);
      j_series[id].push_back(row.j);
      f_series[id].push_back(row.f);
      result.rows.push_back(row);
    }
  }

  double j_sum = 0.0, f_sum = 0.0;
  for (const auto& [id, series] : j_series) {
    result.j_stats[id] = aggregate_series(series);
    result.f_stats[id] = aggregate_series(f_series[id]);
    j_sum += result.j_stats[id].mean;
    f_sum += result.f_stats[id].mean;
  }
  const double n = static_cast<double>(j_series.size());
  result.mean_j = j_sum / n;
  result.mean_f = f_sum / n;
  result.mean_g = 0.5 * (result.mean_j + result.mean_f);
  return result;
}

// ------------------------------------------------------------ result files

void write_run_outputs(const std::filesystem::path& directory, const RunResult& result,
                       const ScenarioStream& scenario) {
  std::filesystem::create_directories(directory);
  for (std::size_t t = 0; t < result.labels.size(); ++t)
    write_label_pgm(result.labels[t], directory / frame_file(static_cast<int>(t)));

  const double tolerance = default_contour_tolerance(scenario.width, scenario.height);
  std::ofstream out(directory / "outputs.csv");
  if (!out) throw std::runtime_error("write_run_outputs: cannot write outputs.csv");
  out << "frame,object_id,present,x_min,y_min,x_max,y_max,j,f\n";
  out.precision(10);
  for (std::size_t t = 0; t < result.labels.size(); ++t) {
    for (const auto& [id, ann] : scenario.annotations) {
      out << t << "," << id << ",";
      const auto box_it = result.boxes[t].find(id);
      if (box_it != result.boxes[t].end()) {
        const BBox& b = box_it->second;
        out << 1 << "," << b.x_min << "," << b.y_min << "," << b.x_max << ","
            << b.y_max;
      } else {
        out << 0 << ",,,,";
      }
      const auto gt_it = scenario.frames[t].gt_masks.find(id);
      if (gt_it != scenario.frames[t].gt_masks.end()) {
        MaskGrid pred(scenario.width, scenario.height);
        for (std::size_t i = 0; i < pred.bits.size(); ++i)
          pred.bits[i] = result.labels[t].labels[i] == id ? 1 : 0;
        out << "," << region_similarity(pred, gt_it->second) << ","
            << contour_accuracy(pred, gt_it->second, tolerance) << "\n";
      } else {
        out << ",,\n";
      }
    }
  }

  std::ofstream tim(directory / "timings.csv");
  if (!tim) throw std::runtime_error("write_run_outputs: cannot write timings.csv");
  tim << "frame,extend_ms,solve_ms,prune_ms,merge_ms,total_ms\n";
  tim.precision(6);
  for (const auto& t : result.timings)
    tim << t.frame_index << "," << t.extend_ms << "," << t.solve_ms << ","
        << t.prune_ms << "," << t.merge_ms << "," << t.total_ms << "\n";
  tim << "total,,,,," << result.total_ms << "\n";
}

std::vector<LabelGrid> read_label_grids(const std::filesystem::path& directory,
                                        int frame_count) {
  std::vector<LabelGrid> grids;
  grids.reserve(frame_count);
  for (int t = 0; t < frame_count; ++t)
    grids.push_back(read_label_pgm(directory / frame_file(t)));
  return grids;
}

void write_metrics_csv(const std::filesystem::path& path, const EvalResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_metrics_csv: cannot open " + path.string());
  out.precision(10);
  out << "row_type,frame,object_id,j,f,j_recall,j_decay,f_recall,f_decay\n";
  for (const auto& row : result.rows)
    out << "frame," << row.frame_index << "," << row.object_id << "," << row.j << ","
        << row.f << ",,,,\n";
  for (const auto& [id, js] : result.j_stats) {
    const auto& fs = result.f_stats.at(id);
    out << "object,," << id << "," << js.mean << "," << fs.mean << "," << js.recall
        << "," << js.decay << "," << fs.recall << "," << fs.decay << "\n";
  }
  out << "overall,,," << result.mean_j << "," << result.mean_f << ",,,,\n";
}

}  // namespace mhp

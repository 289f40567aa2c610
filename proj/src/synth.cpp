#include "mhp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mhp/geometry.hpp"
#include "mhp/rng.hpp"

namespace mhp {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

Vec2 center_at(const SynthObjectCfg& obj, int frame) {
  return {obj.start_x + obj.vx * frame, obj.start_y + obj.vy * frame};
}

MaskGrid rasterise(const SynthObjectCfg& obj, const Vec2& c, int width, int height) {
  MaskGrid mask(width, height);
  const double hw = 0.5 * obj.width, hh = 0.5 * obj.height;
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - hw)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(c.x + hw)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - hh)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(c.y + hh)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      bool inside;
      if (obj.shape == SynthObjectCfg::Shape::Rectangle) {
        inside = x >= c.x - hw && x <= c.x + hw && y >= c.y - hh && y <= c.y + hh;
      } else {
        const double nx = (x - c.x) / hw;
        const double ny = (y - c.y) / hh;
        inside = nx * nx + ny * ny <= 1.0;
      }
      if (inside) mask.set(x, y, true);
    }
  return mask;
}

// tight pixel bbox with a half-pixel halo, so the box strictly encloses
// its pixels and never degenerates for thin masks
std::optional<BBox> mask_bbox(const MaskGrid& mask) {
  int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
  if (max_x < 0) return std::nullopt;
  return BBox{min_x - 0.5, min_y - 0.5, max_x + 0.5, max_y + 0.5};
}

bool hidden_at(const SynthObjectCfg& obj, int frame) {
  return obj.hidden_frames && frame >= obj.hidden_frames->first &&
         frame <= obj.hidden_frames->second;
}

void validate_config(const SynthConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1) fail("synth: frame size must be positive");
  if (cfg.frame_count < 1) fail("synth: frame_count must be positive");
  if (cfg.objects.empty()) fail("synth: at least one object required");
  if (cfg.objects.size() > 255) fail("synth: more than 255 objects");
  for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
    const auto& o = cfg.objects[i];
    if (o.width < 1.0 || o.height < 1.0)
      fail("synth: object " + std::to_string(i + 1) + " is degenerately small");
    if (o.hidden_frames &&
        (o.hidden_frames->first < 0 || o.hidden_frames->second < o.hidden_frames->first ||
         o.hidden_frames->first >= cfg.frame_count))
      fail("synth: object " + std::to_string(i + 1) + " has a bad hidden range");
  }
  const auto& d = cfg.detector;
  if (d.miss_prob < 0.0 || d.miss_prob >= 1.0)
    fail("synth: miss_prob must lie in [0,1)");
  if (d.jitter_sigma < 0.0) fail("synth: jitter_sigma must be non-negative");
  if (d.false_positive_rate < 0.0)
    fail("synth: false_positive_rate must be non-negative");
  if (d.conf_min < 0.0 || d.conf_max > 1.0 || d.conf_min > d.conf_max)
    fail("synth: confidence range must satisfy 0 <= conf_min <= conf_max <= 1");
}

}  // namespace

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("load_synth_config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail("load_synth_config: " + path.string() + ": " + e.what());
  }

  SynthConfig cfg;
  cfg.width = j.value("width", cfg.width);
  cfg.height = j.value("height", cfg.height);
  cfg.frame_count = j.value("frame_count", cfg.frame_count);
  cfg.seed = j.value("seed", cfg.seed);

  if (!j.contains("objects") || !j["objects"].is_array())
    fail("load_synth_config: " + path.string() + ": objects missing");
  for (const auto& oj : j["objects"]) {
    SynthObjectCfg o;
    const std::string shape = oj.value("shape", "rectangle");
    if (shape == "rectangle")
      o.shape = SynthObjectCfg::Shape::Rectangle;
    else if (shape == "ellipse")
      o.shape = SynthObjectCfg::Shape::Ellipse;
    else
      fail("load_synth_config: unknown shape '" + shape + "'");
    o.width = oj.value("width", o.width);
    o.height = oj.value("height", o.height);
    o.start_x = oj.value("start_x", o.start_x);
    o.start_y = oj.value("start_y", o.start_y);
    o.vx = oj.value("vx", o.vx);
    o.vy = oj.value("vy", o.vy);
    o.depth = oj.value("depth", o.depth);
    if (oj.contains("hidden_frames")) {
      const auto& hf = oj["hidden_frames"];
      if (!hf.is_array() || hf.size() != 2)
        fail("load_synth_config: hidden_frames must be [first, last]");
      o.hidden_frames = {hf[0].get<int>(), hf[1].get<int>()};
    }
    cfg.objects.push_back(o);
  }
  if (j.contains("detector")) {
    const auto& dj = j["detector"];
    cfg.detector.miss_prob = dj.value("miss_prob", 0.0);
    cfg.detector.jitter_sigma = dj.value("jitter_sigma", 0.0);
    cfg.detector.false_positive_rate = dj.value("false_positive_rate", 0.0);
    cfg.detector.conf_min = dj.value("conf_min", 0.5);
    cfg.detector.conf_max = dj.value("conf_max", 1.0);
  }
  validate_config(cfg);
  return cfg;
}

std::vector<std::vector<Proposal>> simulate_detector(
    const std::vector<std::vector<std::optional<BBox>>>& true_boxes,
    const SynthConfig& cfg, double conf_threshold, double nms_iou) {
  validate_config(cfg);
  std::vector<std::vector<Proposal>> out(true_boxes.size());
  for (std::size_t f = 0; f < true_boxes.size(); ++f) {
    rng::Stream stream(rng::derive(cfg.seed, 0xDE7EC7ull, f));
    struct Raw {
      BBox box;
      double confidence;
    };
    std::vector<Raw> raw;
    for (const auto& maybe_box : true_boxes[f]) {
      if (!maybe_box) continue;
      if (stream.next_bool(cfg.detector.miss_prob)) continue;
      const double jx = stream.next_normal() * cfg.detector.jitter_sigma;
      const double jy = stream.next_normal() * cfg.detector.jitter_sigma;
      const double conf =
          stream.next_range(cfg.detector.conf_min, cfg.detector.conf_max);
      BBox b = *maybe_box;
      b.x_min += jx;
      b.x_max += jx;
      b.y_min += jy;
      b.y_max += jy;
      raw.push_back({b, conf});
    }
    const int clutter = stream.next_poisson(cfg.detector.false_positive_rate);
    for (int i = 0; i < clutter; ++i) {
      const double cx = stream.next_range(0.0, cfg.width);
      const double cy = stream.next_range(0.0, cfg.height);
      const double bw = stream.next_range(8.0, 32.0);
      const double bh = stream.next_range(8.0, 32.0);
      const double conf =
          stream.next_range(cfg.detector.conf_min, cfg.detector.conf_max);
      raw.push_back({box_from_center({cx, cy}, {bw, bh}), conf});
    }

    // confidence filter, then greedy overlap suppression
    std::erase_if(raw, [conf_threshold](const Raw& r) {
      return r.confidence <= conf_threshold;
    });
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
      return a.confidence > b.confidence;
    });
    std::vector<Raw> kept;
    for (const auto& r : raw) {
      bool suppressed = false;
      for (const auto& k : kept)
        if (bbox_iou(r.box, k.box) > nms_iou) {
          suppressed = true;
          break;
        }
      if (!suppressed) kept.push_back(r);
    }
    out[f].reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
      out[f].push_back(Proposal{kept[i].box, kept[i].confidence,
                                static_cast<int>(f), static_cast<int>(i)});
  }
  return out;
}

ScenarioStream synth_scenario(const SynthConfig& cfg, double conf_threshold,
                              double nms_iou) {
  validate_config(cfg);
  const int n_objects = static_cast<int>(cfg.objects.size());

  // nearer-first ordering; ties broken toward the later config entry
  std::vector<int> by_depth(n_objects);
  for (int i = 0; i < n_objects; ++i) by_depth[i] = i;
  std::sort(by_depth.begin(), by_depth.end(), [&cfg](int a, int b) {
    if (cfg.objects[a].depth != cfg.objects[b].depth)
      return cfg.objects[a].depth > cfg.objects[b].depth;
    return a > b;
  });

  ScenarioStream s;
  s.width = cfg.width;
  s.height = cfg.height;

  std::vector<std::vector<std::optional<BBox>>> true_boxes(
      cfg.frame_count, std::vector<std::optional<BBox>>(n_objects));
  std::vector<std::vector<MaskGrid>> visible(cfg.frame_count);

  for (int f = 0; f < cfg.frame_count; ++f) {
    std::vector<MaskGrid> vis(n_objects);
    MaskGrid covered(cfg.width, cfg.height);
    for (int rank : by_depth) {
      const auto& obj = cfg.objects[rank];
      MaskGrid m(cfg.width, cfg.height);
      if (!hidden_at(obj, f)) {
        m = rasterise(obj, center_at(obj, f), cfg.width, cfg.height);
        for (std::size_t i = 0; i < m.bits.size(); ++i) {
          if (m.bits[i] && covered.bits[i]) m.bits[i] = 0;  // someone nearer owns it
        }
        for (std::size_t i = 0; i < m.bits.size(); ++i)
          if (m.bits[i]) covered.bits[i] = 1;
      }
      vis[rank] = std::move(m);
    }
    for (int i = 0; i < n_objects; ++i) true_boxes[f][i] = mask_bbox(vis[i]);
    visible[f] = std::move(vis);
  }

  // frame 0 doubles as the annotation; every object must be visible there
  for (int i = 0; i < n_objects; ++i) {
    if (!true_boxes[0][i])
      fail("synth: object " + std::to_string(i + 1) +
           " is not visible on the first frame, cannot annotate it");
    ObjectAnnotation ann;
    ann.box = *true_boxes[0][i];
    ann.mask = visible[0][i];
    s.annotations.emplace(i + 1, std::move(ann));
  }

  const auto proposals = simulate_detector(true_boxes, cfg, conf_threshold, nms_iou);

  for (int f = 0; f < cfg.frame_count; ++f) {
    ScenarioFrame frame;
    frame.frame_index = f;
    frame.proposals = proposals[f];
    for (int i = 0; i < n_objects; ++i) frame.gt_masks.emplace(i + 1, visible[f][i]);
    if (f + 1 < cfg.frame_count) {
      FlowField flow(cfg.width, cfg.height);
      for (int i = 0; i < n_objects; ++i) {
        const auto& obj = cfg.objects[i];
        if (obj.vx == 0.0 && obj.vy == 0.0) continue;
        const auto& m = visible[f][i];
        for (int y = 0; y < cfg.height; ++y)
          for (int x = 0; x < cfg.width; ++x)
            if (m.at(x, y))
              flow.set(x, y, static_cast<float>(obj.vx), static_cast<float>(obj.vy));
      }
      frame.flow = std::move(flow);
    }
    s.frames.push_back(std::move(frame));
  }
  return s;
}

}  // namespace mhp

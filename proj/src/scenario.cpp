#include "mhp/scenario.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mhp {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

std::string frame_tag(const std::filesystem::path& path, int frame) {
  return path.string() + ": frame " + std::to_string(frame);
}

}  // namespace

// ----------------------------------------------------------------- RLE

std::string mask_to_rle(const MaskGrid& mask) {
  if (mask.width <= 0 || mask.height <= 0) fail("mask_to_rle: empty grid");
  std::string out;
  std::uint8_t expect = 0;  // runs alternate starting with background
  std::size_t run = 0;
  auto emit = [&out](std::size_t n) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(n);
  };
  for (std::uint8_t bit : mask.bits) {
    const std::uint8_t v = bit ? 1 : 0;
    if (v == expect) {
      ++run;
      continue;
    }
    emit(run);
    expect = v;
    run = 1;
  }
  emit(run);
  return out;
}

MaskGrid mask_from_rle(const std::string& rle, int width, int height) {
  if (width <= 0 || height <= 0) fail("mask_from_rle: empty grid");
  MaskGrid mask(width, height);
  const std::size_t total = mask.bits.size();
  std::istringstream in(rle);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  long long count = 0;
  while (in >> count) {
    if (count < 0) fail("mask_from_rle: negative run length");
    if (pos + static_cast<std::size_t>(count) > total)
      fail("mask_from_rle: runs exceed " + std::to_string(total) + " pixels");
    for (long long i = 0; i < count; ++i) mask.bits[pos++] = value;
    value ^= 1;
  }
  if (!in.eof()) fail("mask_from_rle: malformed run length");
  if (pos != total)
    fail("mask_from_rle: runs cover " + std::to_string(pos) + " of " +
         std::to_string(total) + " pixels");
  return mask;
}

// ----------------------------------------------------------------- flow

namespace {

constexpr char kFlowMagic[4] = {'M', 'H', 'P', 'F'};

void put_i32(std::ostream& out, std::int32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.write(buf, 4);
}

std::int32_t get_i32(std::istream& in) {
  char buf[4];
  in.read(buf, 4);
  std::int32_t v;
  std::memcpy(&v, buf, 4);
  return v;
}

}  // namespace

void write_flow(const FlowField& flow, const std::filesystem::path& path) {
  if (flow.width <= 0 || flow.height <= 0) fail("write_flow: empty field");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("write_flow: cannot open " + path.string());
  out.write(kFlowMagic, 4);
  put_i32(out, flow.width);
  put_i32(out, flow.height);
  out.write(reinterpret_cast<const char*>(flow.data.data()),
            static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
  if (!out) fail("write_flow: write failed for " + path.string());
}

FlowField read_flow(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("read_flow: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFlowMagic, 4) != 0)
    fail("read_flow: bad magic in " + path.string());
  const std::int32_t w = get_i32(in);
  const std::int32_t h = get_i32(in);
  if (!in || w <= 0 || h <= 0)
    fail("read_flow: bad dimensions in " + path.string());
  FlowField flow(w, h);
  in.read(reinterpret_cast<char*>(flow.data.data()),
          static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
  if (!in) fail("read_flow: truncated data in " + path.string());
  return flow;
}

// ----------------------------------------------------------------- PGM

void write_label_pgm(const LabelGrid& labels, const std::filesystem::path& path) {
  if (labels.width <= 0 || labels.height <= 0) fail("write_label_pgm: empty grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("write_label_pgm: cannot open " + path.string());
  out << "P5\n" << labels.width << " " << labels.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(labels.labels.data()),
            static_cast<std::streamsize>(labels.labels.size()));
  if (!out) fail("write_label_pgm: write failed for " + path.string());
}

LabelGrid read_label_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("read_label_pgm: cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
    fail("read_label_pgm: unsupported header in " + path.string());
  in.get();  // the single whitespace after the header
  LabelGrid grid(w, h);
  in.read(reinterpret_cast<char*>(grid.labels.data()),
          static_cast<std::streamsize>(grid.labels.size()));
  if (!in) fail("read_label_pgm: truncated data in " + path.string());
  return grid;
}

// ------------------------------------------------------------- scenario

namespace {

ordered_json box_to_json(const BBox& box) {
  return ordered_json::array({box.x_min, box.y_min, box.x_max, box.y_max});
}

BBox box_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4)
    fail(where + ": box must be [x_min, y_min, x_max, y_max]");
  BBox box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
           j[3].get<double>()};
  if (!box.valid()) fail(where + ": degenerate box");
  return box;
}

std::filesystem::path flow_dir_for(const std::filesystem::path& scenario_path) {
  std::filesystem::path dir = scenario_path;
  dir.replace_extension();
  dir += "_flow";
  return dir;
}

}  // namespace

void save_scenario(const ScenarioStream& scenario, const std::filesystem::path& path) {
  if (scenario.width <= 0 || scenario.height <= 0)
    fail("save_scenario: empty frame size");
  if (scenario.frames.empty()) fail("save_scenario: no frames");
  if (scenario.annotations.empty()) fail("save_scenario: no annotated objects");

  const std::filesystem::path flow_dir = flow_dir_for(path);
  const bool any_flow = scenario.frames.size() > 1;
  if (any_flow) std::filesystem::create_directories(flow_dir);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());

  ordered_json j;
  j["format"] = "mhp-scenario";
  j["version"] = 1;
  j["width"] = scenario.width;
  j["height"] = scenario.height;
  j["frame_count"] = scenario.num_frames();

  j["annotations"] = ordered_json::array();
  for (const auto& [id, ann] : scenario.annotations) {
    ordered_json a;
    a["object_id"] = id;
    a["box"] = box_to_json(ann.box);
    a["mask_rle"] = mask_to_rle(ann.mask);
    j["annotations"].push_back(std::move(a));
  }

  j["frames"] = ordered_json::array();
  for (const auto& frame : scenario.frames) {
    ordered_json f;
    f["frame_index"] = frame.frame_index;
    f["proposals"] = ordered_json::array();
    for (const auto& p : frame.proposals) {
      ordered_json pj;
      pj["id"] = p.proposal_id;
      pj["box"] = box_to_json(p.box);
      pj["confidence"] = p.confidence;
      f["proposals"].push_back(std::move(pj));
    }
    if (frame.flow) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.flow", frame.frame_index);
      write_flow(*frame.flow, flow_dir / name);
      f["flow_file"] = (flow_dir.filename() / name).generic_string();
    }
    if (!frame.gt_masks.empty()) {
      ordered_json gm;
      for (const auto& [id, mask] : frame.gt_masks)
        gm[std::to_string(id)] = mask_to_rle(mask);
      f["gt_masks"] = std::move(gm);
    }
    if (frame.image) f["image"] = *frame.image;
    j["frames"].push_back(std::move(f));
  }

  std::ofstream out(path);
  if (!out) fail("save_scenario: cannot open " + path.string());
  out << j.dump(2) << "\n";
  if (!out) fail("save_scenario: write failed for " + path.string());
}

ScenarioStream load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("load_scenario: cannot open " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail("load_scenario: " + path.string() + ": " + e.what());
  }

  const std::string where = path.string();
  if (j.value("format", "") != "mhp-scenario")
    fail(where + ": not a scenario file (missing format tag)");
  if (j.value("version", 0) != 1) fail(where + ": unsupported version");

  ScenarioStream s;
  s.width = j.value("width", 0);
  s.height = j.value("height", 0);
  if (s.width <= 0 || s.height <= 0) fail(where + ": bad frame size");

  if (!j.contains("annotations") || !j["annotations"].is_array() ||
      j["annotations"].empty())
    fail(where + ": annotations missing");
  for (const auto& a : j["annotations"]) {
    const int id = a.value("object_id", -1);
    if (id <= 0 || id > 255) fail(where + ": object ids must be 1..255");
    if (s.annotations.count(id)) fail(where + ": duplicate object id");
    ObjectAnnotation ann;
    ann.box = box_from_json(a.at("box"), where + ": annotation");
    ann.mask = mask_from_rle(a.at("mask_rle").get<std::string>(), s.width, s.height);
    s.annotations.emplace(id, std::move(ann));
  }
  // ids must be exactly 1..C so label grids can use them directly
  int expected = 1;
  for (const auto& [id, ann] : s.annotations) {
    if (id != expected)
      fail(where + ": object ids must be contiguous from 1, missing " +
           std::to_string(expected));
    ++expected;
  }

  if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty())
    fail(where + ": frames missing");
  const int frame_count = j.value("frame_count", -1);
  if (frame_count != static_cast<int>(j["frames"].size()))
    fail(where + ": frame_count disagrees with the frame list");

  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");
  int index = 0;
  for (const auto& fj : j["frames"]) {
    ScenarioFrame frame;
    frame.frame_index = fj.value("frame_index", -1);
    if (frame.frame_index != index)
      fail(frame_tag(path, index) + ": frame_index out of order");

    if (fj.contains("proposals")) {
      for (const auto& pj : fj["proposals"]) {
        Proposal p;
        p.frame_index = index;
        p.proposal_id = pj.value("id", -1);
        if (p.proposal_id < 0)
          fail(frame_tag(path, index) + ": proposal id missing or negative");
        p.box = box_from_json(pj.at("box"), frame_tag(path, index) + ": proposal");
        p.confidence = pj.value("confidence", -1.0);
        if (p.confidence < 0.0 || p.confidence > 1.0)
          fail(frame_tag(path, index) + ": confidence outside [0,1]");
        for (const auto& seen : frame.proposals)
          if (seen.proposal_id == p.proposal_id)
            fail(frame_tag(path, index) + ": duplicate proposal id " +
                 std::to_string(p.proposal_id));
        frame.proposals.push_back(p);
      }
    }

    const bool last = index == frame_count - 1;
    if (fj.contains("flow_file")) {
      if (last) fail(frame_tag(path, index) + ": flow on the final frame");
      FlowField flow = read_flow(base / fj["flow_file"].get<std::string>());
      if (flow.width != s.width || flow.height != s.height)
        fail(frame_tag(path, index) + ": flow size disagrees with the scenario");
      frame.flow = std::move(flow);
    } else if (!last) {
      fail(frame_tag(path, index) + ": flow_file missing");
    }

    if (fj.contains("gt_masks")) {
      for (const auto& [key, rle] : fj["gt_masks"].items()) {
        int id = 0;
        try {
          id = std::stoi(key);
        } catch (...) {
          fail(frame_tag(path, index) + ": gt mask key is not an object id");
        }
        if (!s.annotations.count(id))
          fail(frame_tag(path, index) + ": gt mask for unknown object " + key);
        frame.gt_masks.emplace(id,
                               mask_from_rle(rle.get<std::string>(), s.width, s.height));
      }
    }
    if (fj.contains("image")) frame.image = fj["image"].get<std::string>();

    s.frames.push_back(std::move(frame));
    ++index;
  }
  return s;
}

}  // namespace mhp

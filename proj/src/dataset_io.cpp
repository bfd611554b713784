#include "pse/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pse {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

std::ifstream open_input(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) fail("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) fail("cannot write " + path.string());
  return out;
}

json load_json(const fs::path& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

Vec3 vec3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) fail(what + " must be an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Poses are stored as 4x4 row-major homogeneous matrices; an alternative
// {rotation, translation} object form is accepted on input.
RigidTransform pose_from_json(const json& j, const std::string& what) {
  const json* rows = nullptr;
  if (j.is_array()) {
    rows = &j;
  } else if (j.is_object() && j.contains("matrix")) {
    rows = &j["matrix"];
  } else if (j.is_object() && j.contains("rotation") && j.contains("translation")) {
    const json& rot = j["rotation"];
    if (!rot.is_array() || rot.size() != 3) fail(what + " rotation must be 3x3");
    RigidTransform t;
    for (int r = 0; r < 3; ++r) {
      if (!rot[r].is_array() || rot[r].size() != 3) fail(what + " rotation must be 3x3");
      for (int c = 0; c < 3; ++c) t.rotation(r, c) = rot[r][c].get<double>();
    }
    t.translation = vec3_from_json(j["translation"], what + " translation");
    if (!t.is_valid(1e-6)) fail(what + " is not a rigid transform");
    return t;
  } else {
    fail(what + " must be a 4x4 matrix or {rotation, translation}");
  }
  if (!rows->is_array() || rows->size() != 4) fail(what + " must be a 4x4 matrix");
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    if (!(*rows)[r].is_array() || (*rows)[r].size() != 4) {
      fail(what + " must be a 4x4 matrix");
    }
    for (int c = 0; c < 4; ++c) m(r, c) = (*rows)[r][c].get<double>();
  }
  try {
    return RigidTransform::from_matrix(m);
  } catch (const std::invalid_argument& e) {
    fail(what + ": " + e.what());
  }
}

json pose_to_json(const RigidTransform& t) {
  const Mat4 m = t.to_matrix();
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
  }
  return rows;
}

Box3 box_from_json(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("center") || !j.contains("half_extents")) {
    fail(what + " must have center and half_extents");
  }
  try {
    return Box3(vec3_from_json(j["center"], what + " center"),
                vec3_from_json(j["half_extents"], what + " half_extents"));
  } catch (const std::invalid_argument& e) {
    fail(what + ": " + e.what());
  }
}

json box_to_json(const Box3& b) {
  return json{{"center", vec3_to_json(b.center)},
              {"half_extents", vec3_to_json(b.half_extents)}};
}

std::map<std::string, Category> categories_from_json(const json& root) {
  std::map<std::string, Category> table;
  if (!root.contains("categories")) return table;
  const json& cats = root["categories"];
  if (!cats.is_object()) fail("categories must be an object");
  for (const auto& [name, entry] : cats.items()) {
    Category cat = Category::defaults(name);
    if (entry.contains("symmetric")) cat.symmetric = entry["symmetric"].get<bool>();
    if (entry.contains("axis")) {
      cat.symmetry_axis =
          vec3_from_json(entry["axis"], "category " + name + " axis").normalized();
    }
    table[name] = cat;
  }
  return table;
}

Category resolve_category(const std::map<std::string, Category>& table,
                          const std::string& name) {
  const auto it = table.find(name);
  return it != table.end() ? it->second : Category::defaults(name);
}

Mat3 intrinsics_from_json(const json& j, const std::string& what) {
  Mat3 k = Mat3::Identity();
  if (j.is_array() && j.size() == 3) {
    for (int r = 0; r < 3; ++r) {
      if (!j[r].is_array() || j[r].size() != 3) fail(what + " must be 3x3");
      for (int c = 0; c < 3; ++c) k(r, c) = j[r][c].get<double>();
    }
    return k;
  }
  if (j.is_object()) {
    k(0, 0) = j.at("fx").get<double>();
    k(1, 1) = j.at("fy").get<double>();
    k(0, 2) = j.at("cx").get<double>();
    k(1, 2) = j.at("cy").get<double>();
    return k;
  }
  fail(what + " must be a 3x3 array or {fx,fy,cx,cy}");
}

json intrinsics_to_json(const Mat3& k) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back(json::array({k(r, 0), k(r, 1), k(r, 2)}));
  }
  return rows;
}

std::uint16_t read_u16_be(std::istream& in) {
  const int hi = in.get();
  const int lo = in.get();
  return static_cast<std::uint16_t>((hi << 8) | lo);
}

void write_u16_be(std::ostream& out, std::uint16_t v) {
  out.put(static_cast<char>(v >> 8));
  out.put(static_cast<char>(v & 0xFF));
}

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PgmHeader read_pgm_header(std::istream& in, const fs::path& path) {
  std::string magic;
  in >> magic;
  if (magic != "P5") fail(path.string() + " is not a binary PGM");
  const auto next_int = [&]() {
    // Skip whitespace and '#' comment lines between header fields.
    for (;;) {
      const int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (c != EOF && std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    int v = -1;
    in >> v;
    if (!in || v < 0) fail(path.string() + " has a malformed PGM header");
    return v;
  };
  PgmHeader h;
  h.width = next_int();
  h.height = next_int();
  h.maxval = next_int();
  in.get();  // single whitespace before raster
  if (h.width < 1 || h.height < 1) fail(path.string() + " has a malformed PGM header");
  return h;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* frame_name(MetricFrame frame) {
  return frame == MetricFrame::world ? "world" : "object";
}

MetricFrame parse_frame(const std::string& name) {
  if (name == "world") return MetricFrame::world;
  if (name == "object") return MetricFrame::object;
  fail("unknown frame '" + name + "' (expected world or object)");
}

TriangleMesh load_mesh_obj(const fs::path& path) {
  auto in = open_input(path);
  TriangleMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        fail(path.string() + ":" + std::to_string(line_no) + ": malformed vertex");
      }
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ls >> token) {
        const std::size_t slash = token.find('/');
        if (slash != std::string::npos) token.resize(slash);
        int idx = 0;
        try {
          idx = std::stoi(token);
        } catch (...) {
          fail(path.string() + ":" + std::to_string(line_no) + ": malformed face");
        }
        if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
        poly.push_back(idx - 1);
      }
      if (poly.size() < 3) {
        fail(path.string() + ":" + std::to_string(line_no) + ": malformed face");
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
      }
    }
  }
  try {
    mesh.validate();
  } catch (const std::invalid_argument& e) {
    fail(path.string() + ": " + e.what());
  }
  return mesh;
}

void save_mesh_obj(const fs::path& path, const TriangleMesh& mesh) {
  mesh.validate();
  auto out = open_output(path);
  for (const Vec3& v : mesh.vertices) {
    out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
        << format_double(v.z()) << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

PointSet load_points_xyz(const fs::path& path) {
  auto in = open_input(path);
  PointSet points;
  double x, y, z;
  while (in >> x >> y >> z) points.emplace_back(x, y, z);
  if (!in.eof()) fail(path.string() + ": malformed point line");
  if (points.empty()) fail(path.string() + ": empty point set");
  return points;
}

void save_points_xyz(const fs::path& path, const PointSet& points) {
  auto out = open_output(path);
  for (const Vec3& p : points) {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z()) << '\n';
  }
}

DepthMap load_depth_pgm(const fs::path& path) {
  auto in = open_input(path, std::ios::in | std::ios::binary);
  const PgmHeader h = read_pgm_header(in, path);
  if (h.maxval != 65535) fail(path.string() + " must be 16-bit (maxval 65535)");
  DepthMap depth(h.width, h.height);
  for (int r = 0; r < h.height; ++r) {
    for (int c = 0; c < h.width; ++c) {
      depth.at(r, c) = static_cast<float>(read_u16_be(in)) / 1000.0f;
    }
  }
  if (!in) fail(path.string() + " is truncated");
  return depth;
}

void save_depth_pgm(const fs::path& path, const DepthMap& depth) {
  auto out = open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << depth.width << ' ' << depth.height << "\n65535\n";
  for (int r = 0; r < depth.height; ++r) {
    for (int c = 0; c < depth.width; ++c) {
      const double mm = std::lround(static_cast<double>(depth.at(r, c)) * 1000.0);
      write_u16_be(out, static_cast<std::uint16_t>(std::clamp(mm, 0.0, 65535.0)));
    }
  }
}

MaskImage load_mask_pgm(const fs::path& path) {
  auto in = open_input(path, std::ios::in | std::ios::binary);
  const PgmHeader h = read_pgm_header(in, path);
  if (h.maxval != 255) fail(path.string() + " must be 8-bit (maxval 255)");
  MaskImage mask(h.width, h.height);
  in.read(reinterpret_cast<char*>(mask.data.data()),
          static_cast<std::streamsize>(mask.data.size()));
  if (!in) fail(path.string() + " is truncated");
  return mask;
}

void save_mask_pgm(const fs::path& path, const MaskImage& mask) {
  auto out = open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(mask.data.data()),
            static_cast<std::streamsize>(mask.data.size()));
}

GroundTruthDataset load_ground_truth(const fs::path& manifest) {
  const json root = load_json(manifest);
  if (!root.contains("samples") || !root["samples"].is_array()) {
    fail(manifest.string() + ": missing samples array");
  }
  GroundTruthDataset dataset;
  dataset.categories = categories_from_json(root);
  const fs::path base = manifest.parent_path();

  std::set<std::string> seen;
  for (const json& entry : root["samples"]) {
    GroundTruthSample sample;
    if (!entry.contains("sample_id")) fail(manifest.string() + ": sample without sample_id");
    sample.sample_id = entry["sample_id"].get<std::string>();
    const std::string where = "sample '" + sample.sample_id + "'";
    if (!seen.insert(sample.sample_id).second) fail("duplicate " + where);
    if (!entry.contains("category")) fail(where + ": missing category");
    sample.category = resolve_category(dataset.categories,
                                       entry["category"].get<std::string>());
    if (!entry.contains("pose")) fail(where + ": missing pose");
    sample.pose = pose_from_json(entry["pose"], where + " pose");
    if (!entry.contains("mesh")) fail(where + ": missing mesh");
    sample.mesh = load_mesh_obj(base / entry["mesh"].get<std::string>());
    sample.bbox = entry.contains("bbox") ? box_from_json(entry["bbox"], where + " bbox")
                                         : aabb_of(sample.mesh);
    dataset.samples.push_back(std::move(sample));
  }
  if (dataset.samples.empty()) fail(manifest.string() + ": no samples");
  std::sort(dataset.samples.begin(), dataset.samples.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  return dataset;
}

std::vector<Prediction> load_predictions(const fs::path& manifest,
                                         const GroundTruthDataset& gt) {
  const json root = load_json(manifest);
  if (!root.contains("predictions") || !root["predictions"].is_array()) {
    fail(manifest.string() + ": missing predictions array");
  }
  const fs::path base = manifest.parent_path();

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < gt.samples.size(); ++i) {
    index[gt.samples[i].sample_id] = i;
  }

  std::vector<Prediction> joined(gt.samples.size());
  for (std::size_t i = 0; i < gt.samples.size(); ++i) {
    joined[i].sample_id = gt.samples[i].sample_id;
  }

  std::set<std::string> seen;
  for (const json& entry : root["predictions"]) {
    if (!entry.contains("sample_id")) fail(manifest.string() + ": prediction without sample_id");
    const std::string id = entry["sample_id"].get<std::string>();
    const std::string where = "prediction for '" + id + "'";
    const auto it = index.find(id);
    if (it == index.end()) fail(where + ": unknown sample");
    if (!seen.insert(id).second) fail("duplicate " + where);

    const auto parse_hypothesis = [&](const json& h) {
      Hypothesis hyp;
      if (!h.contains("pose")) fail(where + ": missing pose");
      hyp.pose = pose_from_json(h["pose"], where + " pose");
      if (h.contains("mesh")) {
        hyp.shape = load_mesh_obj(base / h["mesh"].get<std::string>());
      } else if (h.contains("points")) {
        hyp.shape = load_points_xyz(base / h["points"].get<std::string>());
      } else {
        fail(where + ": needs a mesh or points file");
      }
      if (h.contains("bbox")) {
        hyp.bbox = box_from_json(h["bbox"], where + " bbox");
      } else if (const auto* mesh = std::get_if<TriangleMesh>(&hyp.shape)) {
        hyp.bbox = aabb_of(*mesh);
      } else {
        hyp.bbox = aabb_of(std::get<PointSet>(hyp.shape));
      }
      return hyp;
    };

    Prediction& pred = joined[it->second];
    if (entry.contains("hypotheses")) {
      if (!entry["hypotheses"].is_array()) fail(where + ": hypotheses must be an array");
      for (const json& h : entry["hypotheses"]) {
        pred.hypotheses.push_back(parse_hypothesis(h));
      }
    } else {
      pred.hypotheses.push_back(parse_hypothesis(entry));
    }
  }
  return joined;
}

SequenceData load_sequence(const fs::path& manifest) {
  const json root = load_json(manifest);
  if (!root.contains("frames") || !root["frames"].is_array()) {
    fail(manifest.string() + ": missing frames array");
  }
  const fs::path base = manifest.parent_path();

  SequenceData data;
  if (!root.contains("box")) fail(manifest.string() + ": missing box");
  data.box = box_from_json(root["box"], "box");
  const std::string category =
      root.contains("category") ? root["category"].get<std::string>() : "unknown";
  data.category = resolve_category(categories_from_json(root), category);

  int frame_no = 0;
  for (const json& entry : root["frames"]) {
    const std::string where = "frame " + std::to_string(frame_no++);
    DepthFrame frame;
    if (!entry.contains("depth")) fail(where + ": missing depth");
    frame.depth = load_depth_pgm(base / entry["depth"].get<std::string>());
    if (entry.contains("mask")) {
      frame.mask = load_mask_pgm(base / entry["mask"].get<std::string>());
    }
    if (!entry.contains("intrinsics")) fail(where + ": missing intrinsics");
    frame.intrinsics = intrinsics_from_json(entry["intrinsics"], where + " intrinsics");
    if (!entry.contains("camera_pose")) fail(where + ": missing camera_pose");
    frame.camera_pose = pose_from_json(entry["camera_pose"], where + " camera_pose");
    if (!entry.contains("object_pose")) fail(where + ": missing object_pose");
    data.object_poses.push_back(pose_from_json(entry["object_pose"], where + " object_pose"));
    frame.validate();
    data.frames.push_back(std::move(frame));
  }
  if (data.frames.empty()) fail(manifest.string() + ": no frames");
  return data;
}

void write_records_csv(const fs::path& path, const std::vector<EvaluationRecord>& records) {
  auto out = open_output(path);
  out << "sample_id,category,rotation_error_deg,translation_error_m,iou,fscore,"
         "chamfer_m,failed,seed,n_samples,frame\n";
  for (const EvaluationRecord& r : records) {
    out << r.sample_id << ',' << r.category << ',' << format_double(r.rotation_error_deg)
        << ',' << format_double(r.translation_error_m) << ','
        << (r.iou ? format_double(*r.iou) : "") << ','
        << (r.fscore ? format_double(*r.fscore) : "") << ','
        << format_double(r.chamfer_m) << ',' << (r.failed ? 1 : 0) << ',' << r.seed
        << ',' << r.n_samples << ',' << frame_name(r.frame) << '\n';
  }
}

void write_precision_csv(const fs::path& path, const std::vector<PrecisionReport>& reports) {
  auto out = open_output(path);
  std::set<std::string> categories;
  for (const PrecisionReport& report : reports) {
    for (const auto& [name, value] : report.per_category) categories.insert(name);
  }
  out << "threshold,overall";
  for (const std::string& c : categories) out << ',' << c;
  out << ",n_records,n_failed,n_nan\n";
  for (const PrecisionReport& report : reports) {
    out << report.spec.name << ',' << format_double(report.overall);
    for (const std::string& c : categories) {
      const auto it = std::find_if(report.per_category.begin(), report.per_category.end(),
                                   [&](const auto& p) { return p.first == c; });
      out << ',' << (it != report.per_category.end() ? format_double(it->second) : "");
    }
    out << ',' << report.n_records << ',' << report.n_failed << ',' << report.n_nan << '\n';
  }
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepPoint>& curve) {
  auto out = open_output(path);
  out << "threshold,precision\n";
  for (const SweepPoint& p : curve) {
    out << format_double(p.threshold) << ',' << format_double(p.precision) << '\n';
  }
}

void write_convergence_csv(const fs::path& path, const std::vector<ConvergenceRow>& rows) {
  auto out = open_output(path);
  out << convergence_csv(rows);
}

void write_metadata_json(const fs::path& path, const RunMetadata& meta) {
  json j;
  j["command"] = meta.command;
  j["seed"] = meta.seed;
  j["n_samples"] = meta.n_samples;
  j["frame"] = frame_name(meta.frame);
  j["fscore_delta_m"] = meta.fscore_delta_m;
  j["n_records"] = meta.n_records;
  j["n_failed"] = meta.n_failed;
  j["thresholds"] = meta.threshold_names;
  j["warnings"] = meta.warnings;
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void save_ground_truth(const fs::path& manifest, const GroundTruthDataset& gt,
                       const fs::path& mesh_dir) {
  // Canonical layout: samples sorted by id, categories covering every sample.
  std::vector<const GroundTruthSample*> order;
  order.reserve(gt.samples.size());
  for (const GroundTruthSample& s : gt.samples) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->sample_id < b->sample_id; });

  std::map<std::string, Category> table = gt.categories;
  for (const GroundTruthSample& s : gt.samples) table.emplace(s.category.name, s.category);

  json samples = json::array();
  for (const GroundTruthSample* s : order) {
    const fs::path rel = mesh_dir / (s->sample_id + ".obj");
    save_mesh_obj(manifest.parent_path() / rel, s->mesh);
    json entry;
    entry["sample_id"] = s->sample_id;
    entry["category"] = s->category.name;
    entry["pose"] = pose_to_json(s->pose);
    entry["mesh"] = rel.generic_string();
    entry["bbox"] = box_to_json(s->bbox);
    samples.push_back(std::move(entry));
  }
  json root;
  root["samples"] = std::move(samples);
  json cats = json::object();
  for (const auto& [name, cat] : table) {
    cats[name] = json{{"symmetric", cat.symmetric},
                      {"axis", vec3_to_json(cat.symmetry_axis)}};
  }
  root["categories"] = std::move(cats);
  auto out = open_output(manifest);
  out << root.dump(2) << '\n';
}

void save_predictions(const fs::path& manifest, const std::vector<Prediction>& predictions,
                      const fs::path& shape_dir) {
  json preds = json::array();
  for (const Prediction& p : predictions) {
    if (p.hypotheses.empty()) continue;
    json entry;
    entry["sample_id"] = p.sample_id;
    json hyps = json::array();
    for (std::size_t h = 0; h < p.hypotheses.size(); ++h) {
      const Hypothesis& hyp = p.hypotheses[h];
      json jh;
      jh["pose"] = pose_to_json(hyp.pose);
      jh["bbox"] = box_to_json(hyp.bbox);
      const std::string stem =
          p.sample_id + (p.hypotheses.size() > 1 ? "_h" + std::to_string(h) : "");
      if (const auto* mesh = std::get_if<TriangleMesh>(&hyp.shape)) {
        const fs::path rel = shape_dir / (stem + ".obj");
        save_mesh_obj(manifest.parent_path() / rel, *mesh);
        jh["mesh"] = rel.generic_string();
      } else {
        const fs::path rel = shape_dir / (stem + ".xyz");
        save_points_xyz(manifest.parent_path() / rel, std::get<PointSet>(hyp.shape));
        jh["points"] = rel.generic_string();
      }
      hyps.push_back(std::move(jh));
    }
    entry["hypotheses"] = std::move(hyps);
    preds.push_back(std::move(entry));
  }
  json root;
  root["predictions"] = std::move(preds);
  auto out = open_output(manifest);
  out << root.dump(2) << '\n';
}

void save_sequence(const fs::path& manifest, const SequenceData& data,
                   const fs::path& frame_dir) {
  json frames = json::array();
  for (std::size_t f = 0; f < data.frames.size(); ++f) {
    const DepthFrame& frame = data.frames[f];
    json entry;
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03zu", f);
    const fs::path depth_rel = frame_dir / (std::string(name) + "_depth.pgm");
    save_depth_pgm(manifest.parent_path() / depth_rel, frame.depth);
    entry["depth"] = depth_rel.generic_string();
    if (frame.mask) {
      const fs::path mask_rel = frame_dir / (std::string(name) + "_mask.pgm");
      save_mask_pgm(manifest.parent_path() / mask_rel, *frame.mask);
      entry["mask"] = mask_rel.generic_string();
    }
    entry["intrinsics"] = intrinsics_to_json(frame.intrinsics);
    entry["camera_pose"] = pose_to_json(frame.camera_pose);
    entry["object_pose"] = pose_to_json(data.object_poses[f]);
    frames.push_back(std::move(entry));
  }
  json root;
  root["frames"] = std::move(frames);
  root["box"] = box_to_json(data.box);
  root["category"] = data.category.name;
  root["categories"] =
      json{{data.category.name,
            json{{"symmetric", data.category.symmetric},
                 {"axis", vec3_to_json(data.category.symmetry_axis)}}}};
  auto out = open_output(manifest);
  out << root.dump(2) << '\n';
}

}  // namespace pse

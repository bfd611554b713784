#include "pse/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "pse/fixtures.hpp"
#include "pse/rng.hpp"
#include "test_util.hpp"

using namespace pse;
using test_util::fresh_dir;
using test_util::slurp;

namespace {

TriangleMesh tiny_mesh() {
  TriangleMesh mesh;
  mesh.vertices = {Vec3(0.0, 0.0, 0.0), Vec3(0.1, 0.0, 0.0), Vec3(0.0, 0.1, 0.05)};
  mesh.faces = {{0, 1, 2}};
  return mesh;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

const char* kIdentityPose =
    "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]";

bool throws_with_substring(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("obj round trip preserves every bit") {
  const auto dir = fresh_dir("pse_io_obj");
  TriangleMesh mesh;
  mesh.vertices = {Vec3(1.0 / 3.0, -2.0 / 7.0, 0.1), Vec3(std::sqrt(2.0), 1e-17, -5.0),
                   Vec3(0.0, 123456.789, 2.5e-3), Vec3(-0.25, 0.75, 1.0)};
  mesh.faces = {{0, 1, 2}, {0, 2, 3}};

  save_mesh_obj(dir / "m.obj", mesh);
  const auto back = load_mesh_obj(dir / "m.obj");
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK(back.vertices[i] == mesh.vertices[i]);
  }
  CHECK(back.faces == mesh.faces);

  // Saving again produces identical bytes.
  save_mesh_obj(dir / "m2.obj", back);
  CHECK(slurp(dir / "m.obj") == slurp(dir / "m2.obj"));
}

TEST_CASE("obj reader accepts common wavefront variants") {
  const auto dir = fresh_dir("pse_io_obj_variants");
  write_text(dir / "quad.obj",
             "# header comment\n"
             "v 0 0 0\n"
             "v 1 0 0\n"
             "v 1 1 0\n"
             "v 0 1 0\n"
             "f 1 2 3\n"
             "f -4 -2 -1\n"
             "f 1/5 2/6/7 3//8\n"
             "f 1/1 2/2 3/3 4/4\n");
  const auto mesh = load_mesh_obj(dir / "quad.obj");
  REQUIRE(mesh.vertices.size() == 4);
  const std::vector<std::array<int, 3>> expected = {
      {0, 1, 2}, {0, 2, 3}, {0, 1, 2}, {0, 1, 2}, {0, 2, 3}};
  CHECK(mesh.faces == expected);

  write_text(dir / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  CHECK_THROWS_AS(load_mesh_obj(dir / "bad.obj"), std::invalid_argument);
  CHECK(throws_with_substring([&] { load_mesh_obj(dir / "gone.obj"); }, "cannot open"));
}

TEST_CASE("xyz round trip") {
  const auto dir = fresh_dir("pse_io_xyz");
  PointSet points{Vec3(0.5, -0.25, 1.0 / 3.0), Vec3(1e-16, 2.0, -3.5)};
  save_points_xyz(dir / "p.xyz", points);
  const auto back = load_points_xyz(dir / "p.xyz");
  REQUIRE(back.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) CHECK(back[i] == points[i]);
}

TEST_CASE("depth pgm round trip") {
  const auto dir = fresh_dir("pse_io_depth");
  DepthMap depth(3, 2);
  const float values[] = {0.0f, 0.001f, 0.257f, 1.5f, 65.535f, 0.999f};
  depth.data.assign(values, values + 6);
  save_depth_pgm(dir / "d.pgm", depth);

  const auto back = load_depth_pgm(dir / "d.pgm");
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  REQUIRE(back.data.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(back.data[i] == depth.data[i]);

  const auto bytes = slurp(dir / "d.pgm");
  CHECK(bytes.substr(0, 3) == "P5\n");
  CHECK(bytes.find("65535") != std::string::npos);
}

TEST_CASE("mask pgm round trip") {
  const auto dir = fresh_dir("pse_io_mask");
  MaskImage mask(4, 3, 0);
  mask.at(0, 0) = 255;
  mask.at(2, 3) = 7;
  save_mask_pgm(dir / "m.pgm", mask);
  const auto back = load_mask_pgm(dir / "m.pgm");
  CHECK(back.width == 4);
  CHECK(back.height == 3);
  CHECK(back.data == mask.data);

  // Depth loader refuses the 8-bit file.
  CHECK_THROWS_AS(load_depth_pgm(dir / "m.pgm"), std::invalid_argument);
}

TEST_CASE("doubles survive the text formats") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, -2.5e300, 0.0, 12345.6789,
                   std::numeric_limits<double>::denorm_min()}) {
    const std::string text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
}

TEST_CASE("ground truth manifest round trip") {
  const auto dir = fresh_dir("pse_io_gt");
  Rng rng(71);

  GroundTruthDataset gt;
  Category bottle = Category::defaults("bottle");
  Category tool = Category::defaults("tool");
  tool.symmetric = true;
  tool.symmetry_axis = Vec3::UnitZ();
  gt.categories["bottle"] = bottle;
  gt.categories["tool"] = tool;

  for (int i = 0; i < 3; ++i) {
    GroundTruthSample s;
    s.sample_id = "s" + std::to_string(2 - i);  // reversed on purpose
    s.category = i == 0 ? tool : bottle;
    s.pose = test_util::random_pose(rng, 0.5);
    s.mesh = tiny_mesh();
    s.bbox = Box3(Vec3(0.01 * i, 0.0, 0.0), Vec3(0.05, 0.06, 0.07));
    gt.samples.push_back(std::move(s));
  }

  save_ground_truth(dir / "gt.json", gt, "meshes");
  const auto loaded = load_ground_truth(dir / "gt.json");

  REQUIRE(loaded.samples.size() == 3);
  CHECK(loaded.samples[0].sample_id == "s0");
  CHECK(loaded.samples[1].sample_id == "s1");
  CHECK(loaded.samples[2].sample_id == "s2");

  // s2 was written first with the custom category.
  const auto& custom = loaded.samples[2];
  CHECK(custom.category.name == "tool");
  CHECK(custom.category.symmetric);
  CHECK((custom.category.symmetry_axis - Vec3::UnitZ()).norm() < 1e-15);

  for (const auto& s : loaded.samples) {
    const auto& original = *std::find_if(
        gt.samples.begin(), gt.samples.end(),
        [&](const auto& o) { return o.sample_id == s.sample_id; });
    CHECK(s.pose.rotation == original.pose.rotation);
    CHECK(s.pose.translation == original.pose.translation);
    CHECK((s.bbox.center - original.bbox.center).norm() == 0.0);
    CHECK((s.bbox.half_extents - original.bbox.half_extents).norm() == 0.0);
    REQUIRE(s.mesh.vertices.size() == 3);
    for (int v = 0; v < 3; ++v) CHECK(s.mesh.vertices[v] == original.mesh.vertices[v]);
  }

  // Rewriting the loaded dataset reproduces the manifest byte for byte.
  const auto dir2 = fresh_dir("pse_io_gt2");
  save_ground_truth(dir2 / "gt.json", loaded, "meshes");
  CHECK(slurp(dir / "gt.json") == slurp(dir2 / "gt.json"));
}

TEST_CASE("ground truth manifest validation") {
  const auto dir = fresh_dir("pse_io_gt_bad");
  save_mesh_obj(dir / "m.obj", tiny_mesh());

  SUBCASE("duplicate ids") {
    write_text(dir / "dup.json",
               std::string("{\"samples\":[") +
                   "{\"sample_id\":\"s0\",\"category\":\"mug\",\"pose\":" + kIdentityPose +
                   ",\"mesh\":\"m.obj\"}," +
                   "{\"sample_id\":\"s0\",\"category\":\"mug\",\"pose\":" + kIdentityPose +
                   ",\"mesh\":\"m.obj\"}]}");
    CHECK(throws_with_substring([&] { load_ground_truth(dir / "dup.json"); },
                                "duplicate sample 's0'"));
  }

  SUBCASE("missing mesh file names the path") {
    write_text(dir / "missing.json",
               std::string("{\"samples\":[{\"sample_id\":\"s0\",\"category\":\"mug\","
                           "\"pose\":") +
                   kIdentityPose + ",\"mesh\":\"nope/gone.obj\"}]}");
    CHECK(throws_with_substring([&] { load_ground_truth(dir / "missing.json"); },
                                "gone.obj"));
  }

  SUBCASE("default bbox comes from the mesh bounds") {
    write_text(dir / "nobox.json",
               std::string("{\"samples\":[{\"sample_id\":\"s0\",\"category\":\"mug\","
                           "\"pose\":") +
                   kIdentityPose + ",\"mesh\":\"m.obj\"}]}");
    const auto loaded = load_ground_truth(dir / "nobox.json");
    const auto expected = aabb_of(tiny_mesh());
    CHECK((loaded.samples[0].bbox.center - expected.center).norm() < 1e-15);
    CHECK((loaded.samples[0].bbox.half_extents - expected.half_extents).norm() < 1e-15);
  }

  SUBCASE("legacy rotation and translation pose form") {
    write_text(dir / "legacy.json",
               "{\"samples\":[{\"sample_id\":\"s0\",\"category\":\"mug\","
               "\"pose\":{\"rotation\":[[1,0,0],[0,1,0],[0,0,1]],"
               "\"translation\":[0.1,0.2,0.3]},\"mesh\":\"m.obj\"}]}");
    const auto loaded = load_ground_truth(dir / "legacy.json");
    CHECK((loaded.samples[0].pose.translation - Vec3(0.1, 0.2, 0.3)).norm() < 1e-15);
  }

  SUBCASE("missing manifest") {
    CHECK(throws_with_substring([&] { load_ground_truth(dir / "void.json"); },
                                "cannot open"));
  }
}

TEST_CASE("a full dataset layout loads sorted") {
  const auto dir = fresh_dir("pse_io_gt_75");
  GroundTruthDataset gt;
  const std::vector<std::string> cats{"bottle", "mug", "laptop"};
  for (int c = 0; c < 3; ++c) {
    for (int seq = 0; seq < 5; ++seq) {
      for (int f = 0; f < 5; ++f) {
        GroundTruthSample s;
        char id[32];
        std::snprintf(id, sizeof(id), "%s_%02d_%02d", cats[c].c_str(), seq, f);
        s.sample_id = id;
        s.category = Category::defaults(cats[c]);
        s.pose = RigidTransform::identity();
        s.mesh = tiny_mesh();
        s.bbox = Box3(Vec3::Zero(), Vec3(0.05, 0.05, 0.05));
        gt.samples.push_back(std::move(s));
      }
    }
  }
  save_ground_truth(dir / "gt.json", gt, "meshes");
  const auto loaded = load_ground_truth(dir / "gt.json");
  REQUIRE(loaded.samples.size() == 75);
  CHECK(std::is_sorted(loaded.samples.begin(), loaded.samples.end(),
                       [](const auto& a, const auto& b) {
                         return a.sample_id < b.sample_id;
                       }));
  CHECK(loaded.categories.size() == 3);
}

TEST_CASE("prediction manifests") {
  const auto dir = fresh_dir("pse_io_pred");
  GroundTruthDataset gt;
  for (int i = 0; i < 3; ++i) {
    GroundTruthSample s;
    s.sample_id = "s" + std::to_string(i);
    s.category = Category::defaults("mug");
    s.pose = RigidTransform::identity();
    s.mesh = tiny_mesh();
    s.bbox = Box3(Vec3::Zero(), Vec3(0.05, 0.05, 0.05));
    gt.samples.push_back(std::move(s));
  }
  save_ground_truth(dir / "gt.json", gt, "meshes");
  const auto dataset = load_ground_truth(dir / "gt.json");

  SUBCASE("multi-hypothesis round trip with mesh and point shapes") {
    std::vector<Prediction> preds(3);
    for (int i = 0; i < 3; ++i) preds[i].sample_id = "s" + std::to_string(i);
    for (int h = 0; h < 3; ++h) {
      Hypothesis hyp;
      hyp.pose = RigidTransform::about_axis(Vec3::UnitY(), radians(10.0 * h));
      hyp.shape = tiny_mesh();
      hyp.bbox = Box3(Vec3::Zero(), Vec3(0.04, 0.05, 0.06));
      preds[0].hypotheses.push_back(std::move(hyp));
    }
    Hypothesis cloud;
    cloud.pose = RigidTransform::identity();
    cloud.shape = PointSet{Vec3(0.01, 0.02, 0.03), Vec3(-0.01, 0.0, 0.02)};
    cloud.bbox = Box3(Vec3::Zero(), Vec3(0.03, 0.03, 0.03));
    preds[1].hypotheses.push_back(std::move(cloud));
    // preds[2] stays empty: the method failed there.

    save_predictions(dir / "pred.json", preds, "shapes");
    const auto loaded = load_predictions(dir / "pred.json", dataset);

    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].sample_id == "s0");
    REQUIRE(loaded[0].hypotheses.size() == 3);
    for (int h = 0; h < 3; ++h) {
      CHECK(rotation_error(loaded[0].hypotheses[h].pose, preds[0].hypotheses[h].pose) <
            1e-9);
      CHECK(std::holds_alternative<TriangleMesh>(loaded[0].hypotheses[h].shape));
    }
    REQUIRE(loaded[1].hypotheses.size() == 1);
    const auto* pts = std::get_if<PointSet>(&loaded[1].hypotheses[0].shape);
    REQUIRE(pts != nullptr);
    CHECK(pts->size() == 2);
    CHECK(loaded[2].hypotheses.empty());

    // Rewrite determinism.
    const auto dir2 = fresh_dir("pse_io_pred2");
    save_ground_truth(dir2 / "gt.json", gt, "meshes");
    save_predictions(dir2 / "pred.json", preds, "shapes");
    CHECK(slurp(dir / "pred.json") == slurp(dir2 / "pred.json"));
  }

  SUBCASE("inline single hypothesis form") {
    save_mesh_obj(dir / "shape.obj", tiny_mesh());
    write_text(dir / "inline.json",
               std::string("{\"predictions\":[{\"sample_id\":\"s1\",\"pose\":") +
                   kIdentityPose + ",\"mesh\":\"shape.obj\"}]}");
    const auto loaded = load_predictions(dir / "inline.json", dataset);
    CHECK(loaded[0].hypotheses.empty());
    REQUIRE(loaded[1].hypotheses.size() == 1);
    // No bbox given: falls back to the shape bounds.
    const auto expected = aabb_of(tiny_mesh());
    CHECK((loaded[1].hypotheses[0].bbox.center - expected.center).norm() < 1e-15);
  }

  SUBCASE("unknown sample") {
    save_mesh_obj(dir / "shape.obj", tiny_mesh());
    write_text(dir / "unknown.json",
               std::string("{\"predictions\":[{\"sample_id\":\"zz\",\"pose\":") +
                   kIdentityPose + ",\"mesh\":\"shape.obj\"}]}");
    CHECK(throws_with_substring([&] { load_predictions(dir / "unknown.json", dataset); },
                                "unknown sample"));
  }

  SUBCASE("duplicate prediction") {
    save_mesh_obj(dir / "shape.obj", tiny_mesh());
    const std::string one = std::string("{\"sample_id\":\"s0\",\"pose\":") +
                            kIdentityPose + ",\"mesh\":\"shape.obj\"}";
    write_text(dir / "dup.json", "{\"predictions\":[" + one + "," + one + "]}");
    CHECK(throws_with_substring([&] { load_predictions(dir / "dup.json", dataset); },
                                "duplicate prediction"));
  }
}

TEST_CASE("sequence manifest round trip") {
  const auto dir = fresh_dir("pse_io_seq");
  SequenceData data;
  DepthFrame frame;
  frame.depth = DepthMap(2, 2);
  frame.depth.data = {0.5f, 0.25f, 0.75f, 0.0f};
  frame.intrinsics = Mat3::Identity();
  frame.intrinsics(0, 0) = frame.intrinsics(1, 1) = 200.0;
  frame.intrinsics(0, 2) = 0.5;
  frame.intrinsics(1, 2) = 0.5;
  frame.camera_pose = RigidTransform::about_axis(Vec3::UnitX(), radians(30.0));
  frame.camera_pose.translation = Vec3(0.0, 0.1, -0.4);
  MaskImage mask(2, 2, 1);
  mask.at(1, 1) = 0;
  frame.mask = mask;
  data.frames.push_back(std::move(frame));
  data.object_poses.push_back(RigidTransform::about_axis(Vec3::UnitZ(), radians(15.0)));
  data.box = Box3(Vec3(0.0, 0.01, 0.0), Vec3(0.06, 0.07, 0.08));
  data.category = Category::defaults("can");

  save_sequence(dir / "sequence.json", data, "frames");
  const auto loaded = load_sequence(dir / "sequence.json");

  REQUIRE(loaded.frames.size() == 1);
  CHECK(loaded.frames[0].depth.data == data.frames[0].depth.data);
  REQUIRE(loaded.frames[0].mask.has_value());
  CHECK(loaded.frames[0].mask->data == mask.data);
  CHECK(loaded.frames[0].intrinsics == data.frames[0].intrinsics);
  CHECK(rotation_error(loaded.frames[0].camera_pose, data.frames[0].camera_pose) < 1e-12);
  CHECK(rotation_error(loaded.object_poses[0], data.object_poses[0]) < 1e-12);
  CHECK((loaded.box.center - data.box.center).norm() == 0.0);
  CHECK(loaded.category.name == "can");
  CHECK(loaded.category.symmetric);
}

TEST_CASE("csv writers emit exact bytes") {
  const auto dir = fresh_dir("pse_io_csv");

  SUBCASE("records") {
    std::vector<EvaluationRecord> records(2);
    records[0].sample_id = "a";
    records[0].category = "mug";
    records[0].rotation_error_deg = 1.5;
    records[0].translation_error_m = 0.25;
    records[0].iou = 0.5;
    records[0].fscore = 1.0;
    records[0].chamfer_m = 0.125;
    records[0].seed = 7;
    records[0].n_samples = 100;
    records[1].sample_id = "b";
    records[1].category = "can";
    records[1].rotation_error_deg = std::numeric_limits<double>::quiet_NaN();
    records[1].translation_error_m = std::numeric_limits<double>::quiet_NaN();
    records[1].chamfer_m = std::numeric_limits<double>::quiet_NaN();
    records[1].failed = true;
    records[1].seed = 9;
    records[1].n_samples = 100;

    write_records_csv(dir / "records.csv", records);
    CHECK(slurp(dir / "records.csv") ==
          "sample_id,category,rotation_error_deg,translation_error_m,iou,fscore,"
          "chamfer_m,failed,seed,n_samples,frame\n"
          "a,mug,1.5,0.25,0.5,1,0.125,0,7,100,world\n"
          "b,can,nan,nan,,,nan,1,9,100,world\n");
  }

  SUBCASE("precision") {
    std::vector<PrecisionReport> reports(2);
    reports[0].spec.name = "t1";
    reports[0].overall = 0.5;
    reports[0].per_category = {{"bowl", 0.25}, {"mug", 0.75}};
    reports[0].n_records = 20;
    reports[0].n_failed = 1;
    reports[0].n_nan = 2;
    reports[1].spec.name = "t2";
    reports[1].overall = 1.0;
    reports[1].per_category = {{"mug", 1.0}};
    reports[1].n_records = 10;

    write_precision_csv(dir / "precision.csv", reports);
    CHECK(slurp(dir / "precision.csv") ==
          "threshold,overall,bowl,mug,n_records,n_failed,n_nan\n"
          "t1,0.5,0.25,0.75,20,1,2\n"
          "t2,1,,1,10,0,0\n");
  }

  SUBCASE("sweep") {
    std::vector<SweepPoint> curve{{0.0, 0.0}, {0.5, 0.25}, {1.0, 1.0}};
    write_sweep_csv(dir / "sweep.csv", curve);
    CHECK(slurp(dir / "sweep.csv") == "threshold,precision\n0,0\n0.5,0.25\n1,1\n");
  }

  SUBCASE("convergence") {
    write_convergence_csv(dir / "conv.csv", {{100, 0.25, 0.5}});
    CHECK(slurp(dir / "conv.csv") == "n_samples,chamfer_m,fscore\n100,0.25,0.5\n");
  }
}

TEST_CASE("metadata json") {
  const auto dir = fresh_dir("pse_io_meta");
  RunMetadata meta;
  meta.command = "evaluate";
  meta.seed = 5;
  meta.n_samples = 1234;
  meta.frame = MetricFrame::object;
  meta.fscore_delta_m = 0.01;
  meta.n_records = 6;
  meta.n_failed = 1;
  meta.threshold_names = {"10deg_2cm", "5deg_1cm"};
  meta.warnings = {"one sample failed"};

  write_metadata_json(dir / "metadata.json", meta);
  const auto text = slurp(dir / "metadata.json");
  CHECK(text.find("\"command\": \"evaluate\"") != std::string::npos);
  CHECK(text.find("\"seed\": 5") != std::string::npos);
  CHECK(text.find("\"n_samples\": 1234") != std::string::npos);
  CHECK(text.find("\"frame\": \"object\"") != std::string::npos);
  CHECK(text.find("\"10deg_2cm\"") != std::string::npos);
  CHECK(text.find("one sample failed") != std::string::npos);

  write_metadata_json(dir / "metadata2.json", meta);
  CHECK(slurp(dir / "metadata2.json") == text);
}

TEST_CASE("frame names") {
  CHECK(std::string(frame_name(MetricFrame::world)) == "world");
  CHECK(std::string(frame_name(MetricFrame::object)) == "object");
  CHECK(parse_frame("world") == MetricFrame::world);
  CHECK(parse_frame("object") == MetricFrame::object);
  CHECK(throws_with_substring([] { parse_frame("screen"); },
                              "unknown frame 'screen' (expected world or object)"));
}

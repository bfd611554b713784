#include "pse/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "pse/rng.hpp"

namespace pse {
namespace fixtures {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

TriangleMesh scale_mesh(TriangleMesh mesh, double s) {
  for (Vec3& v : mesh.vertices) v *= s;
  return mesh;
}

Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

}  // namespace

TriangleMesh box_mesh(const Vec3& full_extents) {
  const Box3 box(Vec3::Zero(), 0.5 * full_extents);
  const ConvexPolytope poly = ConvexPolytope::from_box(box);
  TriangleMesh mesh;
  mesh.vertices = poly.vertices;
  for (const auto& face : poly.faces) {
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      mesh.faces.push_back({face[0], face[i], face[i + 1]});
    }
  }
  mesh.validate();
  return mesh;
}

TriangleMesh lathe_mesh(const std::vector<std::pair<double, double>>& profile,
                        int segments) {
  if (profile.size() < 2) throw std::invalid_argument("profile needs at least 2 points");
  if (segments < 3) throw std::invalid_argument("need at least 3 segments");

  TriangleMesh mesh;
  // ring_start[i] = first vertex of ring i, or the pole vertex when r == 0.
  std::vector<int> ring_start(profile.size());
  std::vector<bool> is_pole(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto [r, y] = profile[i];
    if (r < 0.0) throw std::invalid_argument("profile radius must be non-negative");
    ring_start[i] = static_cast<int>(mesh.vertices.size());
    is_pole[i] = r == 0.0;
    if (is_pole[i]) {
      mesh.vertices.emplace_back(0.0, y, 0.0);
    } else {
      for (int s = 0; s < segments; ++s) {
        const double a = kTwoPi * s / segments;
        mesh.vertices.emplace_back(r * std::cos(a), y, r * std::sin(a));
      }
    }
  }

  const auto ring_vertex = [&](std::size_t i, int s) {
    return ring_start[i] + (s % segments);
  };
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    if (is_pole[i] && is_pole[i + 1]) continue;
    for (int s = 0; s < segments; ++s) {
      if (is_pole[i]) {
        mesh.faces.push_back(
            {ring_start[i], ring_vertex(i + 1, s), ring_vertex(i + 1, s + 1)});
      } else if (is_pole[i + 1]) {
        mesh.faces.push_back(
            {ring_vertex(i, s), ring_start[i + 1], ring_vertex(i, s + 1)});
      } else {
        mesh.faces.push_back(
            {ring_vertex(i, s), ring_vertex(i + 1, s), ring_vertex(i + 1, s + 1)});
        mesh.faces.push_back(
            {ring_vertex(i, s), ring_vertex(i + 1, s + 1), ring_vertex(i, s + 1)});
      }
    }
  }

  const auto cap = [&](std::size_t i, bool facing_down) {
    if (is_pole[i]) return;
    const int center = static_cast<int>(mesh.vertices.size());
    mesh.vertices.emplace_back(0.0, profile[i].second, 0.0);
    for (int s = 0; s < segments; ++s) {
      if (facing_down) {
        mesh.faces.push_back({center, ring_vertex(i, s), ring_vertex(i, s + 1)});
      } else {
        mesh.faces.push_back({center, ring_vertex(i, s + 1), ring_vertex(i, s)});
      }
    }
  };
  cap(0, true);
  cap(profile.size() - 1, false);

  mesh.validate();
  return mesh;
}

TriangleMesh cylinder_mesh(double radius, double height, int segments) {
  return lathe_mesh({{radius, -0.5 * height}, {radius, 0.5 * height}}, segments);
}

TriangleMesh sphere_mesh(double radius, int rings, int segments) {
  std::vector<std::pair<double, double>> profile;
  for (int k = 0; k <= rings; ++k) {
    const double polar = EIGEN_PI * k / rings;
    profile.emplace_back(radius * std::sin(polar), -radius * std::cos(polar));
  }
  return lathe_mesh(profile, segments);
}

TriangleMesh merge_meshes(const TriangleMesh& a, const TriangleMesh& b) {
  TriangleMesh out = a;
  const int offset = static_cast<int>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& f : b.faces) {
    out.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  }
  return out;
}

TriangleMesh mug_mesh(bool with_handle) {
  const double outer_r = 0.04;
  const double height = 0.10;
  const double wall = 0.004;
  const double half = 0.5 * height;
  TriangleMesh body = lathe_mesh({{outer_r, -half},
                                  {outer_r, half},
                                  {outer_r - wall, half},
                                  {outer_r - wall, -half + wall},
                                  {0.0, -half + wall}},
                                 48);
  if (!with_handle) return body;
  TriangleMesh handle = box_mesh(Vec3(0.03, 0.06, 0.012));
  RigidTransform offset;
  offset.translation = Vec3(outer_r + 0.012, 0.0, 0.0);
  return merge_meshes(body, apply_transform(offset, handle));
}

TriangleMesh category_mesh(const std::string& category, std::uint64_t seed) {
  Rng rng(seed);
  const double s = rng.uniform(0.85, 1.2);
  if (category == "bottle") {
    const double r = 0.032 * s;
    const double h = 0.18 * s;
    return lathe_mesh({{r, -0.5 * h},
                       {r, 0.15 * h},
                       {0.4 * r, 0.32 * h},
                       {0.4 * r, 0.5 * h}},
                      36);
  }
  if (category == "bowl") {
    const double r = 0.075 * s;
    const double h = 0.05 * s;
    return lathe_mesh({{0.45 * r, -0.5 * h}, {r, 0.2 * h}, {0.95 * r, 0.5 * h}}, 36);
  }
  if (category == "can") {
    return cylinder_mesh(0.033 * s, 0.11 * s, 36);
  }
  if (category == "mug") {
    return scale_mesh(mug_mesh(true), s);
  }
  if (category == "laptop") {
    TriangleMesh base = box_mesh(s * Vec3(0.30, 0.014, 0.21));
    TriangleMesh screen = box_mesh(s * Vec3(0.30, 0.20, 0.008));
    RigidTransform up = RigidTransform::about_axis(Vec3::UnitX(), radians(-20.0));
    up.translation = s * Vec3(0.0, 0.09, -0.12);
    return merge_meshes(base, apply_transform(up, screen));
  }
  if (category == "camera") {
    TriangleMesh bodybox = box_mesh(s * Vec3(0.11, 0.07, 0.05));
    TriangleMesh lens = cylinder_mesh(0.024 * s, 0.035 * s, 24);
    RigidTransform fwd = RigidTransform::about_axis(Vec3::UnitX(), radians(90.0));
    fwd.translation = s * Vec3(0.0, 0.0, 0.04);
    return merge_meshes(bodybox, apply_transform(fwd, lens));
  }
  return box_mesh(s * Vec3(0.08, 0.06, 0.1));
}

namespace {

constexpr double kRayEps = 1e-9;

// Smallest positive ray parameter, or infinity on a miss. Rays are
// o + t*d in the primitive frame; t equals camera z-depth because d keeps
// unit z in the camera frame and rigid transforms preserve scale.
double intersect_sphere(const Vec3& o, const Vec3& d, const SceneSphere& s) {
  const Vec3 oc = o - s.center;
  const double a = d.dot(d);
  const double b = 2.0 * d.dot(oc);
  const double c = oc.dot(oc) - s.radius * s.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double root = std::sqrt(disc);
  const double t0 = (-b - root) / (2.0 * a);
  if (t0 > kRayEps) return t0;
  const double t1 = (-b + root) / (2.0 * a);
  if (t1 > kRayEps) return t1;
  return std::numeric_limits<double>::infinity();
}

double intersect_box_local(const Vec3& o, const Vec3& d, const Box3& box) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double lo = box.min()[i];
    const double hi = box.max()[i];
    if (std::abs(d[i]) < 1e-15) {
      if (o[i] < lo || o[i] > hi) return std::numeric_limits<double>::infinity();
      continue;
    }
    double t0 = (lo - o[i]) / d[i];
    double t1 = (hi - o[i]) / d[i];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_exit < t_enter || t_exit <= kRayEps) {
    return std::numeric_limits<double>::infinity();
  }
  return t_enter > kRayEps ? t_enter : std::numeric_limits<double>::infinity();
}

double intersect_cylinder_local(const Vec3& o, const Vec3& d, double radius,
                                double half_height) {
  double best = std::numeric_limits<double>::infinity();
  const double a = d.x() * d.x() + d.z() * d.z();
  if (a > 1e-15) {
    const double b = 2.0 * (o.x() * d.x() + o.z() * d.z());
    const double c = o.x() * o.x() + o.z() * o.z() - radius * radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      for (const double t : {(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)}) {
        if (t > kRayEps && t < best && std::abs(o.y() + t * d.y()) <= half_height) {
          best = t;
        }
      }
    }
  }
  if (std::abs(d.y()) > 1e-15) {
    for (const double cap_y : {-half_height, half_height}) {
      const double t = (cap_y - o.y()) / d.y();
      if (t > kRayEps && t < best) {
        const double x = o.x() + t * d.x();
        const double z = o.z() + t * d.z();
        if (x * x + z * z <= radius * radius) best = t;
      }
    }
  }
  return best;
}

}  // namespace

RenderedView render_depth(const Scene& scene, const Mat3& intrinsics, int width,
                          int height, const RigidTransform& camera_pose) {
  if (width < 1 || height < 1) throw std::invalid_argument("invalid image size");
  const double fx = intrinsics(0, 0);
  const double fy = intrinsics(1, 1);
  const double cx = intrinsics(0, 2);
  const double cy = intrinsics(1, 2);

  // Rays are cast in each primitive's own frame (spheres live in world).
  std::vector<RigidTransform> to_local;
  to_local.reserve(scene.primitives.size());
  for (const ScenePrimitive& prim : scene.primitives) {
    if (const auto* b = std::get_if<SceneBox>(&prim)) {
      to_local.push_back(b->pose.inverse() * camera_pose);
    } else if (const auto* c = std::get_if<SceneCylinder>(&prim)) {
      to_local.push_back(c->pose.inverse() * camera_pose);
    } else {
      to_local.push_back(camera_pose);  // spheres live in the world frame
    }
  }

  RenderedView view;
  view.depth = DepthMap(width, height, 0.0f);
  view.mask = MaskImage(width, height, 0);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const Vec3 dir_cam((u - cx) / fx, (v - cy) / fy, 1.0);
      double best = std::numeric_limits<double>::infinity();
      int best_prim = -1;
      for (std::size_t p = 0; p < scene.primitives.size(); ++p) {
        const Vec3 o = to_local[p].translation;
        const Vec3 d = to_local[p].rotation * dir_cam;
        double t = std::numeric_limits<double>::infinity();
        if (const auto* s = std::get_if<SceneSphere>(&scene.primitives[p])) {
          t = intersect_sphere(o, d, *s);
        } else if (const auto* b = std::get_if<SceneBox>(&scene.primitives[p])) {
          t = intersect_box_local(o, d, b->box);
        } else if (const auto* c = std::get_if<SceneCylinder>(&scene.primitives[p])) {
          t = intersect_cylinder_local(o, d, c->radius, c->half_height);
        }
        if (t < best) {
          best = t;
          best_prim = static_cast<int>(p);
        }
      }
      if (best_prim >= 0) {
        view.depth.at(v, u) = static_cast<float>(best);
        if (best_prim == scene.mask_target) view.mask.at(v, u) = 1;
      }
    }
  }
  return view;
}

RigidTransform look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint) {
  const Vec3 z = (target - eye).normalized();
  Vec3 up = up_hint;
  if (std::abs(z.dot(up.normalized())) > 0.999) up = Vec3::UnitX();
  const Vec3 y_des = -up.normalized();
  const Vec3 x = y_des.cross(z).normalized();
  const Vec3 y = z.cross(x);
  RigidTransform pose;
  pose.rotation.col(0) = x;
  pose.rotation.col(1) = y;
  pose.rotation.col(2) = z;
  pose.translation = eye;
  return pose;
}

SequenceData cube_sequence(const CubeSceneParams& params) {
  Scene scene;
  SceneBox cube;
  cube.box = Box3(Vec3::Zero(), Vec3::Constant(0.5 * params.cube_side));
  scene.primitives.push_back(cube);
  scene.primitives.push_back(SceneSphere{Vec3::Zero(), params.background_radius});
  scene.mask_target = 0;

  Mat3 k = Mat3::Identity();
  k(0, 0) = k(1, 1) = params.focal;
  k(0, 2) = 0.5 * (params.width - 1);
  k(1, 2) = 0.5 * (params.height - 1);

  SequenceData data;
  data.box = Box3(Vec3::Zero(), Vec3::Constant(0.5 * params.seed_box_side));
  data.category = Category::defaults("box");

  for (int i = 0; i < params.n_views; ++i) {
    const double az = kTwoPi * i / params.n_views;
    const double el = radians(i % 2 == 0 ? 30.0 : -30.0);
    const Vec3 eye = params.orbit_radius *
                     Vec3(std::cos(az) * std::cos(el), std::sin(el),
                          std::sin(az) * std::cos(el));
    DepthFrame frame;
    frame.camera_pose = look_at(eye, Vec3::Zero());
    frame.intrinsics = k;
    RenderedView view =
        render_depth(scene, k, params.width, params.height, frame.camera_pose);
    frame.depth = std::move(view.depth);
    frame.mask = std::move(view.mask);
    data.frames.push_back(std::move(frame));
    data.object_poses.push_back(RigidTransform::identity());
  }
  return data;
}

Box3 cube_truth(const CubeSceneParams& params) {
  return Box3(Vec3::Zero(), Vec3::Constant(0.5 * params.cube_side));
}

SequenceData cylinder_sequence(double radius, double height) {
  Scene scene;
  SceneCylinder cyl;
  cyl.radius = radius;
  cyl.half_height = 0.5 * height;
  scene.primitives.push_back(cyl);
  scene.primitives.push_back(SceneSphere{Vec3::Zero(), 1.5});
  scene.mask_target = 0;

  Mat3 k = Mat3::Identity();
  k(0, 0) = k(1, 1) = 300.0;
  k(0, 2) = 159.5;
  k(1, 2) = 119.5;

  SequenceData data;
  data.box = Box3(Vec3::Zero(), Vec3(radius + 0.02, 0.5 * height + 0.02, radius + 0.02));
  data.category = Category::defaults("can");

  DepthFrame frame;
  frame.camera_pose = look_at(Vec3(0.4, 0.05, 0.0), Vec3::Zero());
  frame.intrinsics = k;
  RenderedView view = render_depth(scene, k, 320, 240, frame.camera_pose);
  frame.depth = std::move(view.depth);
  frame.mask = std::move(view.mask);
  data.frames.push_back(std::move(frame));
  data.object_poses.push_back(RigidTransform::identity());
  return data;
}

RigidTransform perturb_pose(const RigidTransform& pose, double perturb_deg,
                            double perturb_m, std::uint64_t seed) {
  Rng rng(seed);
  RigidTransform delta =
      RigidTransform::about_axis(random_unit(rng), radians(perturb_deg));
  delta.translation = perturb_m * random_unit(rng);
  return pose * delta;
}

void write_eval_fixture(const std::filesystem::path& dir, std::uint64_t seed) {
  const std::vector<std::string> categories = {"bottle", "bowl", "camera",
                                               "can",    "laptop", "mug"};
  GroundTruthDataset gt;
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    Rng rng(Rng::derive(seed, i));
    GroundTruthSample sample;
    char id[32];
    std::snprintf(id, sizeof(id), "s%03zu", i);
    sample.sample_id = id;
    sample.category = Category::defaults(categories[i]);
    sample.mesh = category_mesh(categories[i], Rng::derive(seed, 100 + i));
    sample.bbox = aabb_of(sample.mesh);
    sample.pose.rotation =
        RigidTransform::about_axis(random_unit(rng), rng.uniform(0.0, EIGEN_PI)).rotation;
    sample.pose.translation =
        Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5));
    gt.categories[categories[i]] = sample.category;

    Prediction pred;
    pred.sample_id = sample.sample_id;
    Hypothesis hyp;
    hyp.shape = sample.mesh;
    hyp.bbox = sample.bbox;
    hyp.pose = i < 3 ? sample.pose
                     : perturb_pose(sample.pose, 0.8, 0.002, Rng::derive(seed, 200 + i));
    pred.hypotheses.push_back(std::move(hyp));
    preds.push_back(std::move(pred));
    gt.samples.push_back(std::move(sample));
  }
  save_ground_truth(dir / "gt.json", gt, "meshes");
  save_predictions(dir / "pred.json", preds, "pred_shapes");
}

void write_hypotheses_fixture(const std::filesystem::path& dir, std::uint64_t seed) {
  GroundTruthDataset gt;
  std::vector<Prediction> preds;
  for (int i = 0; i < 10; ++i) {
    Rng rng(Rng::derive(seed, 300 + i));
    GroundTruthSample sample;
    char id[16];
    std::snprintf(id, sizeof(id), "m%03d", i);
    sample.sample_id = id;
    sample.category = Category::defaults("mug");
    sample.mesh = category_mesh("mug", Rng::derive(seed, 400 + i));
    sample.bbox = aabb_of(sample.mesh);
    sample.pose.rotation =
        RigidTransform::about_axis(random_unit(rng), rng.uniform(0.0, EIGEN_PI)).rotation;
    sample.pose.translation =
        Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.5, 1.0));

    Prediction pred;
    pred.sample_id = sample.sample_id;
    const double rot_err[3] = {1.0, 8.0, 30.0};
    const double tr_err[3] = {0.003, 0.015, 0.08};
    for (int h = 0; h < 3; ++h) {
      Hypothesis hyp;
      hyp.shape = sample.mesh;
      hyp.bbox = sample.bbox;
      hyp.pose = perturb_pose(sample.pose, rot_err[h], tr_err[h],
                              Rng::derive(seed, 500 + 3 * i + h));
      pred.hypotheses.push_back(std::move(hyp));
    }
    preds.push_back(std::move(pred));
    gt.samples.push_back(std::move(sample));
  }
  gt.categories["mug"] = Category::defaults("mug");
  save_ground_truth(dir / "gt.json", gt, "meshes");
  save_predictions(dir / "pred.json", preds, "pred_shapes");
}

void write_sequence_fixture(const std::filesystem::path& dir, std::uint64_t seed) {
  SequenceData data = cube_sequence();
  for (std::size_t f = 1; f < data.object_poses.size(); ++f) {
    data.object_poses[f] =
        perturb_pose(data.object_poses[f], 2.0, 0.005, Rng::derive(seed, 600 + f));
  }
  save_sequence(dir / "sequence.json", data, "frames");
}

void write_mesh_fixtures(const std::filesystem::path& dir) {
  save_mesh_obj(dir / "mug.obj", mug_mesh(true));
  save_mesh_obj(dir / "mug_no_handle.obj", mug_mesh(false));
}

}  // namespace fixtures
}  // namespace pse

#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <variant>
#include <vector>

#include "pse/annotation.hpp"
#include "pse/box_metrics.hpp"
#include "pse/dataset_io.hpp"
#include "pse/geometry.hpp"

namespace pse {
namespace fixtures {

/// Axis-aligned solid box, centered at the origin.
TriangleMesh box_mesh(const Vec3& full_extents);

/// Surface of revolution about +y from an (radius, y) profile ordered by y.
/// Interior profile points with radius 0 pinch the surface; endpoints with
/// positive radius get flat caps.
TriangleMesh lathe_mesh(const std::vector<std::pair<double, double>>& profile,
                        int segments);

TriangleMesh cylinder_mesh(double radius, double height, int segments = 48);
TriangleMesh sphere_mesh(double radius, int rings = 24, int segments = 48);

/// Concatenates two meshes (no vertex welding).
TriangleMesh merge_meshes(const TriangleMesh& a, const TriangleMesh& b);

/// 10 cm mug: cylindrical body with an open top, plus a box handle unless
/// disabled. The two variants back the sampling-sensitivity studies.
TriangleMesh mug_mesh(bool with_handle = true);

/// Deterministic per-category test meshes at tabletop scale (~6-20 cm).
/// Known names: bottle, bowl, can, mug, laptop, camera; anything else
/// falls back to a box.
TriangleMesh category_mesh(const std::string& category, std::uint64_t seed);

/// Analytic ray-traced depth scenes (exact intersections, no rasterization).
struct SceneSphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};
struct SceneBox {
  Box3 box;
  RigidTransform pose;
};
struct SceneCylinder {
  double radius = 0.05;
  double half_height = 0.05;
  RigidTransform pose;  // axis along local +y
};
using ScenePrimitive = std::variant<SceneSphere, SceneBox, SceneCylinder>;

struct Scene {
  std::vector<ScenePrimitive> primitives;
  int mask_target = -1;  // primitive index highlighted in the mask
};

struct RenderedView {
  DepthMap depth;
  MaskImage mask;
};

/// Renders z-depth through every pixel center; rays that hit nothing give
/// depth 0 (invalid). The mask marks pixels whose nearest hit is the
/// mask_target primitive.
RenderedView render_depth(const Scene& scene, const Mat3& intrinsics, int width,
                          int height, const RigidTransform& camera_pose);

/// Camera-to-world pose looking from eye toward target, +z forward, +y down
/// (up_hint gives the world up direction).
RigidTransform look_at(const Vec3& eye, const Vec3& target,
                       const Vec3& up_hint = Vec3::UnitY());

struct CubeSceneParams {
  double cube_side = 0.06;
  double seed_box_side = 0.10;
  int n_views = 8;
  double orbit_radius = 0.5;
  double background_radius = 1.5;
  int width = 320;
  int height = 240;
  double focal = 300.0;
};

/// Orbiting synthetic capture of a cube at the origin with a background
/// sphere so every ray measures depth. Object poses are identity; masks
/// mark the cube.
SequenceData cube_sequence(const CubeSceneParams& params = {});

/// True tight box of the cube in the scene above.
Box3 cube_truth(const CubeSceneParams& params = {});

/// Single-view capture of a standing cylinder (for symmetry-replication
/// coverage tests): one camera sees roughly half the circumference.
SequenceData cylinder_sequence(double radius = 0.04, double height = 0.12);

/// Applies a rotation of perturb_deg about a seeded random axis and a
/// translation of perturb_m in a seeded random direction.
RigidTransform perturb_pose(const RigidTransform& pose, double perturb_deg,
                            double perturb_m, std::uint64_t seed);

/// Six-sample ground truth across the built-in categories with
/// near-perfect single-hypothesis predictions.
void write_eval_fixture(const std::filesystem::path& dir, std::uint64_t seed);

/// Ten samples with three hypotheses each, spanning correct and incorrect
/// poses (exercises the best/worst-of-N path).
void write_hypotheses_fixture(const std::filesystem::path& dir, std::uint64_t seed);

/// Rendered 8-view cube sequence written as a sequence manifest.
void write_sequence_fixture(const std::filesystem::path& dir, std::uint64_t seed);

/// The two mug variants as OBJ files.
void write_mesh_fixtures(const std::filesystem::path& dir);

}  // namespace fixtures
}  // namespace pse

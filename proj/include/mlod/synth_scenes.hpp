#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlod/foreground_mask.hpp"
#include "mlod/rng.hpp"
#include "mlod/types.hpp"

namespace mlod {

// Object template for the synthetic generator. Dimension ranges are sampled
// uniformly per instance; color is the base albedo before the per-instance
// brightness factor.
struct SceneObjectClass {
  std::string name;
  double length_min = 0.0;
  double length_max = 0.0;
  double width_min = 0.0;
  double width_max = 0.0;
  double height_min = 0.0;
  double height_max = 0.0;
  double mix_weight = 1.0;  // relative draw probability
  std::uint8_t color[3] = {0, 0, 0};
};

struct SceneSpec {
  std::uint64_t seed = 1;

  int object_count = 5;
  // Clutter boxes are rendered and hit by lidar rays but never annotated.
  int clutter_count = 3;
  // Share of clutter placed on the viewing ray of a random annotated object
  // (in front of or behind it) rather than at a free spot.
  double clutter_aligned_fraction = 0.7;
  // Clutter reuses the albedo of a random object class so that image crops
  // cannot be classified by color presence alone.
  bool clutter_class_colors = true;

  ImageSize image_size{480, 352};
  double focal = 300.0;
  double sensor_height = 1.7;

  // Placement band, sensor frame (x forward, y left).
  double min_range = 6.0;
  double max_range = 26.0;
  double lateral_fraction = 0.72;  // |y| <= lateral_fraction * x keeps objects in view

  int lidar_rings = 32;
  double lidar_elevation_min_deg = -24.0;
  double lidar_elevation_max_deg = 2.0;
  int lidar_azimuth_steps = 720;
  double lidar_azimuth_span_deg = 90.0;  // centered on +x

  double brightness_min = 0.55;
  double brightness_max = 1.35;
  double pixel_noise = 12.0;  // uniform per-channel amplitude, 8-bit units

  int max_placement_tries = 1000;

  // Empty selects the default two-class set (Car, Pedestrian).
  std::vector<SceneObjectClass> classes;
};

std::vector<SceneObjectClass> default_scene_classes();

struct SyntheticScene {
  RawPointCloud cloud;
  ImageRgb image;
  CalibrationSet calib;
  GroundPlane plane;  // sensor frame
  std::vector<GroundTruthLabel> labels;      // camera-frame, KITTI convention
  std::vector<OrientedBox3D> boxes;          // sensor frame, aligned with labels
  std::vector<std::string> box_classes;      // aligned with boxes
  std::vector<OrientedBox3D> clutter_boxes;  // rendered but unannotated
  // Dense per-pixel depth of the rendered scene (camera depth, 0 = sky).
  SparseDepthMap dense_depth;
};

SyntheticScene generate_scene(const SceneSpec& spec);

enum class ProposalMode {
  kPerturb,       // jitter each annotated box
  kDepthAligned,  // slide along the ground-projected viewing ray until the
                  // bird's eye overlap drops while the image overlap stays high
  kRandom,        // free boxes anywhere in the placement band
};

struct ProposalSpec {
  ProposalMode mode = ProposalMode::kPerturb;
  int per_object = 4;  // perturb / depth-aligned: proposals per annotated box
  int count = 32;      // random mode: total proposals
  std::uint64_t seed = 7;

  // Perturb mode noise scales.
  double center_sigma = 0.35;
  double dim_sigma = 0.08;
  double yaw_sigma = 0.10;

  // Depth-aligned acceptance window.
  double bev_iou_max = 0.3;
  double image_iou_min = 0.7;
};

struct ProposalSet {
  std::vector<OrientedBox3D> boxes;
  std::vector<double> scores;
  std::vector<int> source_object;     // annotated box index, -1 for random
  std::vector<std::uint8_t> feasible;  // depth-aligned window found (1) or fallback (0)
};

ProposalSet generate_proposals(const SyntheticScene& scene, const ProposalSpec& spec);

// Runs the mask pipeline against the dense rendered depth instead of the
// sparse lidar projection, bypassing sparsity. Serves as the reference the
// sparse mask is compared against in tests.
ForegroundMask silhouette_mask_oracle(const SyntheticScene& scene, const OrientedBox3D& box,
                                      const MaskConfig& cfg);

// Writes one frame in the KITTI directory layout:
//   velodyne/<id>.bin  image_2/<id>.png  calib/<id>.txt  label_2/<id>.txt  planes/<id>.txt
void export_scene_kitti(const SyntheticScene& scene, const std::string& root,
                        const std::string& frame_id);

}  // namespace mlod

#include "mlod/synth_scenes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"
#include "mlod/image_io.hpp"
#include "mlod/kitti_io.hpp"

namespace mlod {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Entry parameter of origin + t * dir against the box, in units of |dir|.
// Slab test in the box frame; nullopt when the ray misses or starts inside.
std::optional<double> ray_box_entry(const OrientedBox3D& box, const Vec3& origin,
                                    const Vec3& dir) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const Vec3 rel = origin - box.center;
  const Vec3 o(c * rel.x() + s * rel.y(), -s * rel.x() + c * rel.y(), rel.z());
  const Vec3 d(c * dir.x() + s * dir.y(), -s * dir.x() + c * dir.y(), dir.z());

  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const double half = box.dims[axis] * 0.5;
    if (std::abs(d[axis]) < 1e-12) {
      if (o[axis] < -half || o[axis] > half) return std::nullopt;
      continue;
    }
    double t0 = (-half - o[axis]) / d[axis];
    double t1 = (half - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }
  if (t_enter <= 1e-9) return std::nullopt;
  return t_enter;
}

std::uint64_t hash64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stable brightness per half-meter ground cell so the background has spatial
// structure instead of a flat tone.
double ground_texture(double wx, double wy, std::uint64_t seed) {
  const auto ix = std::uint64_t(std::int64_t(std::llround(std::floor(wx * 2.0))));
  const auto iy = std::uint64_t(std::int64_t(std::llround(std::floor(wy * 2.0))));
  const std::uint64_t h =
      hash64(ix * 0x9E3779B97F4A7C15ull ^ (iy + seed) * 0xC2B2AE3D27D4EB4Full);
  return 0.82 + 0.36 * (double(h >> 11) * 0x1.0p-53);
}

// Overlap test with an inflated footprint; margin in meters per side.
bool footprint_clear(const OrientedBox3D& candidate, const std::vector<OrientedBox3D>& placed,
                     double margin) {
  OrientedBox3D inflated = candidate;
  inflated.dims.x() += 2.0 * margin;
  inflated.dims.y() += 2.0 * margin;
  for (const OrientedBox3D& other : placed) {
    if (bev_iou(inflated, other) > 0.0) return false;
  }
  return true;
}

std::size_t pick_class(const std::vector<SceneObjectClass>& classes, Rng& rng) {
  double total = 0.0;
  for (const SceneObjectClass& c : classes) total += c.mix_weight;
  const double u = rng.uniform(0.0, total);
  double acc = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    acc += classes[i].mix_weight;
    if (u < acc) return i;
  }
  return classes.size() - 1;
}

std::uint8_t clamp_byte(double v) {
  return std::uint8_t(std::clamp(std::lround(v), 0L, 255L));
}

struct RenderSurface {
  OrientedBox3D box;
  double color[3];     // albedo times per-instance brightness, 8-bit scale
  bool annotated = false;
  int class_index = -1;  // into spec classes; -1 for gray clutter
};

void append_matrix_line(std::string& text, const char* key, const double* values, int count) {
  text += key;
  text += ':';
  char buf[48];
  for (int i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof(buf), " %.12g", values[i]);
    text += buf;
  }
  text += '\n';
}

}  // namespace

std::vector<SceneObjectClass> default_scene_classes() {
  SceneObjectClass car;
  car.name = "Car";
  car.length_min = 3.4;
  car.length_max = 4.6;
  car.width_min = 1.5;
  car.width_max = 1.9;
  car.height_min = 1.4;
  car.height_max = 1.7;
  car.mix_weight = 1.0;
  car.color[0] = 202;
  car.color[1] = 64;
  car.color[2] = 54;

  SceneObjectClass pedestrian;
  pedestrian.name = "Pedestrian";
  pedestrian.length_min = 0.5;
  pedestrian.length_max = 0.8;
  pedestrian.width_min = 0.5;
  pedestrian.width_max = 0.8;
  pedestrian.height_min = 1.6;
  pedestrian.height_max = 1.9;
  pedestrian.mix_weight = 1.0;
  pedestrian.color[0] = 58;
  pedestrian.color[1] = 98;
  pedestrian.color[2] = 210;

  return {car, pedestrian};
}

SyntheticScene generate_scene(const SceneSpec& spec) {
  if (spec.object_count < 0 || spec.clutter_count < 0 || spec.image_size.width <= 0 ||
      spec.image_size.height <= 0 || spec.focal <= 0.0 || spec.min_range <= 0.0 ||
      spec.max_range <= spec.min_range || spec.lidar_rings < 1 || spec.lidar_azimuth_steps < 1)
    fail(ErrorCode::BadConfig, "scene spec has degenerate fields");
  const std::vector<SceneObjectClass> classes =
      spec.classes.empty() ? default_scene_classes() : spec.classes;

  SyntheticScene scene;
  scene.calib = canonical_calibration(spec.image_size, spec.focal);
  scene.plane = GroundPlane{Vec3(0, 0, 1), spec.sensor_height};

  Rng rng(spec.seed);
  const double ground_z = -spec.sensor_height;

  std::vector<RenderSurface> surfaces;
  std::vector<OrientedBox3D> placed;

  // Annotated objects. Placement rejects footprint overlap with a margin so
  // lidar rays can slip between neighbors.
  for (int i = 0; i < spec.object_count; ++i) {
    const std::size_t cls = pick_class(classes, rng);
    const SceneObjectClass& tpl = classes[cls];
    OrientedBox3D box;
    box.dims.x() = rng.uniform(tpl.length_min, tpl.length_max);
    box.dims.y() = rng.uniform(tpl.width_min, tpl.width_max);
    box.dims.z() = rng.uniform(tpl.height_min, tpl.height_max);
    const double brightness = rng.uniform(spec.brightness_min, spec.brightness_max);

    bool ok = false;
    for (int attempt = 0; attempt < spec.max_placement_tries; ++attempt) {
      const double x = rng.uniform(spec.min_range, spec.max_range);
      const double y = rng.uniform(-spec.lateral_fraction * x, spec.lateral_fraction * x);
      const double yaw = rng.uniform(-kPi, kPi);
      box.center = Vec3(x, y, ground_z + box.dims.z() * 0.5);
      box.yaw = yaw;
      if (!footprint_clear(box, placed, 0.35)) continue;
      ok = true;
      break;
    }
    if (!ok)
      fail(ErrorCode::PlacementFailure,
           "no free spot for object " + std::to_string(i) + " after " +
               std::to_string(spec.max_placement_tries) + " tries");

    placed.push_back(box);
    RenderSurface surf;
    surf.box = box;
    surf.annotated = true;
    surf.class_index = int(cls);
    for (int ch = 0; ch < 3; ++ch) surf.color[ch] = double(tpl.color[ch]) * brightness;
    surfaces.push_back(surf);
    scene.boxes.push_back(box);
    scene.box_classes.push_back(tpl.name);
  }

  const int object_count = int(scene.boxes.size());

  // Clutter: rendered, lidar-visible, never annotated. A configurable share is
  // dropped onto the viewing ray of an annotated object so its crop picks up
  // class-colored pixels at the wrong depth.
  for (int i = 0; i < spec.clutter_count; ++i) {
    const bool aligned =
        object_count > 0 && rng.bernoulli(spec.clutter_aligned_fraction);
    OrientedBox3D box;
    box.dims.x() = rng.uniform(0.7, 2.6);
    box.dims.y() = rng.uniform(0.7, 2.6);
    box.dims.z() = rng.uniform(0.8, 2.0);
    const double brightness = rng.uniform(spec.brightness_min, spec.brightness_max);
    int color_class = -1;
    if (spec.clutter_class_colors) color_class = int(pick_class(classes, rng));

    bool ok = false;
    for (int attempt = 0; attempt < spec.max_placement_tries; ++attempt) {
      double x = 0.0, y = 0.0;
      if (aligned) {
        const std::size_t target = rng.uniform_index(std::size_t(object_count));
        const Vec3& tc = scene.boxes[target].center;
        const double range = std::hypot(tc.x(), tc.y());
        const Vec2 dir(tc.x() / range, tc.y() / range);
        const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double dist = rng.uniform(2.2, 6.0);
        const double lateral = rng.uniform(-0.7, 0.7);
        x = tc.x() + sign * dist * dir.x() - lateral * dir.y();
        y = tc.y() + sign * dist * dir.y() + lateral * dir.x();
      } else {
        x = rng.uniform(spec.min_range, spec.max_range);
        y = rng.uniform(-spec.lateral_fraction * x, spec.lateral_fraction * x);
      }
      const double yaw = rng.uniform(-kPi, kPi);
      if (x < 2.5) continue;
      box.center = Vec3(x, y, ground_z + box.dims.z() * 0.5);
      box.yaw = yaw;
      if (!footprint_clear(box, placed, 0.25)) continue;
      ok = true;
      break;
    }
    if (!ok)
      fail(ErrorCode::PlacementFailure,
           "no free spot for clutter " + std::to_string(i) + " after " +
               std::to_string(spec.max_placement_tries) + " tries");

    placed.push_back(box);
    RenderSurface surf;
    surf.box = box;
    surf.annotated = false;
    surf.class_index = color_class;
    if (color_class >= 0) {
      for (int ch = 0; ch < 3; ++ch)
        surf.color[ch] = double(classes[color_class].color[ch]) * brightness;
    } else {
      for (int ch = 0; ch < 3; ++ch) surf.color[ch] = 122.0 * brightness;
    }
    surfaces.push_back(surf);
    scene.clutter_boxes.push_back(box);
  }

  // Camera render: one ray per pixel through the canonical calibration, ground
  // and boxes, nearest hit wins. The per-pixel noise stream is drawn for every
  // pixel so its length does not depend on scene content.
  const int width = spec.image_size.width;
  const int height = spec.image_size.height;
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  scene.image.width = width;
  scene.image.height = height;
  scene.image.data.assign(std::size_t(3) * width * height, 0);
  scene.dense_depth.width = width;
  scene.dense_depth.height = height;
  scene.dense_depth.depth.assign(std::size_t(width) * height, 0.f);

  std::vector<std::int64_t> silhouette(surfaces.size(), 0);
  std::vector<std::int64_t> visible(surfaces.size(), 0);
  const Vec3 origin = Vec3::Zero();

  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const double noise_r = rng.uniform(-spec.pixel_noise, spec.pixel_noise);
      const double noise_g = rng.uniform(-spec.pixel_noise, spec.pixel_noise);
      const double noise_b = rng.uniform(-spec.pixel_noise, spec.pixel_noise);

      // Camera ray in the sensor frame; parameter t equals camera depth.
      const double px = (u + 0.5 - cx) / spec.focal;
      const double py = (v + 0.5 - cy) / spec.focal;
      const Vec3 dir(1.0, -px, -py);

      double best_t = std::numeric_limits<double>::infinity();
      int best_owner = -1;
      if (dir.z() < 0.0) {
        best_t = ground_z / dir.z();
        best_owner = 0;
      }
      for (std::size_t k = 0; k < surfaces.size(); ++k) {
        const auto t = ray_box_entry(surfaces[k].box, origin, dir);
        if (!t) continue;
        silhouette[k] += 1;
        if (*t < best_t) {
          best_t = *t;
          best_owner = int(k) + 1;
        }
      }
      if (best_owner >= 1) visible[best_owner - 1] += 1;

      double base[3];
      if (best_owner < 0) {
        base[0] = 58;
        base[1] = 64;
        base[2] = 72;
      } else if (best_owner == 0) {
        const Vec3 hit = best_t * dir;
        const double tex = ground_texture(hit.x(), hit.y(), spec.seed);
        base[0] = 98.0 * tex;
        base[1] = 90.0 * tex;
        base[2] = 80.0 * tex;
      } else {
        const RenderSurface& surf = surfaces[best_owner - 1];
        base[0] = surf.color[0];
        base[1] = surf.color[1];
        base[2] = surf.color[2];
      }
      std::uint8_t* px_out = scene.image.pixel(u, v);
      px_out[0] = clamp_byte(base[0] + noise_r);
      px_out[1] = clamp_byte(base[1] + noise_g);
      px_out[2] = clamp_byte(base[2] + noise_b);
      scene.dense_depth.at(u, v) = std::isfinite(best_t) ? float(best_t) : 0.f;
    }
  }

  // Lidar render: elevation rings swept across the forward azimuth sector,
  // first hit per ray, points exactly on the hit surface.
  const double el_min = spec.lidar_elevation_min_deg * kPi / 180.0;
  const double el_max = spec.lidar_elevation_max_deg * kPi / 180.0;
  const double az_span = spec.lidar_azimuth_span_deg * kPi / 180.0;
  const double max_lidar_range = 80.0;
  for (int ring = 0; ring < spec.lidar_rings; ++ring) {
    const double elevation =
        spec.lidar_rings == 1
            ? el_min
            : el_min + (el_max - el_min) * double(ring) / double(spec.lidar_rings - 1);
    const double ce = std::cos(elevation);
    const double se = std::sin(elevation);
    for (int step = 0; step < spec.lidar_azimuth_steps; ++step) {
      const double azimuth = -az_span / 2.0 + az_span * (step + 0.5) / spec.lidar_azimuth_steps;
      const Vec3 dir(ce * std::cos(azimuth), ce * std::sin(azimuth), se);

      double best_t = std::numeric_limits<double>::infinity();
      int best_owner = -1;
      if (dir.z() < 0.0) {
        const double t = ground_z / dir.z();
        if (t < max_lidar_range) {
          best_t = t;
          best_owner = 0;
        }
      }
      for (std::size_t k = 0; k < surfaces.size(); ++k) {
        const auto t = ray_box_entry(surfaces[k].box, origin, dir);
        if (t && *t < best_t) {
          best_t = *t;
          best_owner = int(k) + 1;
        }
      }
      if (best_owner < 0) continue;

      const Vec3 hit = best_t * dir;
      double reflectance = 0.0;
      if (best_owner == 0) {
        reflectance = 0.22 + 0.06 * rng.uniform01();
      } else {
        const RenderSurface& surf = surfaces[best_owner - 1];
        if (surf.annotated)
          reflectance = 0.45 + 0.12 * double(surf.class_index) + 0.06 * rng.uniform01();
        else
          reflectance = 0.33 + 0.06 * rng.uniform01();
      }
      LidarPoint point;
      point.x = float(hit.x());
      point.y = float(hit.y());
      point.z = float(hit.z());
      point.reflectance = float(std::clamp(reflectance, 0.0, 1.0));
      scene.cloud.points.push_back(point);
    }
  }

  // Annotations: geometry from the shared conversion, truncation from the
  // unclipped vs clipped hull areas, occlusion from the render's owner grid.
  for (int i = 0; i < object_count; ++i) {
    GroundTruthLabel label =
        box_to_label(scene.boxes[i], scene.box_classes[i], scene.calib, spec.image_size);

    double min_u = std::numeric_limits<double>::infinity();
    double max_u = -std::numeric_limits<double>::infinity();
    double min_v = std::numeric_limits<double>::infinity();
    double max_v = -std::numeric_limits<double>::infinity();
    bool projectable = true;
    for (const Vec3& corner : box_corners_3d(scene.boxes[i])) {
      try {
        const PixelDepth pd = project_point(scene.calib, corner);
        min_u = std::min(min_u, pd.pixel.x());
        max_u = std::max(max_u, pd.pixel.x());
        min_v = std::min(min_v, pd.pixel.y());
        max_v = std::max(max_v, pd.pixel.y());
      } catch (const Error&) {
        projectable = false;
        break;
      }
    }
    if (projectable && max_u > min_u && max_v > min_v) {
      const double full_area = (max_u - min_u) * (max_v - min_v);
      const double clip_left = std::max(min_u, 0.0);
      const double clip_top = std::max(min_v, 0.0);
      const double clip_right = std::min(max_u, double(width));
      const double clip_bottom = std::min(max_v, double(height));
      const double clip_area = std::max(0.0, clip_right - clip_left) *
                               std::max(0.0, clip_bottom - clip_top);
      label.truncation = std::clamp(1.0 - clip_area / full_area, 0.0, 1.0);
    } else {
      label.truncation = 1.0;
    }

    const std::int64_t sil = silhouette[i];
    const double hidden = sil > 0 ? 1.0 - double(visible[i]) / double(sil) : 1.0;
    label.occlusion = hidden <= 0.05 ? 0 : (hidden <= 0.5 ? 1 : 2);
    scene.labels.push_back(label);
  }

  return scene;
}

ProposalSet generate_proposals(const SyntheticScene& scene, const ProposalSpec& spec) {
  Rng rng(spec.seed);
  ProposalSet out;
  const ImageSize image_size{scene.image.width, scene.image.height};
  const double ground_z = -scene.plane.offset;

  switch (spec.mode) {
    case ProposalMode::kPerturb: {
      for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
        for (int k = 0; k < spec.per_object; ++k) {
          const OrientedBox3D& gt = scene.boxes[i];
          OrientedBox3D prop = gt;
          double q = 0.0;
          for (int axis = 0; axis < 2; ++axis) {
            const double n = rng.normal();
            prop.center[axis] += n * spec.center_sigma;
            q += 0.5 * n * n;
          }
          {
            const double n = rng.normal();
            prop.center.z() += n * spec.center_sigma * 0.3;
            q += 0.5 * n * n;
          }
          for (int axis = 0; axis < 3; ++axis) {
            const double n = rng.normal();
            prop.dims[axis] = std::max(0.15, prop.dims[axis] * (1.0 + n * spec.dim_sigma));
            q += 0.5 * n * n;
          }
          {
            const double n = rng.normal();
            prop.yaw += n * spec.yaw_sigma;
            q += 0.5 * n * n;
          }
          out.boxes.push_back(prop);
          out.scores.push_back(std::clamp(std::exp(-q / 7.0), 1e-3, 0.999));
          out.source_object.push_back(int(i));
          out.feasible.push_back(1);
        }
      }
      break;
    }

    case ProposalMode::kDepthAligned: {
      for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
        const OrientedBox3D& gt = scene.boxes[i];
        AxisAlignedBox2D gt_bbox;
        try {
          gt_bbox = project_box_to_image(gt, scene.calib, image_size).bbox;
        } catch (const Error&) {
          continue;  // box invisible to the camera, no view discrepancy to build
        }
        const double range = std::hypot(gt.center.x(), gt.center.y());
        if (range <= 0.0) continue;
        const Vec2 ray(gt.center.x() / range, gt.center.y() / range);

        // Slide along the ground projection of the viewing ray; the box stays
        // on the ground so only its range changes.
        std::vector<double> window;
        double fallback_shift = 0.0;
        double fallback_img = -1.0;
        for (int sign = -1; sign <= 1; sign += 2) {
          for (double mag = 0.2; mag <= 10.0 + 1e-9; mag += 0.05) {
            const double shift = sign * mag;
            OrientedBox3D moved = gt;
            moved.center.x() += shift * ray.x();
            moved.center.y() += shift * ray.y();
            if (moved.center.x() < 1.0) continue;
            if (bev_iou(gt, moved) >= spec.bev_iou_max) continue;
            double img = 0.0;
            try {
              img = image_iou(gt_bbox, project_box_to_image(moved, scene.calib, image_size).bbox);
            } catch (const Error&) {
              continue;
            }
            if (img > fallback_img) {
              fallback_img = img;
              fallback_shift = shift;
            }
            if (img > spec.image_iou_min) window.push_back(shift);
          }
        }

        const bool feasible = !window.empty();
        if (!feasible && fallback_img < 0.0) continue;  // nothing projects at all
        for (int k = 0; k < spec.per_object; ++k) {
          const double shift =
              feasible ? window[rng.uniform_index(window.size())] : fallback_shift;
          OrientedBox3D moved = gt;
          moved.center.x() += shift * ray.x();
          moved.center.y() += shift * ray.y();
          out.boxes.push_back(moved);
          out.scores.push_back(rng.uniform(0.6, 0.95));
          out.source_object.push_back(int(i));
          out.feasible.push_back(feasible ? 1 : 0);
        }
      }
      break;
    }

    case ProposalMode::kRandom: {
      const std::vector<SceneObjectClass> classes = default_scene_classes();
      for (int k = 0; k < spec.count; ++k) {
        const SceneObjectClass& tpl = classes[pick_class(classes, rng)];
        OrientedBox3D prop;
        prop.dims.x() = rng.uniform(tpl.length_min, tpl.length_max);
        prop.dims.y() = rng.uniform(tpl.width_min, tpl.width_max);
        prop.dims.z() = rng.uniform(tpl.height_min, tpl.height_max);
        const double x = rng.uniform(4.0, 28.0);
        const double y = rng.uniform(-0.72 * x, 0.72 * x);
        prop.center = Vec3(x, y, ground_z + prop.dims.z() * 0.5);
        prop.yaw = rng.uniform(-kPi, kPi);
        out.boxes.push_back(prop);
        out.scores.push_back(rng.uniform(0.05, 0.55));
        out.source_object.push_back(-1);
        out.feasible.push_back(1);
      }
      break;
    }
  }
  return out;
}

ForegroundMask silhouette_mask_oracle(const SyntheticScene& scene, const OrientedBox3D& box,
                                      const MaskConfig& cfg) {
  const ImageSize image_size{scene.image.width, scene.image.height};
  const ProjectedBox projected = project_box_to_image(box, scene.calib, image_size);
  const std::vector<float> grid = crop_resize_depth_nearest(scene.dense_depth, projected.bbox, cfg);
  const DepthCellMedians medians = cell_medians(grid, cfg);
  return compute_mask(medians, projected.depth_min, projected.depth_max, cfg);
}

void export_scene_kitti(const SyntheticScene& scene, const std::string& root,
                        const std::string& frame_id) {
  namespace fs = std::filesystem;
  for (const char* sub : {"velodyne", "image_2", "calib", "label_2", "planes"}) {
    std::error_code ec;
    fs::create_directories(fs::path(root) / sub, ec);
    if (ec) fail(ErrorCode::IoFailure, std::string("cannot create ") + root + "/" + sub);
  }

  const std::vector<std::uint8_t> blob = write_point_cloud(scene.cloud);
  write_binary_file(root + "/velodyne/" + frame_id + ".bin", blob);
  write_png_rgb(root + "/image_2/" + frame_id + ".png", scene.image);

  std::string calib_text;
  {
    double p2[12];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) p2[r * 4 + c] = scene.calib.camera_projection(r, c);
    double r0[9];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) r0[r * 3 + c] = scene.calib.rectification(r, c);
    double tr[12];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) tr[r * 4 + c] = scene.calib.lidar_to_camera(r, c);
    append_matrix_line(calib_text, "P2", p2, 12);
    append_matrix_line(calib_text, "R0_rect", r0, 9);
    append_matrix_line(calib_text, "Tr_velo_to_cam", tr, 12);
  }
  write_text_file(root + "/calib/" + frame_id + ".txt", calib_text);

  std::string label_text;
  for (const GroundTruthLabel& label : scene.labels) {
    label_text += format_label_line(label);
    label_text += '\n';
  }
  write_text_file(root + "/label_2/" + frame_id + ".txt", label_text);

  // Planes files live in the rectified camera frame per the dataset layout.
  const Mat4 to_camera = scene.calib.rectification * scene.calib.lidar_to_camera;
  const GroundPlane camera_plane = transform_plane(scene.plane, to_camera);
  std::string plane_text = "# Plane\nWIDTH 4\nHEIGHT 1\n";
  plane_text += write_ground_plane(camera_plane);
  write_text_file(root + "/planes/" + frame_id + ".txt", plane_text);
}

}  // namespace mlod

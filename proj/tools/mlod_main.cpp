// Command-line front end: rasterize, mask, label, generate, train, evaluate.
// Every command reads one optional config file plus --set overrides, dumps the
// effective config into its output directory, and touches nothing outside it.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlod/augment.hpp"
#include "mlod/bev_raster.hpp"
#include "mlod/error.hpp"
#include "mlod/foreground_mask.hpp"
#include "mlod/geometry.hpp"
#include "mlod/grid_file.hpp"
#include "mlod/image_io.hpp"
#include "mlod/kitti_io.hpp"
#include "mlod/labeling.hpp"
#include "mlod/rng.hpp"
#include "mlod/synth_scenes.hpp"
#include "mlod/toy_header.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;

namespace mlod {
namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int threads = 0;  // 0 keeps the config value
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "config file (key = value sections)");
  sub->add_option("--set", args.overrides, "config override, section.key=value (repeatable)");
  sub->add_option("--out", args.out_dir, "output directory")->required();
  sub->add_option("--threads", args.threads, "worker threads for frame-level commands");
}

RunConfig make_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) apply_config_text(cfg, read_text_file(args.config_path));
  for (const std::string& assignment : args.overrides) apply_override(cfg, assignment);
  std::uint64_t env_seed = 0;
  if (seed_from_env(env_seed)) cfg.seed = env_seed;
  if (args.threads > 0) cfg.threads = args.threads;
  return cfg;
}

// Every run records the exact parameters it saw.
void prepare_out_dir(const std::string& out_dir, const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create output directory " + out_dir);
  write_text_file(out_dir + "/config.txt", config_text(cfg));
}

std::string frame_file(const std::string& root, const char* sub, const std::string& id,
                       const char* ext) {
  return root + "/" + sub + "/" + id + ext;
}

// Planes files live in the rectified camera frame per the dataset layout; the
// rasterizer wants the sensor frame.
GroundPlane load_sensor_plane(const std::string& path, const CalibrationSet& calib) {
  const GroundPlane camera_plane = parse_ground_plane(read_text_file(path));
  const Mat4 to_camera = calib.rectification * calib.lidar_to_camera;
  return transform_plane(camera_plane, Mat4(to_camera.inverse()));
}

std::uint8_t quantize_byte(double v) {
  const long q = std::lround(v * 255.0);
  return std::uint8_t(std::clamp(q, 0l, 255l));
}

// Index-sharded worker pool. Each job owns its index's outputs, so results do
// not depend on scheduling; the first failure wins and is rethrown.
void run_parallel(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& work) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// --- bev ---------------------------------------------------------------------

int cmd_bev(const CommonArgs& args, const std::string& frame_root, const std::string& frame_id) {
  const RunConfig cfg = make_config(args);
  const RawPointCloud cloud =
      parse_point_cloud(read_binary_file(frame_file(frame_root, "velodyne", frame_id, ".bin")));
  const CalibrationSet calib =
      parse_calibration(read_text_file(frame_file(frame_root, "calib", frame_id, ".txt")));
  const GroundPlane plane =
      load_sensor_plane(frame_file(frame_root, "planes", frame_id, ".txt"), calib);
  prepare_out_dir(args.out_dir, cfg);

  const BevMap map = rasterize(cloud, plane, cfg.bev);

  // One PNG per channel, +x (forward) pointing up. Height channels scale
  // against the top of the config band; density is already in [0, 1].
  const double height_scale = cfg.bev.height_max > 0.0 ? cfg.bev.height_max : 1.0;
  for (int c = 0; c < map.channels; ++c) {
    const bool density = c == map.channels - 1;
    std::vector<std::uint8_t> pixels(std::size_t(map.rows) * map.cols);
    for (int i = 0; i < map.rows; ++i)
      for (int j = 0; j < map.cols; ++j) {
        const double v = map.at(c, i, j);
        pixels[std::size_t(map.rows - 1 - i) * map.cols + j] =
            quantize_byte(density ? v : v / height_scale);
      }
    const std::string name =
        density ? "bev_density.png" : "bev_slice_" + std::to_string(c) + ".png";
    write_png_gray(args.out_dir + "/" + name, pixels, map.cols, map.rows);
  }
  write_grid_file(args.out_dir + "/bev.grid", std::uint32_t(map.rows), std::uint32_t(map.cols),
                  std::uint32_t(map.channels), map.cells);
  std::cout << "bev: " << map.rows << "x" << map.cols << " grid, " << map.channels
            << " channels -> " << args.out_dir << "\n";
  return 0;
}

// --- mask --------------------------------------------------------------------

int cmd_mask(const CommonArgs& args, const std::string& frame_root, const std::string& frame_id,
             const std::string& proposals_arg) {
  const RunConfig cfg = make_config(args);
  const RawPointCloud cloud =
      parse_point_cloud(read_binary_file(frame_file(frame_root, "velodyne", frame_id, ".bin")));
  const CalibrationSet calib =
      parse_calibration(read_text_file(frame_file(frame_root, "calib", frame_id, ".txt")));
  const ImageRgb image = read_image(frame_file(frame_root, "image_2", frame_id, ".png"));
  const std::string proposals_path =
      proposals_arg.empty() ? frame_file(frame_root, "proposals", frame_id, ".txt")
                            : proposals_arg;
  const std::vector<GroundTruthLabel> rows = parse_labels(read_text_file(proposals_path));
  prepare_out_dir(args.out_dir, cfg);

  const ImageSize size{image.width, image.height};
  const SparseDepthMap depth_map = build_sparse_depth_map(cloud, calib, size);
  const int k = cfg.mask.crop_size;

  std::ostringstream csv;
  csv << "proposal,depth_min,depth_max";
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) csv << ",c" << i << "_" << j;
  csv << "\n";
  csv.precision(17);

  int written = 0;
  int skipped = 0;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    const OrientedBox3D box = label_to_box(rows[p], calib);
    ProjectedBox projected;
    try {
      projected = project_box_to_image(box, calib, size);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BehindCamera || e.code() == ErrorCode::DegenerateOnImage) {
        std::cerr << "mask: skipping proposal " << p << ": " << e.what() << "\n";
        ++skipped;
        continue;
      }
      throw;
    }
    const std::vector<float> grid = crop_resize_depth_nearest(depth_map, projected.bbox, cfg.mask);
    const DepthCellMedians medians = cell_medians(grid, cfg.mask);
    const ForegroundMask mask =
        compute_mask(medians, projected.depth_min, projected.depth_max, cfg.mask);

    csv << p << "," << projected.depth_min << "," << projected.depth_max;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) csv << "," << int(mask.at(i, j));
    csv << "\n";

    // Overlay: the image crop the header would see, masked cells dimmed 70%.
    const FeatureCrop crop = crop_resize_rgb_bilinear(image, projected.bbox, k);
    ImageRgb overlay;
    overlay.width = k;
    overlay.height = k;
    overlay.data.resize(std::size_t(k) * k * 3);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const double factor = mask.at(i, j) ? 1.0 : 0.3;
        for (int c = 0; c < 3; ++c)
          overlay.pixel(j, i)[c] = quantize_byte(double(crop.at(c, i, j)) * factor / 255.0);
      }
    write_png_rgb(args.out_dir + "/overlay_" + std::to_string(p) + ".png", overlay);
    ++written;
  }
  write_text_file(args.out_dir + "/mask.csv", csv.str());
  std::cout << "mask: " << written << " proposals masked, " << skipped << " skipped -> "
            << args.out_dir << "\n";
  return 0;
}

// --- label-stats ---------------------------------------------------------------

int cmd_label_stats(const CommonArgs& args, const std::string& frame_root,
                    const std::string& proposals_arg) {
  const RunConfig cfg = make_config(args);
  const std::string proposals_root =
      proposals_arg.empty() ? frame_root + "/proposals" : proposals_arg;

  std::vector<std::string> ids;
  {
    std::error_code ec;
    fs::directory_iterator it(proposals_root, ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot list proposals under " + proposals_root);
    for (const fs::directory_entry& entry : it)
      if (entry.path().extension() == ".txt") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) fail(ErrorCode::IoFailure, "no proposal files under " + proposals_root);
  prepare_out_dir(args.out_dir, cfg);

  std::vector<DiscrepancyCounts> per_frame(ids.size());
  run_parallel(ids.size(), cfg.threads, [&](std::size_t n) {
    const std::string& id = ids[n];
    const CalibrationSet calib =
        parse_calibration(read_text_file(frame_file(frame_root, "calib", id, ".txt")));
    const std::vector<GroundTruthLabel> gt_rows =
        parse_labels(read_text_file(frame_file(frame_root, "label_2", id, ".txt")));
    const std::vector<GroundTruthLabel> prop_rows =
        parse_labels(read_text_file(proposals_root + "/" + id + ".txt"));
    const ImageRgb image = read_image(frame_file(frame_root, "image_2", id, ".png"));
    const ImageSize size{image.width, image.height};

    std::vector<ProposalView> proposals;
    proposals.reserve(prop_rows.size());
    for (const GroundTruthLabel& row : prop_rows) {
      ProposalView view;
      view.box = label_to_box(row, calib);
      view.rpn_score = row.score.value_or(0.0);
      try {
        view.image_box = project_box_to_image(view.box, calib, size).bbox;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BehindCamera && e.code() != ErrorCode::DegenerateOnImage)
          throw;
      }
      proposals.push_back(view);
    }
    std::vector<GroundTruthView> gts;
    gts.reserve(gt_rows.size());
    for (const GroundTruthLabel& row : gt_rows) {
      GroundTruthView gt;
      gt.class_name = row.class_name;
      gt.dont_care = row.dont_care;
      if (!row.dont_care) gt.box = label_to_box(row, calib);
      // The exporter zeroes the 2D box when the object misses the image.
      if (row.bbox.width() > 0.0 && row.bbox.height() > 0.0) gt.image_box = row.bbox;
      gts.push_back(gt);
    }
    per_frame[n] = discrepancy_stats(assign_labels(proposals, gts, cfg.thresholds));
  });

  std::ostringstream csv;
  csv << "frame,total,agree_positive,agree_negative,bev_negative_image_positive,"
         "bev_positive_image_negative,any_ignore\n";
  DiscrepancyCounts total;
  auto append = [&csv](const std::string& name, const DiscrepancyCounts& c) {
    csv << name << "," << c.total() << "," << c.agree_positive << "," << c.agree_negative << ","
        << c.bev_negative_image_positive << "," << c.bev_positive_image_negative << ","
        << c.any_ignore << "\n";
  };
  for (std::size_t n = 0; n < ids.size(); ++n) {
    append(ids[n], per_frame[n]);
    total.agree_positive += per_frame[n].agree_positive;
    total.agree_negative += per_frame[n].agree_negative;
    total.bev_negative_image_positive += per_frame[n].bev_negative_image_positive;
    total.bev_positive_image_negative += per_frame[n].bev_positive_image_negative;
    total.any_ignore += per_frame[n].any_ignore;
  }
  append("aggregate", total);
  write_text_file(args.out_dir + "/label_stats.csv", csv.str());
  std::cout << "label-stats: " << ids.size() << " frames, " << total.total() << " proposals, "
            << total.bev_negative_image_positive << " bev-negative/image-positive -> "
            << args.out_dir << "\n";
  return 0;
}

// --- gen-scenes ----------------------------------------------------------------

std::string frame_id_for(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

int cmd_gen_scenes(const CommonArgs& args, int count) {
  const RunConfig cfg = make_config(args);
  if (count <= 0) fail(ErrorCode::BadConfig, "--count must be positive");
  prepare_out_dir(args.out_dir, cfg);
  {
    std::error_code ec;
    fs::create_directories(fs::path(args.out_dir) / "proposals", ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot create " + args.out_dir + "/proposals");
  }

  run_parallel(std::size_t(count), cfg.threads, [&](std::size_t i) {
    SceneSpec scene_spec = cfg.scene;
    scene_spec.seed = cfg.seed + i;
    const SyntheticScene scene = generate_scene(scene_spec);
    const std::string id = frame_id_for(i);
    export_scene_kitti(scene, args.out_dir, id);

    // Proposal pools mirror the toy dataset mix: jittered copies, depth-aligned
    // slides, and free boxes, all as 16-field rows with the pool score.
    ProposalSpec perturb = toy_perturb_defaults();
    perturb.mode = ProposalMode::kPerturb;
    perturb.per_object = cfg.perturb_per_object;
    perturb.center_sigma = cfg.perturb_center_sigma;
    perturb.seed = scene_spec.seed ^ 0x9e3779b97f4a7c15ull;
    ProposalSpec aligned = toy_perturb_defaults();
    aligned.mode = ProposalMode::kDepthAligned;
    aligned.per_object = cfg.depth_aligned_per_object;
    aligned.seed = scene_spec.seed ^ 0xbf58476d1ce4e5b9ull;
    ProposalSpec random = toy_perturb_defaults();
    random.mode = ProposalMode::kRandom;
    random.count = cfg.random_per_scene;
    random.seed = scene_spec.seed ^ 0x94d049bb133111ebull;

    std::string text;
    for (const ProposalSpec& pool : {perturb, aligned, random}) {
      if (pool.mode == ProposalMode::kRandom ? pool.count <= 0 : pool.per_object <= 0) continue;
      const ProposalSet set = generate_proposals(scene, pool);
      for (std::size_t j = 0; j < set.boxes.size(); ++j) {
        GroundTruthLabel row =
            box_to_label(set.boxes[j], "Proposal", scene.calib, scene_spec.image_size);
        row.score = set.scores[j];
        text += format_label_line(row);
        text += '\n';
      }
    }
    write_text_file(args.out_dir + "/proposals/" + id + ".txt", text);
  });
  std::cout << "gen-scenes: " << count << " frames -> " << args.out_dir << "\n";
  return 0;
}

// --- experiment ------------------------------------------------------------------

nlohmann::json report_summary_json(const ExperimentReport& a, const ExperimentReport& b) {
  nlohmann::json arms;
  for (const ExperimentReport* r : {&a, &b}) {
    nlohmann::json arm;
    arm["lambda_ratio"] = r->lambda_ratio;
    arm["mask_on"] = r->mask_on;
    arm["mean_image_accuracy"] = r->mean_image_accuracy();
    arm["mean_bev_accuracy"] = r->mean_bev_accuracy();
    arm["mean_fusion_accuracy"] = r->mean_fusion_accuracy();
    arms.push_back(arm);
  }
  return arms;
}

int cmd_experiment(const CommonArgs& args, const std::string& kind) {
  const RunConfig cfg = make_config(args);
  prepare_out_dir(args.out_dir, cfg);

  nlohmann::json summary;
  summary["kind"] = kind;
  summary["seeds"] = cfg.experiment_seeds;
  std::string report;

  if (kind == "lambda") {
    const ToyDataset train_set = build_toy_dataset(cfg.dataset_spec(false));
    const ToyDataset eval_set = build_toy_dataset(cfg.dataset_spec(true));
    const LambdaAblationResult result = run_lambda_ablation(
        train_set, eval_set, {0.001, 1.0}, cfg.experiment_seeds, cfg.train);
    report = report_csv({&result.low, &result.unit});
    summary["arms"] = report_summary_json(result.low, result.unit);
    summary["mean_image_accuracy_delta"] =
        result.unit.mean_image_accuracy() - result.low.mean_image_accuracy();
    summary["mean_bev_accuracy_delta"] =
        result.unit.mean_bev_accuracy() - result.low.mean_bev_accuracy();
    summary["mean_fusion_accuracy_delta"] =
        result.unit.mean_fusion_accuracy() - result.low.mean_fusion_accuracy();
    std::cout << "experiment lambda: image accuracy delta "
              << summary["mean_image_accuracy_delta"].get<double>() << " ("
              << result.low.mean_image_accuracy() << " -> " << result.unit.mean_image_accuracy()
              << ")\n";
  } else if (kind == "mask") {
    DatasetSpec train_spec = cfg.dataset_spec(false);
    DatasetSpec eval_spec = cfg.dataset_spec(true);
    if (cfg.mask_variant == "heavy") {
      const DatasetSpec variant = clutter_heavy_dataset_spec();
      for (DatasetSpec* spec : {&train_spec, &eval_spec}) {
        spec->scene.clutter_count = variant.scene.clutter_count;
        spec->scene.clutter_aligned_fraction = variant.scene.clutter_aligned_fraction;
      }
    } else if (cfg.mask_variant == "free") {
      const DatasetSpec variant = clutter_free_dataset_spec();
      for (DatasetSpec* spec : {&train_spec, &eval_spec})
        spec->scene.clutter_count = variant.scene.clutter_count;
    }
    const ToyDataset train_set = build_toy_dataset(train_spec);
    const ToyDataset eval_set = build_toy_dataset(eval_spec);
    const MaskAblationResult result =
        run_mask_ablation(train_set, eval_set, cfg.experiment_seeds, cfg.train);
    report = report_csv({&result.with_mask, &result.without_mask});
    summary["variant"] = cfg.mask_variant;
    summary["arms"] = report_summary_json(result.with_mask, result.without_mask);
    summary["mean_image_accuracy_delta"] =
        result.with_mask.mean_image_accuracy() - result.without_mask.mean_image_accuracy();
    summary["mean_bev_accuracy_delta"] =
        result.with_mask.mean_bev_accuracy() - result.without_mask.mean_bev_accuracy();
    summary["mean_fusion_accuracy_delta"] =
        result.with_mask.mean_fusion_accuracy() - result.without_mask.mean_fusion_accuracy();
    std::cout << "experiment mask (" << cfg.mask_variant << "): fusion accuracy delta "
              << summary["mean_fusion_accuracy_delta"].get<double>() << " ("
              << result.without_mask.mean_fusion_accuracy() << " -> "
              << result.with_mask.mean_fusion_accuracy() << ")\n";
  } else {
    fail(ErrorCode::BadConfig, "experiment kind must be lambda or mask, got '" + kind + "'");
  }

  write_text_file(args.out_dir + "/report.csv", report);
  write_text_file(args.out_dir + "/summary.json", summary.dump(2) + "\n");
  return 0;
}

// --- eval-ap -----------------------------------------------------------------------

// Annotations are compared without calibration: both files map through the
// same fixed rigid change of basis (x = camera depth, y = -camera x, z up),
// which preserves the top-down overlaps the matcher uses.
OrientedBox3D camera_label_box(const GroundTruthLabel& label) {
  OrientedBox3D box;
  box.center =
      Vec3(label.location.z(), -label.location.x(), -label.location.y() + label.height / 2.0);
  box.dims = Vec3(label.length, label.width, label.height);
  box.yaw = -label.rotation_y;
  return box;
}

int cmd_eval_ap(const CommonArgs& args, const std::string& detections_path,
                const std::string& gts_path, const std::string& class_name) {
  const RunConfig cfg = make_config(args);
  const std::vector<GroundTruthLabel> det_rows = parse_labels(read_text_file(detections_path));
  const std::vector<GroundTruthLabel> gt_rows = parse_labels(read_text_file(gts_path));
  prepare_out_dir(args.out_dir, cfg);

  std::vector<ScoredBox> detections;
  for (const GroundTruthLabel& row : det_rows) {
    if (row.dont_care || row.class_name != class_name) continue;
    detections.push_back({camera_label_box(row), row.score.value_or(1.0)});
  }
  std::vector<const GroundTruthLabel*> gts;
  for (const GroundTruthLabel& row : gt_rows) {
    if (row.dont_care || row.class_name != class_name) continue;
    gts.push_back(&row);
  }

  const double threshold = overlap_threshold_for_class(class_name);
  char threshold_text[16];
  std::snprintf(threshold_text, sizeof(threshold_text), "%.2f", threshold);
  std::ostringstream csv;
  csv << "class,difficulty,iou_threshold,ap\n";
  csv.precision(17);
  const std::pair<Difficulty, const char*> brackets[] = {
      {Difficulty::kEasy, "easy"},
      {Difficulty::kModerate, "moderate"},
      {Difficulty::kHard, "hard"},
  };
  for (const auto& [difficulty, name] : brackets) {
    std::vector<EvalGroundTruth> eval_gts;
    eval_gts.reserve(gts.size());
    for (const GroundTruthLabel* row : gts)
      eval_gts.push_back({camera_label_box(*row), !within_difficulty(*row, difficulty)});
    const double ap = average_precision(detections, eval_gts, threshold);
    csv << class_name << "," << name << "," << threshold_text << "," << ap << "\n";
    std::cout << "eval-ap: " << class_name << " " << name << " AP " << ap << " @ IoU "
              << threshold << "\n";
  }
  write_text_file(args.out_dir + "/ap.csv", csv.str());
  return 0;
}

// --- flip --------------------------------------------------------------------------

void append_calib_line(std::string& text, const char* key, const double* values, int count) {
  text += key;
  text += ':';
  char buf[48];
  for (int i = 0; i < count; ++i) {
    // %.17g round-trips doubles exactly, keeping flip-twice bitwise on disk.
    std::snprintf(buf, sizeof(buf), " %.17g", values[i]);
    text += buf;
  }
  text += '\n';
}

std::string calibration_text(const CalibrationSet& calib) {
  double p2[12], r0[9], tr[12];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) p2[r * 4 + c] = calib.camera_projection(r, c);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) r0[r * 3 + c] = calib.rectification(r, c);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) tr[r * 4 + c] = calib.lidar_to_camera(r, c);
  std::string text;
  append_calib_line(text, "P2", p2, 12);
  append_calib_line(text, "R0_rect", r0, 9);
  append_calib_line(text, "Tr_velo_to_cam", tr, 12);
  return text;
}

int cmd_flip(const CommonArgs& args, const std::string& frame_root, const std::string& frame_id) {
  const RunConfig cfg = make_config(args);
  const RawPointCloud cloud =
      parse_point_cloud(read_binary_file(frame_file(frame_root, "velodyne", frame_id, ".bin")));
  const ImageRgb image = read_image(frame_file(frame_root, "image_2", frame_id, ".png"));
  const CalibrationSet calib =
      parse_calibration(read_text_file(frame_file(frame_root, "calib", frame_id, ".txt")));
  const std::vector<GroundTruthLabel> labels =
      parse_labels(read_text_file(frame_file(frame_root, "label_2", frame_id, ".txt")));
  const GroundPlane camera_plane =
      parse_ground_plane(read_text_file(frame_file(frame_root, "planes", frame_id, ".txt")));
  prepare_out_dir(args.out_dir, cfg);

  const FlippedScene flipped = flip_scene(cloud, image, calib, labels);

  for (const char* sub : {"velodyne", "image_2", "calib", "label_2", "planes"}) {
    std::error_code ec;
    fs::create_directories(fs::path(args.out_dir) / sub, ec);
    if (ec) fail(ErrorCode::IoFailure, std::string("cannot create ") + args.out_dir + "/" + sub);
  }
  write_binary_file(frame_file(args.out_dir, "velodyne", frame_id, ".bin"),
                    write_point_cloud(flipped.cloud));
  write_png_rgb(frame_file(args.out_dir, "image_2", frame_id, ".png"), flipped.image);
  write_text_file(frame_file(args.out_dir, "calib", frame_id, ".txt"),
                  calibration_text(flipped.calib));
  std::string label_text;
  for (const GroundTruthLabel& label : flipped.labels) {
    label_text += format_label_line(label);
    label_text += '\n';
  }
  write_text_file(frame_file(args.out_dir, "label_2", frame_id, ".txt"), label_text);

  // Mirror the plane in the sensor frame (y sign) and re-express it through
  // the flipped calibration, keeping the camera-frame file convention.
  const Mat4 to_camera = calib.rectification * calib.lidar_to_camera;
  GroundPlane sensor_plane = transform_plane(camera_plane, Mat4(to_camera.inverse()));
  sensor_plane.normal.y() = -sensor_plane.normal.y();
  const Mat4 to_camera_flipped = flipped.calib.rectification * flipped.calib.lidar_to_camera;
  const GroundPlane camera_plane_flipped = transform_plane(sensor_plane, to_camera_flipped);
  std::string plane_text = "# Plane\nWIDTH 4\nHEIGHT 1\n";
  plane_text += write_ground_plane(camera_plane_flipped);
  write_text_file(frame_file(args.out_dir, "planes", frame_id, ".txt"), plane_text);

  std::cout << "flip: frame " << frame_id << " -> " << args.out_dir << "\n";
  return 0;
}

// --- jitter ------------------------------------------------------------------------

int cmd_jitter(const CommonArgs& args, const std::string& images_dir) {
  const RunConfig cfg = make_config(args);
  std::vector<std::string> names;
  {
    std::error_code ec;
    fs::directory_iterator it(images_dir, ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot list images under " + images_dir);
    for (const fs::directory_entry& entry : it)
      if (entry.path().extension() == ".png") names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) fail(ErrorCode::IoFailure, "no png images under " + images_dir);
  prepare_out_dir(args.out_dir, cfg);

  std::vector<ImageRgb> images;
  images.reserve(names.size());
  for (const std::string& name : names) images.push_back(read_image(images_dir + "/" + name));
  std::vector<const ImageRgb*> pointers;
  pointers.reserve(images.size());
  for (const ImageRgb& img : images) pointers.push_back(&img);
  const PcaBasis basis = fit_pca_basis(pointers);

  // One alpha triple per image, drawn in name order so the run is
  // reproducible for a fixed directory listing.
  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < images.size(); ++i) {
    Vec3 alphas;
    for (int c = 0; c < 3; ++c) alphas[c] = rng.normal(0.0, 0.1);
    write_png_rgb(args.out_dir + "/" + names[i], pca_jitter(images[i], basis, alphas));
  }
  std::cout << "jitter: " << images.size() << " images -> " << args.out_dir << "\n";
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"multi-view labelling detector toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  CommonArgs bev_args;
  std::string bev_root, bev_id;
  CLI::App* bev = app.add_subcommand("bev", "rasterize a frame into the top-down grid");
  add_common(bev, bev_args);
  bev->add_option("--frame-root", bev_root, "dataset root (velodyne/calib/planes)")->required();
  bev->add_option("--frame-id", bev_id, "frame id, e.g. 000000")->required();
  bev->callback([&] { rc = cmd_bev(bev_args, bev_root, bev_id); });

  CommonArgs mask_args;
  std::string mask_root, mask_id, mask_proposals;
  CLI::App* mask = app.add_subcommand("mask", "foreground masks and overlays for proposals");
  add_common(mask, mask_args);
  mask->add_option("--frame-root", mask_root, "dataset root (velodyne/calib/image_2)")
      ->required();
  mask->add_option("--frame-id", mask_id, "frame id")->required();
  mask->add_option("--proposals", mask_proposals,
                   "proposal file, 15/16-field rows (default <root>/proposals/<id>.txt)");
  mask->callback([&] { rc = cmd_mask(mask_args, mask_root, mask_id, mask_proposals); });

  CommonArgs stats_args;
  std::string stats_root, stats_proposals;
  CLI::App* stats = app.add_subcommand("label-stats", "two-view label discrepancy counts");
  add_common(stats, stats_args);
  stats->add_option("--frame-root", stats_root, "dataset root (calib/label_2/image_2)")
      ->required();
  stats->add_option("--proposals-root", stats_proposals,
                    "directory of per-frame proposal files (default <root>/proposals)");
  stats->callback([&] { rc = cmd_label_stats(stats_args, stats_root, stats_proposals); });

  CommonArgs gen_args;
  int gen_count = 1;
  CLI::App* gen = app.add_subcommand("gen-scenes", "synthesize frames in the dataset layout");
  add_common(gen, gen_args);
  gen->add_option("--count", gen_count, "number of frames")->required();
  gen->callback([&] { rc = cmd_gen_scenes(gen_args, gen_count); });

  CommonArgs exp_args;
  std::string exp_kind;
  CLI::App* exp = app.add_subcommand("experiment", "toy-header ablations");
  add_common(exp, exp_args);
  exp->add_option("--kind", exp_kind, "lambda or mask")->required();
  exp->callback([&] { rc = cmd_experiment(exp_args, exp_kind); });

  CommonArgs ap_args;
  std::string ap_dets, ap_gts, ap_class;
  CLI::App* ap = app.add_subcommand("eval-ap", "average precision per difficulty");
  add_common(ap, ap_args);
  ap->add_option("--detections", ap_dets, "detection file, 16-field rows")->required();
  ap->add_option("--gts", ap_gts, "ground-truth label file")->required();
  ap->add_option("--class", ap_class, "class name, e.g. Car")->required();
  ap->callback([&] { rc = cmd_eval_ap(ap_args, ap_dets, ap_gts, ap_class); });

  CommonArgs flip_args;
  std::string flip_root, flip_id;
  CLI::App* flip = app.add_subcommand("flip", "lateral mirror of a whole frame");
  add_common(flip, flip_args);
  flip->add_option("--frame-root", flip_root, "dataset root")->required();
  flip->add_option("--frame-id", flip_id, "frame id")->required();
  flip->callback([&] { rc = cmd_flip(flip_args, flip_root, flip_id); });

  CommonArgs jitter_args;
  std::string jitter_dir;
  CLI::App* jitter = app.add_subcommand("jitter", "color jitter along the image set's RGB axes");
  add_common(jitter, jitter_args);
  jitter->add_option("--images", jitter_dir, "directory of png images")->required();
  jitter->callback([&] { rc = cmd_jitter(jitter_args, jitter_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return rc;
}

}  // namespace
}  // namespace mlod

int main(int argc, char** argv) {
  try {
    return mlod::run_cli(argc, argv);
  } catch (const mlod::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const mlod::ErrorCode code = e.code();
    const bool numeric = code == mlod::ErrorCode::NonFiniteLoss ||
                         code == mlod::ErrorCode::PlacementFailure ||
                         code == mlod::ErrorCode::InvalidDepthRange;
    return numeric ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

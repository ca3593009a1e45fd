#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mlod/bev_raster.hpp"
#include "mlod/foreground_mask.hpp"
#include "mlod/labeling.hpp"
#include "mlod/losses.hpp"
#include "mlod/synth_scenes.hpp"
#include "mlod/types.hpp"

namespace mlod {

// Miniature three-branch detection header: each view runs an affine map to a
// hidden layer with max(0, .), then per-view class and box heads; the fusion
// heads read the concatenated hidden vectors and add an orientation pair. The
// foreground mask multiplies the image crop before its branch, so both the
// image heads and the fusion see masked features.
struct ToyHeaderConfig {
  int crop_size = 7;
  int image_channels = 3;
  int bev_channels = 6;
  // Wide enough that the class heads and the box heads stop competing for
  // hidden units within the short training budget; still trains in seconds.
  int hidden = 80;
  int num_classes = 2;  // foreground classes; score vectors add a background slot

  int image_inputs() const { return crop_size * crop_size * image_channels; }
  int bev_inputs() const { return crop_size * crop_size * bev_channels; }
  int score_dims() const { return num_classes + 1; }
};

// Row-major weight block inside the flat parameter vector.
struct ParamSpan {
  int offset = 0;
  int rows = 0;
  int cols = 0;

  int size() const { return rows * cols; }
};

struct ParamLayout {
  ParamSpan image_w1, image_b1, image_w_cls, image_b_cls, image_w_box, image_b_box;
  ParamSpan bev_w1, bev_b1, bev_w_cls, bev_b_cls, bev_w_box, bev_b_box;
  ParamSpan fusion_w_cls, fusion_b_cls, fusion_w_box, fusion_b_box, fusion_w_ang, fusion_b_ang;
  int total = 0;
};

ParamLayout make_param_layout(const ToyHeaderConfig& cfg);

struct ToyHeaderModel {
  ToyHeaderConfig cfg;
  ParamLayout layout;
  std::vector<double> params;
};

// Xavier-uniform weights, zero biases, fixed draw order.
ToyHeaderModel make_toy_header_model(const ToyHeaderConfig& cfg, std::uint64_t seed);

// One proposal's worth of training data. Crops store raw features (RGB scaled
// to [0, 1], BEV heights/density unscaled); the mask is kept separate so
// training can toggle it. gt boxes are valid only when the matching view's
// class is positive.
struct ToyExample {
  FeatureCrop image_crop;
  FeatureCrop bev_crop;
  ForegroundMask mask;
  ProposalTargets targets;
  OrientedBox3D proposal;
  OrientedBox3D bev_gt;
  OrientedBox3D image_gt;
  double rpn_score = 0.0;
  ProposalMode source = ProposalMode::kPerturb;  // which pool produced the proposal
};

struct ToyDataset {
  std::vector<ToyExample> examples;
  GroundPlane plane;
  int num_classes = 2;
  DiscrepancyCounts discrepancies;  // label agreement tally across the build
};

// Tuned defaults for the toy experiments. The training budget is short and
// fixed, so the dataset has to present signals all three branches can pick up
// from near-init features: tight perturb jitter, a dense lidar sweep, a
// coarse raster, and ignore bands wide enough to drop geometry edge cases.
SceneSpec toy_scene_defaults();
ProposalSpec toy_perturb_defaults();
ThresholdTable toy_threshold_defaults();
MaskConfig toy_mask_defaults();
BevConfig toy_bev_defaults();

// Scene classes must be covered by the default threshold table
// (Car/Pedestrian/Cyclist). Per-scene seeds derive from `seed`.
struct DatasetSpec {
  std::uint64_t seed = 101;
  int scene_count = 48;
  SceneSpec scene = toy_scene_defaults();
  int perturb_per_object = 6;
  int depth_aligned_per_object = 1;
  int random_per_scene = 10;
  // Jitter magnitudes for the perturb pool; mode/per_object/seed are set by
  // the builder per scene.
  ProposalSpec perturb = toy_perturb_defaults();
  ThresholdTable thresholds = toy_threshold_defaults();
  MaskConfig mask = toy_mask_defaults();
  BevConfig bev = toy_bev_defaults();
};

// Clutter variants for the mask comparison: heavy puts extra clutter on the
// viewing rays of annotated objects, free removes clutter entirely.
DatasetSpec clutter_heavy_dataset_spec();
DatasetSpec clutter_free_dataset_spec();

ToyDataset build_toy_dataset(const DatasetSpec& spec);

// Intermediate activations kept for backpropagation.
struct ForwardCache {
  std::vector<double> image_input;
  std::vector<double> bev_input;
  std::vector<double> image_pre;
  std::vector<double> bev_pre;
  std::vector<double> image_hidden;
  std::vector<double> bev_hidden;
};

ProposalOutputs toy_forward(const ToyHeaderModel& model, const ToyExample& example, bool mask_on,
                            ForwardCache* cache = nullptr);

// Loss over the listed examples plus the gradient for every parameter,
// accumulated in index order for bitwise determinism.
struct BatchResult {
  LossBreakdown breakdown;
  std::vector<double> param_grad;
};

BatchResult batch_loss_and_gradients(const ToyHeaderModel& model, const ToyDataset& dataset,
                                     const std::vector<int>& indices, const LossWeights& weights,
                                     bool mask_on);

struct TrainConfig {
  int steps = 2000;
  int batch_size = 64;
  double learning_rate = 1e-4;
  double decay_factor = 0.5;
  int decay_interval = 500;
  double lambda_ratio = 1.0;  // sub-loss weights relative to the fusion terms
  bool mask_on = true;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

LossWeights weights_for_ratio(double lambda_ratio);

struct TrainResult {
  ToyHeaderModel model;
  std::vector<double> loss_trace;  // one total per step
};

// Adam on the flat parameters, single threaded, bitwise deterministic per
// (seed, config). Throws NonFiniteLoss with the step index on divergence.
TrainResult train_toy_header(const ToyDataset& train_set, const TrainConfig& cfg);

struct BranchMetrics {
  double accuracy = 0.0;  // argmax class vs the view label, ignores excluded
  double mean_iou = 0.0;  // decoded box vs matched gt, over that view's positives
  int classified = 0;
  int decoded = 0;
};

struct EvalMetrics {
  BranchMetrics image;  // image scores vs image-view labels
  BranchMetrics bev;    // bev scores vs bev-view labels
  BranchMetrics fusion;  // fusion scores vs bev-view labels (the fusion supervision)
};

EvalMetrics evaluate_toy_header(const ToyHeaderModel& model, const ToyDataset& eval_set,
                                bool mask_on);

struct SeedRun {
  std::uint64_t seed = 0;
  EvalMetrics metrics;
  std::vector<double> loss_trace;
};

struct ExperimentReport {
  double lambda_ratio = 1.0;
  bool mask_on = true;
  std::vector<SeedRun> runs;

  double mean_image_accuracy() const;
  double mean_bev_accuracy() const;
  double mean_fusion_accuracy() const;
};

// Same data and seeds, sub-loss ratio low vs 1.
struct LambdaAblationResult {
  ExperimentReport low;
  ExperimentReport unit;
};

LambdaAblationResult run_lambda_ablation(const ToyDataset& train_set, const ToyDataset& eval_set,
                                         const std::array<double, 2>& ratios,
                                         const std::vector<std::uint64_t>& seeds,
                                         const TrainConfig& base);

// Same data and seeds, mask applied vs bypassed.
struct MaskAblationResult {
  ExperimentReport with_mask;
  ExperimentReport without_mask;
};

MaskAblationResult run_mask_ablation(const ToyDataset& train_set, const ToyDataset& eval_set,
                                     const std::vector<std::uint64_t>& seeds,
                                     const TrainConfig& base);

// Long-format rows: branch, metric, lambda_ratio, mask, seed, value.
std::string report_csv(const std::vector<const ExperimentReport*>& reports);
std::string report_json(const std::vector<const ExperimentReport*>& reports);

}  // namespace mlod

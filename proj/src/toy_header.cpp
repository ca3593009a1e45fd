#include "mlod/toy_header.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include <json.hpp>

#include "mlod/box_codec.hpp"
#include "mlod/error.hpp"
#include "mlod/geometry.hpp"
#include "mlod/image_io.hpp"
#include "mlod/rng.hpp"

namespace mlod {
namespace {

// y = W x + b for a row-major span
void affine(const std::vector<double>& params, const ParamSpan& w, const ParamSpan& b,
            const std::vector<double>& x, double* y) {
  for (int r = 0; r < w.rows; ++r) {
    double acc = params[std::size_t(b.offset) + r];
    const double* row = params.data() + w.offset + std::size_t(r) * w.cols;
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

// dW += g x^T, db += g, dx += W^T g
void affine_backward(const std::vector<double>& params, const ParamSpan& w, const ParamSpan& b,
                     const std::vector<double>& x, const double* g, std::vector<double>& grad,
                     std::vector<double>* dx) {
  for (int r = 0; r < w.rows; ++r) {
    const double gr = g[r];
    grad[std::size_t(b.offset) + r] += gr;
    double* grow = grad.data() + w.offset + std::size_t(r) * w.cols;
    const double* row = params.data() + w.offset + std::size_t(r) * w.cols;
    for (int c = 0; c < w.cols; ++c) {
      grow[c] += gr * x[c];
      if (dx) (*dx)[c] += row[c] * gr;
    }
  }
}

int class_index_for(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return int(i) + 1;  // 0 is background
  return -1;
}

double safe_mean(double sum, int count) { return count > 0 ? sum / count : 0.0; }

double mean_over_runs(const std::vector<SeedRun>& runs, double (BranchMetrics::*field),
                      BranchMetrics(EvalMetrics::*branch)) {
  if (runs.empty()) return 0.0;
  double acc = 0.0;
  for (const SeedRun& run : runs) acc += (run.metrics.*branch).*field;
  return acc / double(runs.size());
}

}  // namespace

ParamLayout make_param_layout(const ToyHeaderConfig& cfg) {
  ParamLayout layout;
  int offset = 0;
  auto span = [&](int rows, int cols) {
    ParamSpan s{offset, rows, cols};
    offset += rows * cols;
    return s;
  };
  const int hidden = cfg.hidden;
  const int scores = cfg.score_dims();
  const int box_dims = CornerEncoding::kDims;

  layout.image_w1 = span(hidden, cfg.image_inputs());
  layout.image_b1 = span(hidden, 1);
  layout.image_w_cls = span(scores, hidden);
  layout.image_b_cls = span(scores, 1);
  layout.image_w_box = span(box_dims, hidden);
  layout.image_b_box = span(box_dims, 1);

  layout.bev_w1 = span(hidden, cfg.bev_inputs());
  layout.bev_b1 = span(hidden, 1);
  layout.bev_w_cls = span(scores, hidden);
  layout.bev_b_cls = span(scores, 1);
  layout.bev_w_box = span(box_dims, hidden);
  layout.bev_b_box = span(box_dims, 1);

  const int fused = 2 * hidden;
  layout.fusion_w_cls = span(scores, fused);
  layout.fusion_b_cls = span(scores, 1);
  layout.fusion_w_box = span(box_dims, fused);
  layout.fusion_b_box = span(box_dims, 1);
  layout.fusion_w_ang = span(2, fused);
  layout.fusion_b_ang = span(2, 1);

  layout.total = offset;
  return layout;
}

ToyHeaderModel make_toy_header_model(const ToyHeaderConfig& cfg, std::uint64_t seed) {
  ToyHeaderModel model;
  model.cfg = cfg;
  model.layout = make_param_layout(cfg);
  model.params.assign(std::size_t(model.layout.total), 0.0);

  Rng rng(seed);
  auto xavier = [&](const ParamSpan& w) {
    const double limit = std::sqrt(6.0 / double(w.rows + w.cols));
    for (int i = 0; i < w.size(); ++i)
      model.params[std::size_t(w.offset) + i] = rng.uniform(-limit, limit);
  };
  // biases stay zero; weight draw order is fixed by the layout order
  xavier(model.layout.image_w1);
  xavier(model.layout.image_w_cls);
  xavier(model.layout.image_w_box);
  xavier(model.layout.bev_w1);
  xavier(model.layout.bev_w_cls);
  xavier(model.layout.bev_w_box);
  xavier(model.layout.fusion_w_cls);
  xavier(model.layout.fusion_w_box);
  xavier(model.layout.fusion_w_ang);
  return model;
}

ToyDataset build_toy_dataset(const DatasetSpec& spec) {
  ToyDataset dataset;
  dataset.num_classes = 2;
  const ThresholdTable& table = spec.thresholds;

  const std::vector<SceneObjectClass> classes =
      spec.scene.classes.empty() ? default_scene_classes() : spec.scene.classes;
  std::vector<std::string> class_names;
  for (const SceneObjectClass& c : classes) class_names.push_back(c.name);
  dataset.num_classes = int(class_names.size());

  for (int scene_index = 0; scene_index < spec.scene_count; ++scene_index) {
    SceneSpec scene_spec = spec.scene;
    scene_spec.seed = spec.seed * 1000003ull + std::uint64_t(scene_index);
    const SyntheticScene scene = generate_scene(scene_spec);
    dataset.plane = scene.plane;
    const ImageSize image_size{scene.image.width, scene.image.height};

    // proposal pool: jittered gts, view-discrepant copies, free boxes
    ProposalSet pool;
    std::vector<ProposalMode> pool_modes;
    auto extend = [&](const ProposalSet& extra, ProposalMode mode) {
      pool.boxes.insert(pool.boxes.end(), extra.boxes.begin(), extra.boxes.end());
      pool.scores.insert(pool.scores.end(), extra.scores.begin(), extra.scores.end());
      pool.source_object.insert(pool.source_object.end(), extra.source_object.begin(),
                                extra.source_object.end());
      pool.feasible.insert(pool.feasible.end(), extra.feasible.begin(), extra.feasible.end());
      pool_modes.insert(pool_modes.end(), extra.boxes.size(), mode);
    };
    {
      ProposalSpec p = spec.perturb;
      p.mode = ProposalMode::kPerturb;
      p.per_object = spec.perturb_per_object;
      p.seed = scene_spec.seed ^ 0x50455254ull;
      extend(generate_proposals(scene, p), ProposalMode::kPerturb);
      p.mode = ProposalMode::kDepthAligned;
      p.per_object = spec.depth_aligned_per_object;
      p.seed = scene_spec.seed ^ 0x44455054ull;
      extend(generate_proposals(scene, p), ProposalMode::kDepthAligned);
      p.mode = ProposalMode::kRandom;
      p.count = spec.random_per_scene;
      p.seed = scene_spec.seed ^ 0x524e444dull;
      extend(generate_proposals(scene, p), ProposalMode::kRandom);
    }

    std::vector<GroundTruthView> gt_views;
    for (std::size_t g = 0; g < scene.boxes.size(); ++g) {
      GroundTruthView view;
      view.box = scene.boxes[g];
      view.class_name = scene.box_classes[g];
      try {
        view.image_box = project_box_to_image(scene.boxes[g], scene.calib, image_size).bbox;
      } catch (const Error&) {
        view.image_box = std::nullopt;
      }
      gt_views.push_back(std::move(view));
    }

    std::vector<ProposalView> prop_views;
    std::vector<std::optional<ProjectedBox>> projections;
    for (std::size_t p = 0; p < pool.boxes.size(); ++p) {
      ProposalView view;
      view.box = pool.boxes[p];
      view.rpn_score = pool.scores[p];
      try {
        const ProjectedBox projected = project_box_to_image(pool.boxes[p], scene.calib, image_size);
        view.image_box = projected.bbox;
        projections.emplace_back(projected);
      } catch (const Error&) {
        projections.emplace_back(std::nullopt);
      }
      prop_views.push_back(std::move(view));
    }

    const std::vector<ProposalLabels> labels = assign_labels(prop_views, gt_views, table);
    const DiscrepancyCounts counts = discrepancy_stats(labels);
    dataset.discrepancies.agree_positive += counts.agree_positive;
    dataset.discrepancies.agree_negative += counts.agree_negative;
    dataset.discrepancies.bev_negative_image_positive += counts.bev_negative_image_positive;
    dataset.discrepancies.bev_positive_image_negative += counts.bev_positive_image_negative;
    dataset.discrepancies.any_ignore += counts.any_ignore;

    const BevMap bev_map = rasterize(scene.cloud, scene.plane, spec.bev);
    const SparseDepthMap sparse_depth =
        build_sparse_depth_map(scene.cloud, scene.calib, image_size);

    for (std::size_t p = 0; p < pool.boxes.size(); ++p) {
      ToyExample example;
      example.proposal = pool.boxes[p];
      example.rpn_score = pool.scores[p];
      example.source = pool_modes[p];

      try {
        example.bev_crop = crop_resize_bev(bev_map, pool.boxes[p], spec.mask.crop_size);
      } catch (const Error&) {
        continue;  // footprint entirely off the grid, unusable proposal
      }

      const int k = spec.mask.crop_size;
      if (projections[p]) {
        example.image_crop = crop_resize_rgb_bilinear(scene.image, projections[p]->bbox, k);
        for (float& v : example.image_crop.data) v /= 255.f;
        const std::vector<float> depth_grid =
            crop_resize_depth_nearest(sparse_depth, projections[p]->bbox, spec.mask);
        const DepthCellMedians medians = cell_medians(depth_grid, spec.mask);
        example.mask =
            compute_mask(medians, projections[p]->depth_min, projections[p]->depth_max, spec.mask);
      } else {
        example.image_crop.size = k;
        example.image_crop.channels = 3;
        example.image_crop.data.assign(std::size_t(3) * k * k, 0.f);
        example.mask.size = k;
        example.mask.cells.assign(std::size_t(k) * k, 1);
      }

      const ProposalLabels& label = labels[p];
      auto view_class = [&](const ViewLabel& view) {
        switch (view.state) {
          case LabelState::kPositive:
            return class_index_for(class_names, gt_views[std::size_t(view.matched_gt)].class_name);
          case LabelState::kNegative:
            return 0;
          case LabelState::kIgnore:
          default:
            return -1;
        }
      };
      example.targets.bev_class = view_class(label.bev);
      example.targets.image_class = view_class(label.image);
      if (example.targets.bev_class > 0) {
        example.bev_gt = gt_views[std::size_t(label.bev.matched_gt)].box;
        example.targets.bev_box = encode_box(example.bev_gt, example.proposal, scene.plane);
        example.targets.bev_orientation = encode_orientation(example.bev_gt.yaw).v;
      }
      if (example.targets.image_class > 0) {
        example.image_gt = gt_views[std::size_t(label.image.matched_gt)].box;
        example.targets.image_box = encode_box(example.image_gt, example.proposal, scene.plane);
      }
      dataset.examples.push_back(std::move(example));
    }
  }
  return dataset;
}

ProposalOutputs toy_forward(const ToyHeaderModel& model, const ToyExample& example, bool mask_on,
                            ForwardCache* cache) {
  const ToyHeaderConfig& cfg = model.cfg;
  const ParamLayout& layout = model.layout;
  if (example.image_crop.size != cfg.crop_size || example.image_crop.channels != cfg.image_channels ||
      example.bev_crop.size != cfg.crop_size || example.bev_crop.channels != cfg.bev_channels ||
      example.mask.size != cfg.crop_size)
    fail(ErrorCode::ShapeMismatch, "example crops do not match the header config");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;

  c.image_input.resize(std::size_t(cfg.image_inputs()));
  const int cells = cfg.crop_size * cfg.crop_size;
  for (int ch = 0; ch < cfg.image_channels; ++ch) {
    for (int i = 0; i < cells; ++i) {
      double v = example.image_crop.data[std::size_t(ch) * cells + i];
      if (mask_on && example.mask.cells[std::size_t(i)] == 0) v = 0.0;
      c.image_input[std::size_t(ch) * cells + i] = v;
    }
  }
  c.bev_input.assign(example.bev_crop.data.begin(), example.bev_crop.data.end());

  c.image_pre.resize(std::size_t(cfg.hidden));
  c.bev_pre.resize(std::size_t(cfg.hidden));
  affine(model.params, layout.image_w1, layout.image_b1, c.image_input, c.image_pre.data());
  affine(model.params, layout.bev_w1, layout.bev_b1, c.bev_input, c.bev_pre.data());
  c.image_hidden.resize(std::size_t(cfg.hidden));
  c.bev_hidden.resize(std::size_t(cfg.hidden));
  for (int i = 0; i < cfg.hidden; ++i) {
    c.image_hidden[i] = std::max(0.0, c.image_pre[i]);
    c.bev_hidden[i] = std::max(0.0, c.bev_pre[i]);
  }

  ProposalOutputs out;
  out.image_scores.resize(std::size_t(cfg.score_dims()));
  out.bev_scores.resize(std::size_t(cfg.score_dims()));
  out.fusion_scores.resize(std::size_t(cfg.score_dims()));
  std::array<double, CornerEncoding::kDims> box_raw{};

  affine(model.params, layout.image_w_cls, layout.image_b_cls, c.image_hidden,
         out.image_scores.data());
  affine(model.params, layout.image_w_box, layout.image_b_box, c.image_hidden, box_raw.data());
  out.image_box = CornerEncoding::from_flat(box_raw);

  affine(model.params, layout.bev_w_cls, layout.bev_b_cls, c.bev_hidden, out.bev_scores.data());
  affine(model.params, layout.bev_w_box, layout.bev_b_box, c.bev_hidden, box_raw.data());
  out.bev_box = CornerEncoding::from_flat(box_raw);

  std::vector<double> fused(std::size_t(2) * cfg.hidden);
  std::copy(c.image_hidden.begin(), c.image_hidden.end(), fused.begin());
  std::copy(c.bev_hidden.begin(), c.bev_hidden.end(), fused.begin() + cfg.hidden);
  affine(model.params, layout.fusion_w_cls, layout.fusion_b_cls, fused, out.fusion_scores.data());
  affine(model.params, layout.fusion_w_box, layout.fusion_b_box, fused, box_raw.data());
  out.fusion_box = CornerEncoding::from_flat(box_raw);
  affine(model.params, layout.fusion_w_ang, layout.fusion_b_ang, fused,
         out.fusion_orientation.data());
  return out;
}

BatchResult batch_loss_and_gradients(const ToyHeaderModel& model, const ToyDataset& dataset,
                                     const std::vector<int>& indices, const LossWeights& weights,
                                     bool mask_on) {
  const ToyHeaderConfig& cfg = model.cfg;
  const ParamLayout& layout = model.layout;

  std::vector<ForwardCache> caches(indices.size());
  std::vector<ProposalOutputs> outputs;
  std::vector<ProposalTargets> targets;
  outputs.reserve(indices.size());
  targets.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const ToyExample& example = dataset.examples.at(std::size_t(indices[i]));
    outputs.push_back(toy_forward(model, example, mask_on, &caches[i]));
    targets.push_back(example.targets);
  }

  BatchResult result;
  result.breakdown = total_loss(outputs, targets, weights);
  result.param_grad.assign(std::size_t(layout.total), 0.0);

  std::vector<double> fused(std::size_t(2) * cfg.hidden);
  std::vector<double> d_fused(std::size_t(2) * cfg.hidden);
  std::vector<double> d_hidden(std::size_t(cfg.hidden));
  std::vector<double> d_pre(std::size_t(cfg.hidden));

  for (std::size_t i = 0; i < indices.size(); ++i) {
    const ForwardCache& c = caches[i];
    const ProposalOutputs& g = result.breakdown.gradients[i];

    std::copy(c.image_hidden.begin(), c.image_hidden.end(), fused.begin());
    std::copy(c.bev_hidden.begin(), c.bev_hidden.end(), fused.begin() + cfg.hidden);
    std::fill(d_fused.begin(), d_fused.end(), 0.0);

    affine_backward(model.params, layout.fusion_w_cls, layout.fusion_b_cls, fused,
                    g.fusion_scores.data(), result.param_grad, &d_fused);
    const auto fusion_box_grad = g.fusion_box.flat();
    affine_backward(model.params, layout.fusion_w_box, layout.fusion_b_box, fused,
                    fusion_box_grad.data(), result.param_grad, &d_fused);
    affine_backward(model.params, layout.fusion_w_ang, layout.fusion_b_ang, fused,
                    g.fusion_orientation.data(), result.param_grad, &d_fused);

    // image branch: head gradients plus the fusion share, through the relu
    std::copy(d_fused.begin(), d_fused.begin() + cfg.hidden, d_hidden.begin());
    affine_backward(model.params, layout.image_w_cls, layout.image_b_cls, c.image_hidden,
                    g.image_scores.data(), result.param_grad, &d_hidden);
    const auto image_box_grad = g.image_box.flat();
    affine_backward(model.params, layout.image_w_box, layout.image_b_box, c.image_hidden,
                    image_box_grad.data(), result.param_grad, &d_hidden);
    for (int h = 0; h < cfg.hidden; ++h) d_pre[h] = c.image_pre[h] > 0.0 ? d_hidden[h] : 0.0;
    affine_backward(model.params, layout.image_w1, layout.image_b1, c.image_input, d_pre.data(),
                    result.param_grad, nullptr);

    std::copy(d_fused.begin() + cfg.hidden, d_fused.end(), d_hidden.begin());
    affine_backward(model.params, layout.bev_w_cls, layout.bev_b_cls, c.bev_hidden,
                    g.bev_scores.data(), result.param_grad, &d_hidden);
    const auto bev_box_grad = g.bev_box.flat();
    affine_backward(model.params, layout.bev_w_box, layout.bev_b_box, c.bev_hidden,
                    bev_box_grad.data(), result.param_grad, &d_hidden);
    for (int h = 0; h < cfg.hidden; ++h) d_pre[h] = c.bev_pre[h] > 0.0 ? d_hidden[h] : 0.0;
    affine_backward(model.params, layout.bev_w1, layout.bev_b1, c.bev_input, d_pre.data(),
                    result.param_grad, nullptr);
  }
  return result;
}

SceneSpec toy_scene_defaults() {
  SceneSpec scene;
  scene.clutter_count = 6;
  scene.lidar_rings = 64;
  scene.lidar_azimuth_steps = 1440;
  return scene;
}

ProposalSpec toy_perturb_defaults() {
  ProposalSpec perturb;
  perturb.center_sigma = 0.15;
  return perturb;
}

ThresholdTable toy_threshold_defaults() {
  ThresholdTable table = default_threshold_table();
  table["Car"].bev.negative_max = 0.35;
  table["Pedestrian"].bev.negative_max = 0.25;
  return table;
}

MaskConfig toy_mask_defaults() {
  MaskConfig mask;
  mask.span_margin = 2.5;
  return mask;
}

BevConfig toy_bev_defaults() {
  BevConfig bev;
  bev.resolution = 0.4;
  return bev;
}

DatasetSpec clutter_heavy_dataset_spec() {
  DatasetSpec spec;
  spec.scene.clutter_count = 10;
  spec.scene.clutter_aligned_fraction = 0.85;
  return spec;
}

DatasetSpec clutter_free_dataset_spec() {
  DatasetSpec spec;
  spec.scene.clutter_count = 0;
  return spec;
}

LossWeights weights_for_ratio(double lambda_ratio) {
  LossWeights weights;
  weights.sub_cls = lambda_ratio;
  weights.sub_reg = lambda_ratio;
  return weights;
}

TrainResult train_toy_header(const ToyDataset& train_set, const TrainConfig& cfg) {
  if (train_set.examples.empty()) fail(ErrorCode::BadConfig, "training set is empty");
  if (cfg.steps < 1 || cfg.batch_size < 1 || cfg.learning_rate <= 0.0)
    fail(ErrorCode::BadConfig, "bad train config");

  TrainResult result;
  result.model = make_toy_header_model(ToyHeaderConfig{}, cfg.seed);
  const LossWeights weights = weights_for_ratio(cfg.lambda_ratio);

  Rng rng(cfg.seed ^ 0x42415443ull);
  std::vector<double> m(result.model.params.size(), 0.0);
  std::vector<double> v(result.model.params.size(), 0.0);
  std::vector<int> batch(std::size_t(cfg.batch_size));

  for (int step = 0; step < cfg.steps; ++step) {
    for (int b = 0; b < cfg.batch_size; ++b)
      batch[b] = int(rng.uniform_index(train_set.examples.size()));

    BatchResult batch_result;
    try {
      batch_result = batch_loss_and_gradients(result.model, train_set, batch, weights, cfg.mask_on);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFiniteLoss)
        fail(ErrorCode::NonFiniteLoss, "training diverged at step " + std::to_string(step));
      throw;
    }
    result.loss_trace.push_back(batch_result.breakdown.total);

    const double lr =
        cfg.learning_rate * std::pow(cfg.decay_factor, double(step / cfg.decay_interval));
    const double t = double(step + 1);
    const double bias1 = 1.0 - std::pow(cfg.beta1, t);
    const double bias2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t p = 0; p < result.model.params.size(); ++p) {
      const double g = batch_result.param_grad[p];
      m[p] = cfg.beta1 * m[p] + (1.0 - cfg.beta1) * g;
      v[p] = cfg.beta2 * v[p] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[p] / bias1;
      const double v_hat = v[p] / bias2;
      result.model.params[p] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
  return result;
}

EvalMetrics evaluate_toy_header(const ToyHeaderModel& model, const ToyDataset& eval_set,
                                bool mask_on) {
  EvalMetrics metrics;
  int image_correct = 0, bev_correct = 0, fusion_correct = 0;
  double image_iou = 0.0, bev_iou_sum = 0.0, fusion_iou = 0.0;

  auto argmax = [](const std::vector<double>& scores) {
    return int(std::max_element(scores.begin(), scores.end()) - scores.begin());
  };
  auto decoded_iou = [&](const CornerEncoding& enc, const ToyExample& example,
                         const OrientedBox3D& gt) {
    try {
      const OrientedBox3D decoded =
          decode_box(enc, example.proposal, eval_set.plane, example.proposal.yaw);
      return bev_iou(decoded, gt);
    } catch (const Error&) {
      return 0.0;  // degenerate decode scores zero overlap
    }
  };

  for (const ToyExample& example : eval_set.examples) {
    const ProposalOutputs out = toy_forward(model, example, mask_on, nullptr);
    const ProposalTargets& t = example.targets;

    if (t.image_class >= 0) {
      metrics.image.classified += 1;
      if (argmax(out.image_scores) == t.image_class) image_correct += 1;
    }
    if (t.bev_class >= 0) {
      metrics.bev.classified += 1;
      metrics.fusion.classified += 1;
      if (argmax(out.bev_scores) == t.bev_class) bev_correct += 1;
      if (argmax(out.fusion_scores) == t.bev_class) fusion_correct += 1;
    }
    if (t.image_class > 0) {
      metrics.image.decoded += 1;
      image_iou += decoded_iou(out.image_box, example, example.image_gt);
    }
    if (t.bev_class > 0) {
      metrics.bev.decoded += 1;
      metrics.fusion.decoded += 1;
      bev_iou_sum += decoded_iou(out.bev_box, example, example.bev_gt);
      fusion_iou += decoded_iou(out.fusion_box, example, example.bev_gt);
    }
  }

  metrics.image.accuracy = safe_mean(double(image_correct), metrics.image.classified);
  metrics.bev.accuracy = safe_mean(double(bev_correct), metrics.bev.classified);
  metrics.fusion.accuracy = safe_mean(double(fusion_correct), metrics.fusion.classified);
  metrics.image.mean_iou = safe_mean(image_iou, metrics.image.decoded);
  metrics.bev.mean_iou = safe_mean(bev_iou_sum, metrics.bev.decoded);
  metrics.fusion.mean_iou = safe_mean(fusion_iou, metrics.fusion.decoded);
  return metrics;
}

double ExperimentReport::mean_image_accuracy() const {
  return mean_over_runs(runs, &BranchMetrics::accuracy, &EvalMetrics::image);
}
double ExperimentReport::mean_bev_accuracy() const {
  return mean_over_runs(runs, &BranchMetrics::accuracy, &EvalMetrics::bev);
}
double ExperimentReport::mean_fusion_accuracy() const {
  return mean_over_runs(runs, &BranchMetrics::accuracy, &EvalMetrics::fusion);
}

namespace {

ExperimentReport run_experiment(const ToyDataset& train_set, const ToyDataset& eval_set,
                                const std::vector<std::uint64_t>& seeds, const TrainConfig& base,
                                double lambda_ratio, bool mask_on) {
  ExperimentReport report;
  report.lambda_ratio = lambda_ratio;
  report.mask_on = mask_on;
  for (const std::uint64_t seed : seeds) {
    TrainConfig cfg = base;
    cfg.seed = seed;
    cfg.lambda_ratio = lambda_ratio;
    cfg.mask_on = mask_on;
    TrainResult trained = train_toy_header(train_set, cfg);
    SeedRun run;
    run.seed = seed;
    run.metrics = evaluate_toy_header(trained.model, eval_set, mask_on);
    run.loss_trace = std::move(trained.loss_trace);
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace

LambdaAblationResult run_lambda_ablation(const ToyDataset& train_set, const ToyDataset& eval_set,
                                         const std::array<double, 2>& ratios,
                                         const std::vector<std::uint64_t>& seeds,
                                         const TrainConfig& base) {
  LambdaAblationResult result;
  result.low = run_experiment(train_set, eval_set, seeds, base, ratios[0], base.mask_on);
  result.unit = run_experiment(train_set, eval_set, seeds, base, ratios[1], base.mask_on);
  return result;
}

MaskAblationResult run_mask_ablation(const ToyDataset& train_set, const ToyDataset& eval_set,
                                     const std::vector<std::uint64_t>& seeds,
                                     const TrainConfig& base) {
  MaskAblationResult result;
  result.with_mask = run_experiment(train_set, eval_set, seeds, base, base.lambda_ratio, true);
  result.without_mask = run_experiment(train_set, eval_set, seeds, base, base.lambda_ratio, false);
  return result;
}

namespace {

void append_rows(std::string& csv, const ExperimentReport& report) {
  char buf[160];
  auto row = [&](const char* branch, const char* metric, std::uint64_t seed, double value) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.3f,%d,%llu,%.6f\n", branch, metric,
                  report.lambda_ratio, report.mask_on ? 1 : 0, (unsigned long long)seed, value);
    csv += buf;
  };
  for (const SeedRun& run : report.runs) {
    row("image", "accuracy", run.seed, run.metrics.image.accuracy);
    row("image", "mean_iou", run.seed, run.metrics.image.mean_iou);
    row("bev", "accuracy", run.seed, run.metrics.bev.accuracy);
    row("bev", "mean_iou", run.seed, run.metrics.bev.mean_iou);
    row("fusion", "accuracy", run.seed, run.metrics.fusion.accuracy);
    row("fusion", "mean_iou", run.seed, run.metrics.fusion.mean_iou);
    row("total", "final_loss", run.seed,
        run.loss_trace.empty() ? 0.0 : run.loss_trace.back());
  }
}

nlohmann::json branch_json(const BranchMetrics& branch) {
  return {{"accuracy", branch.accuracy},
          {"mean_iou", branch.mean_iou},
          {"classified", branch.classified},
          {"decoded", branch.decoded}};
}

}  // namespace

std::string report_csv(const std::vector<const ExperimentReport*>& reports) {
  std::string csv = "branch,metric,lambda_ratio,mask,seed,value\n";
  for (const ExperimentReport* report : reports) append_rows(csv, *report);
  return csv;
}

std::string report_json(const std::vector<const ExperimentReport*>& reports) {
  nlohmann::json root = nlohmann::json::array();
  for (const ExperimentReport* report : reports) {
    nlohmann::json entry;
    entry["lambda_ratio"] = report->lambda_ratio;
    entry["mask_on"] = report->mask_on;
    entry["mean_image_accuracy"] = report->mean_image_accuracy();
    entry["mean_bev_accuracy"] = report->mean_bev_accuracy();
    entry["mean_fusion_accuracy"] = report->mean_fusion_accuracy();
    nlohmann::json runs = nlohmann::json::array();
    for (const SeedRun& run : report->runs) {
      nlohmann::json r;
      r["seed"] = run.seed;
      r["image"] = branch_json(run.metrics.image);
      r["bev"] = branch_json(run.metrics.bev);
      r["fusion"] = branch_json(run.metrics.fusion);
      r["final_loss"] = run.loss_trace.empty() ? 0.0 : run.loss_trace.back();
      runs.push_back(std::move(r));
    }
    entry["runs"] = std::move(runs);
    root.push_back(std::move(entry));
  }
  return root.dump(2) + "\n";
}

}  // namespace mlod

#include "mlod/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"

namespace mlod {

ThresholdTable default_threshold_table() {
  ThresholdTable table;
  table["Car"] = ClassThresholds{{0.65, 0.55}, {0.70, 0.50}, /*negative_inclusive=*/false};
  table["Pedestrian"] = ClassThresholds{{0.45, 0.40}, {0.60, 0.40}, true};
  table["Cyclist"] = ClassThresholds{{0.45, 0.40}, {0.60, 0.40}, true};
  return table;
}

namespace {

ViewLabel classify(double iou, int gt_index, const ViewThresholds& th, bool negative_inclusive) {
  ViewLabel label;
  label.iou = iou;
  if (iou >= th.positive_min) {
    label.state = LabelState::kPositive;
    label.matched_gt = gt_index;
  } else if (negative_inclusive ? (iou <= th.negative_max) : (iou < th.negative_max)) {
    label.state = LabelState::kNegative;
  } else {
    label.state = LabelState::kIgnore;
  }
  return label;
}

}  // namespace

std::vector<ProposalLabels> assign_labels(const std::vector<ProposalView>& proposals,
                                          const std::vector<GroundTruthView>& gts,
                                          const ThresholdTable& table) {
  for (const GroundTruthView& gt : gts)
    if (!gt.dont_care && table.find(gt.class_name) == table.end())
      fail(ErrorCode::UnknownClass, gt.class_name);

  std::vector<ProposalLabels> out(proposals.size());
  for (std::size_t p = 0; p < proposals.size(); ++p) {
    const ProposalView& prop = proposals[p];
    // best real gt per view
    double best_bev = 0.0, best_img = 0.0;
    int best_bev_gt = -1, best_img_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const GroundTruthView& gt = gts[g];
      if (gt.dont_care) continue;
      const double biou = bev_iou(prop.box, gt.box);
      if (biou > best_bev) {
        best_bev = biou;
        best_bev_gt = int(g);
      }
      if (prop.image_box && gt.image_box) {
        const double iiou = image_iou(*prop.image_box, *gt.image_box);
        if (iiou > best_img) {
          best_img = iiou;
          best_img_gt = int(g);
        }
      }
    }

    ProposalLabels labels;
    if (best_bev_gt >= 0) {
      const ClassThresholds& th = table.at(gts[best_bev_gt].class_name);
      labels.bev = classify(best_bev, best_bev_gt, th.bev, th.negative_inclusive);
    } else {
      labels.bev = ViewLabel{LabelState::kNegative, 0.0, -1};
    }
    if (!prop.image_box) {
      labels.image = ViewLabel{LabelState::kIgnore, 0.0, -1};  // cannot be assessed
    } else if (best_img_gt >= 0) {
      const ClassThresholds& th = table.at(gts[best_img_gt].class_name);
      labels.image = classify(best_img, best_img_gt, th.image, th.negative_inclusive);
    } else {
      labels.image = ViewLabel{LabelState::kNegative, 0.0, -1};
    }
    out[p] = labels;
  }
  return out;
}

Minibatch sample_minibatch(const std::vector<ProposalLabels>& labels,
                           const std::vector<double>& rpn_scores, std::size_t size,
                           std::uint64_t /*seed*/) {
  if (rpn_scores.size() != labels.size())
    fail(ErrorCode::ShapeMismatch, "one rpn score per proposal required");
  std::vector<int> positives;
  std::vector<int> negatives;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i].bev.state) {
      case LabelState::kPositive: positives.push_back(int(i)); break;
      case LabelState::kNegative: negatives.push_back(int(i)); break;
      case LabelState::kIgnore: break;  // never sampled
    }
  }
  Minibatch batch;
  batch.indices = positives;
  if (batch.indices.size() < size) {
    const std::size_t room = size - batch.indices.size();
    if (negatives.size() > room) {
      // hard negatives first; stable sort keeps index order on ties
      std::stable_sort(negatives.begin(), negatives.end(), [&](int a, int b) {
        return rpn_scores[a] > rpn_scores[b];
      });
      negatives.resize(room);
      std::sort(negatives.begin(), negatives.end());
    }
    batch.indices.insert(batch.indices.end(), negatives.begin(), negatives.end());
  } else if (batch.indices.size() > size) {
    batch.indices.resize(size);
  }
  batch.image_active.reserve(batch.indices.size());
  for (int idx : batch.indices)
    batch.image_active.push_back(labels[idx].image.state != LabelState::kIgnore ? 1 : 0);
  return batch;
}

DiscrepancyCounts discrepancy_stats(const std::vector<ProposalLabels>& labels) {
  DiscrepancyCounts counts;
  for (const ProposalLabels& l : labels) {
    if (l.bev.state == LabelState::kIgnore || l.image.state == LabelState::kIgnore) {
      ++counts.any_ignore;
    } else if (l.bev.state == LabelState::kPositive) {
      if (l.image.state == LabelState::kPositive)
        ++counts.agree_positive;
      else
        ++counts.bev_positive_image_negative;
    } else {
      if (l.image.state == LabelState::kPositive)
        ++counts.bev_negative_image_positive;
      else
        ++counts.agree_negative;
    }
  }
  return counts;
}

double average_precision(const std::vector<ScoredBox>& detections,
                         const std::vector<EvalGroundTruth>& gts, double iou_threshold) {
  std::size_t num_valid_gt = 0;
  for (const EvalGroundTruth& gt : gts)
    if (!gt.ignored) ++num_valid_gt;

  std::vector<int> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return detections[a].score > detections[b].score;
  });

  std::vector<char> gt_matched(gts.size(), 0);
  std::vector<double> precisions;
  std::vector<double> recalls;
  std::size_t tp = 0, fp = 0;
  for (int det_index : order) {
    const ScoredBox& det = detections[det_index];
    double best_iou = 0.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_matched[g]) continue;
      const double iou = bev_iou(det.box, gts[g].box);
      if (iou >= iou_threshold && iou > best_iou) {
        best_iou = iou;
        best_gt = int(g);
      }
    }
    if (best_gt >= 0 && gts[best_gt].ignored) {
      gt_matched[best_gt] = 1;  // spent, but outside the bracket: drop silently
      continue;
    }
    if (best_gt >= 0) {
      gt_matched[best_gt] = 1;
      ++tp;
    } else {
      ++fp;
    }
    precisions.push_back(double(tp) / double(tp + fp));
    recalls.push_back(num_valid_gt ? double(tp) / double(num_valid_gt) : 0.0);
  }

  if (num_valid_gt == 0) return 0.0;
  double ap = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double r = double(k) / 40.0;
    double best = 0.0;
    for (std::size_t i = 0; i < precisions.size(); ++i)
      if (recalls[i] >= r) best = std::max(best, precisions[i]);
    ap += best;
  }
  return ap / 40.0;
}

bool within_difficulty(const GroundTruthLabel& label, Difficulty difficulty) {
  static constexpr double kMinHeight[3] = {40.0, 25.0, 25.0};
  static constexpr int kMaxOcclusion[3] = {0, 1, 2};
  static constexpr double kMaxTruncation[3] = {0.15, 0.30, 0.50};
  const int d = int(difficulty);
  const double box_height = label.bbox.bottom - label.bbox.top;
  return box_height >= kMinHeight[d] && label.occlusion <= kMaxOcclusion[d] &&
         label.truncation <= kMaxTruncation[d];
}

double overlap_threshold_for_class(const std::string& class_name) {
  return class_name == "Car" ? 0.7 : 0.5;
}

}  // namespace mlod

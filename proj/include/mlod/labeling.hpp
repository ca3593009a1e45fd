#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlod/types.hpp"

namespace mlod {

enum class LabelState { kPositive, kNegative, kIgnore };

// Assignment of one proposal in one view. matched_gt indexes the ground-truth
// list for positives (-1 otherwise); iou is against the best real gt.
struct ViewLabel {
  LabelState state = LabelState::kNegative;
  double iou = 0.0;
  int matched_gt = -1;
};

struct ProposalLabels {
  ViewLabel bev;
  ViewLabel image;
};

struct ViewThresholds {
  double positive_min = 0.0;  // iou >= positive_min is positive
  double negative_max = 0.0;
};

struct ClassThresholds {
  ViewThresholds bev;
  ViewThresholds image;
  // true: iou <= negative_max is negative ("no more than"); false: strict <
  bool negative_inclusive = true;
};

using ThresholdTable = std::map<std::string, ClassThresholds>;

// Car 0.65/0.55 bev and 0.7/0.5 image with strict negatives; Pedestrian and
// Cyclist 0.45/0.4 and 0.6/0.4 with inclusive negatives.
ThresholdTable default_threshold_table();

// One proposal viewed in both spaces. A missing image box (off-image or
// behind the camera) makes the proposal ignore in the image view.
struct ProposalView {
  OrientedBox3D box;
  std::optional<AxisAlignedBox2D> image_box;
  double rpn_score = 0.0;
};

struct GroundTruthView {
  OrientedBox3D box;
  std::optional<AxisAlignedBox2D> image_box;
  std::string class_name;
  bool dont_care = false;
};

// Per-view assignment against the best-overlapping real ground truth, using
// that ground truth's class thresholds. DontCare rows never match. No ground
// truths means every proposal is negative. Throws UnknownClass for a real gt
// class missing from the table.
std::vector<ProposalLabels> assign_labels(const std::vector<ProposalView>& proposals,
                                          const std::vector<GroundTruthView>& gts,
                                          const ThresholdTable& table);

// Training batch: every bev-positive plus the top-scoring bev-negatives up to
// `size` (ties broken by index; selection is deterministic, the seed is kept
// for interface stability). image_active flags members that are not ignore in
// the image view.
struct Minibatch {
  std::vector<int> indices;
  std::vector<std::uint8_t> image_active;
};

Minibatch sample_minibatch(const std::vector<ProposalLabels>& labels,
                           const std::vector<double>& rpn_scores, std::size_t size,
                           std::uint64_t seed);

struct DiscrepancyCounts {
  std::size_t agree_positive = 0;
  std::size_t agree_negative = 0;
  std::size_t bev_negative_image_positive = 0;
  std::size_t bev_positive_image_negative = 0;
  std::size_t any_ignore = 0;

  std::size_t total() const {
    return agree_positive + agree_negative + bev_negative_image_positive +
           bev_positive_image_negative + any_ignore;
  }
};

DiscrepancyCounts discrepancy_stats(const std::vector<ProposalLabels>& labels);

// --- evaluation --------------------------------------------------------------

struct ScoredBox {
  OrientedBox3D box;
  double score = 0.0;
};

struct EvalGroundTruth {
  OrientedBox3D box;
  bool ignored = false;  // outside the difficulty bracket: no reward, no penalty
};

// Greedy score-descending matching in the top-down view at `iou_threshold`,
// then 40-point interpolated average precision. Detections whose best match
// is an ignored ground truth are dropped from the curve.
double average_precision(const std::vector<ScoredBox>& detections,
                         const std::vector<EvalGroundTruth>& gts, double iou_threshold);

enum class Difficulty { kEasy = 0, kModerate = 1, kHard = 2 };

// Bracket gates: min 2D box height 40/25/25 px, max occlusion 0/1/2, max
// truncation 0.15/0.3/0.5.
bool within_difficulty(const GroundTruthLabel& label, Difficulty difficulty);

// 0.7 for cars, 0.5 otherwise.
double overlap_threshold_for_class(const std::string& class_name);

}  // namespace mlod

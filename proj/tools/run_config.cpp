#include "run_config.hpp"

#include <cstdlib>
#include <sstream>

#include "mlod/error.hpp"

namespace mlod {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::BadConfig, key + ": expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return int(v);
  } catch (const std::exception&) {
    fail(ErrorCode::BadConfig, key + ": expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::BadConfig, key + ": expected an unsigned integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  fail(ErrorCode::BadConfig, key + ": expected true/false, got '" + value + "'");
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_u64(key, item));
  }
  if (out.empty()) fail(ErrorCode::BadConfig, key + ": expected a comma list of seeds");
  return out;
}

// Threshold keys look like Car.bev.positive_min or Car.negative_inclusive.
void apply_threshold_key(ThresholdTable& table, const std::string& key,
                         const std::string& value) {
  const std::size_t first = key.find('.');
  if (first == std::string::npos)
    fail(ErrorCode::BadConfig, "thresholds." + key + ": expected class.view.field");
  const std::string class_name = key.substr(0, first);
  const std::string rest = key.substr(first + 1);
  auto it = table.find(class_name);
  if (it == table.end())
    fail(ErrorCode::BadConfig, "thresholds." + key + ": unknown class '" + class_name + "'");
  ClassThresholds& cls = it->second;
  if (rest == "negative_inclusive") {
    cls.negative_inclusive = parse_bool(key, value);
    return;
  }
  const std::size_t second = rest.find('.');
  if (second == std::string::npos)
    fail(ErrorCode::BadConfig, "thresholds." + key + ": expected class.view.field");
  const std::string view = rest.substr(0, second);
  const std::string field = rest.substr(second + 1);
  ViewThresholds* vt = nullptr;
  if (view == "bev") vt = &cls.bev;
  else if (view == "image") vt = &cls.image;
  else fail(ErrorCode::BadConfig, "thresholds." + key + ": view must be bev or image");
  if (field == "positive_min") vt->positive_min = parse_double(key, value);
  else if (field == "negative_max") vt->negative_max = parse_double(key, value);
  else fail(ErrorCode::BadConfig, "thresholds." + key + ": unknown field '" + field + "'");
}

void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  const std::string where = section.empty() ? key : section + "." + key;
  if (section.empty()) {
    if (key == "seed") cfg.seed = parse_u64(where, value);
    else if (key == "threads") cfg.threads = parse_int(where, value);
    else fail(ErrorCode::BadConfig, "unknown key '" + where + "'");
    return;
  }
  if (section == "bev") {
    BevConfig& b = cfg.bev;
    if (key == "resolution") b.resolution = parse_double(where, value);
    else if (key == "x_min") b.x_min = parse_double(where, value);
    else if (key == "x_max") b.x_max = parse_double(where, value);
    else if (key == "y_min") b.y_min = parse_double(where, value);
    else if (key == "y_max") b.y_max = parse_double(where, value);
    else if (key == "height_min") b.height_min = parse_double(where, value);
    else if (key == "height_max") b.height_max = parse_double(where, value);
    else if (key == "num_slices") b.num_slices = parse_int(where, value);
    else fail(ErrorCode::BadConfig, "unknown key '" + where + "'");
    return;
  }
  if (section == "mask") {
    MaskConfig& m = cfg.mask;
    if (key == "crop_size") m.crop_size = parse_int(where, value);
    else if (key == "upsample") m.upsample = parse_int(where, value);
    else if (key == "span_margin") m.span_margin = parse_double(where, value);
    else if (key == "zero_margin") m.zero_margin = parse_double(where, value);
    else fail(ErrorCode::BadConfig, "unknown key '" + where + "'");
    return;
  }
  if (section == "scene") {
    SceneSpec& s = cfg.scene;
    if (key == "object_count") s.object_count = parse_int(where, value);
    else if (key == "clutter_count") s.clutter_count = parse_int(where, value);
    else if (key == "clutter_aligned_fraction") s.clutter_aligned_fraction = parse_double(where, value);
    else if (key == "clutter_class_colors") s.clutter_class_colors = parse_bool(where, value);
    else if (key == "image_width") s.image_size.width = parse_int(where, value);
    else if (key == "image_height") s.image_size.height = parse_int(where, value);
    else if (key == "focal") s.focal = parse_double(where, value);
    else if (key == "sensor_height") s.sensor_height = parse_double(where, value);
    else if (key == "min_range") s.min_range = parse_double(where, value);
    else if (key == "max_range") s.max_range = parse_double(where, value);
    else if (key == "lateral_fraction") s.lateral_fraction = parse_double(where, value);
    else if (key == "lidar_rings") s.lidar_rings = parse_int(where, value);
    else if (key == "lidar_elevation_min_deg") s.lidar_elevation_min_deg = parse_double(where, value);
    else if (key == "lidar_elevation_max_deg") s.lidar_elevation_max_deg = parse_double(where, value);
    else if (key == "lidar_azimuth_steps") s.lidar_azimuth_steps = parse_int(where, value);
    else if (key == "lidar_azimuth_span_deg") s.lidar_azimuth_span_deg = parse_double(where, value);
    else if (key == "brightness_min") s.brightness_min = parse_double(where, value);
    else if (key == "brightness_max") s.brightness_max = parse_double(where, value);
    else if (key == "pixel_noise") s.pixel_noise = parse_double(where, value);
    else if (key == "max_placement_tries") s.max_placement_tries = parse_int(where, value);
    else fail(ErrorCode::BadConfig, "unknown key '" + where + "'");
    return;
  }
  if (section == "train") {
    TrainConfig& t = cfg.train;
    if (key == "steps") t.steps = parse_int(where, value);
    else if (key == "batch_size") t.batch_size = parse_int(where, value);
    else if (key == "learning_rate") t.learning_rate = parse_double(where, value);
    else if (key == "decay_factor") t.decay_factor = parse_double(where, value);
    else if (key == "decay_interval") t.decay_interval = parse_int(where, value);
    else if (key == "lambda_ratio") t.lambda_ratio = parse_double(where, value);
    else if (key == "mask_on") t.mask_on = parse_bool(where, value);
    else fail(ErrorCode::BadConfig, "unknown key '" + where + "'");
    return;
  }
  if (section == "dataset") {
    if (key == "scene_count") cfg.scene_count = parse_int(where, value);
    else if (key == "eval_scene_count") cfg.eval_scene_count = parse_int(where, value);
    else if (key == "perturb_per_object") cfg.perturb_per_object = parse_int(where, value);
    else if (key == "depth_aligned_per_object") cfg.depth_aligned_per_object = parse_int(where, value);
    else if (key == "random_per_scene") cfg.random_per_scene = parse_int(where, value);
    else if (key == "center_sigma") cfg.perturb_center_sigma = parse_double(where, value);
    else fail(ErrorCode::BadConfig, "unknown key '" + where + "'");
    return;
  }
  if (section == "experiment") {
    if (key == "mask_variant") {
      if (value != "heavy" && value != "free" && value != "default")
        fail(ErrorCode::BadConfig, where + ": expected heavy, free, or default");
      cfg.mask_variant = value;
    } else if (key == "seeds") {
      cfg.experiment_seeds = parse_u64_list(where, value);
    } else {
      fail(ErrorCode::BadConfig, "unknown key '" + where + "'");
    }
    return;
  }
  if (section == "thresholds") {
    apply_threshold_key(cfg.thresholds, key, value);
    return;
  }
  fail(ErrorCode::BadConfig, "unknown section '[" + section + "]'");
}

}  // namespace

DatasetSpec RunConfig::dataset_spec(bool eval) const {
  DatasetSpec spec;
  spec.seed = eval ? seed + 70000 : seed;
  spec.scene_count = eval ? eval_scene_count : scene_count;
  spec.scene = scene;
  spec.perturb_per_object = perturb_per_object;
  spec.depth_aligned_per_object = depth_aligned_per_object;
  spec.random_per_scene = random_per_scene;
  spec.perturb.center_sigma = perturb_center_sigma;
  spec.thresholds = thresholds;
  spec.mask = mask;
  spec.bev = bev;
  return spec;
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(ErrorCode::BadConfig, "line " + std::to_string(line_no) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::BadConfig, "line " + std::to_string(line_no) + ": expected key = value");
    apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    fail(ErrorCode::BadConfig, "--set needs section.key=value, got '" + assignment + "'");
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  std::size_t dot = path.find('.');
  // thresholds.* keys keep their internal dots (class.view.field).
  if (dot != std::string::npos && path.substr(0, dot) == "thresholds")
    apply_key(cfg, "thresholds", path.substr(dot + 1), value);
  else if (dot == std::string::npos)
    apply_key(cfg, "", path, value);
  else
    apply_key(cfg, path.substr(0, dot), path.substr(dot + 1), value);
}

std::string config_text(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "seed = " << cfg.seed << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "\n[bev]\n";
  out << "resolution = " << cfg.bev.resolution << "\n";
  out << "x_min = " << cfg.bev.x_min << "\n";
  out << "x_max = " << cfg.bev.x_max << "\n";
  out << "y_min = " << cfg.bev.y_min << "\n";
  out << "y_max = " << cfg.bev.y_max << "\n";
  out << "height_min = " << cfg.bev.height_min << "\n";
  out << "height_max = " << cfg.bev.height_max << "\n";
  out << "num_slices = " << cfg.bev.num_slices << "\n";
  out << "\n[mask]\n";
  out << "crop_size = " << cfg.mask.crop_size << "\n";
  out << "upsample = " << cfg.mask.upsample << "\n";
  out << "span_margin = " << cfg.mask.span_margin << "\n";
  out << "zero_margin = " << cfg.mask.zero_margin << "\n";
  out << "\n[scene]\n";
  out << "object_count = " << cfg.scene.object_count << "\n";
  out << "clutter_count = " << cfg.scene.clutter_count << "\n";
  out << "clutter_aligned_fraction = " << cfg.scene.clutter_aligned_fraction << "\n";
  out << "clutter_class_colors = " << (cfg.scene.clutter_class_colors ? "true" : "false") << "\n";
  out << "image_width = " << cfg.scene.image_size.width << "\n";
  out << "image_height = " << cfg.scene.image_size.height << "\n";
  out << "focal = " << cfg.scene.focal << "\n";
  out << "sensor_height = " << cfg.scene.sensor_height << "\n";
  out << "min_range = " << cfg.scene.min_range << "\n";
  out << "max_range = " << cfg.scene.max_range << "\n";
  out << "lateral_fraction = " << cfg.scene.lateral_fraction << "\n";
  out << "lidar_rings = " << cfg.scene.lidar_rings << "\n";
  out << "lidar_elevation_min_deg = " << cfg.scene.lidar_elevation_min_deg << "\n";
  out << "lidar_elevation_max_deg = " << cfg.scene.lidar_elevation_max_deg << "\n";
  out << "lidar_azimuth_steps = " << cfg.scene.lidar_azimuth_steps << "\n";
  out << "lidar_azimuth_span_deg = " << cfg.scene.lidar_azimuth_span_deg << "\n";
  out << "brightness_min = " << cfg.scene.brightness_min << "\n";
  out << "brightness_max = " << cfg.scene.brightness_max << "\n";
  out << "pixel_noise = " << cfg.scene.pixel_noise << "\n";
  out << "max_placement_tries = " << cfg.scene.max_placement_tries << "\n";
  out << "\n[train]\n";
  out << "steps = " << cfg.train.steps << "\n";
  out << "batch_size = " << cfg.train.batch_size << "\n";
  out << "learning_rate = " << cfg.train.learning_rate << "\n";
  out << "decay_factor = " << cfg.train.decay_factor << "\n";
  out << "decay_interval = " << cfg.train.decay_interval << "\n";
  out << "lambda_ratio = " << cfg.train.lambda_ratio << "\n";
  out << "mask_on = " << (cfg.train.mask_on ? "true" : "false") << "\n";
  out << "\n[dataset]\n";
  out << "scene_count = " << cfg.scene_count << "\n";
  out << "eval_scene_count = " << cfg.eval_scene_count << "\n";
  out << "perturb_per_object = " << cfg.perturb_per_object << "\n";
  out << "depth_aligned_per_object = " << cfg.depth_aligned_per_object << "\n";
  out << "random_per_scene = " << cfg.random_per_scene << "\n";
  out << "center_sigma = " << cfg.perturb_center_sigma << "\n";
  out << "\n[experiment]\n";
  out << "mask_variant = " << cfg.mask_variant << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < cfg.experiment_seeds.size(); ++i)
    out << (i ? "," : "") << cfg.experiment_seeds[i];
  out << "\n";
  out << "\n[thresholds]\n";
  for (const auto& [name, cls] : cfg.thresholds) {
    out << name << ".bev.positive_min = " << cls.bev.positive_min << "\n";
    out << name << ".bev.negative_max = " << cls.bev.negative_max << "\n";
    out << name << ".image.positive_min = " << cls.image.positive_min << "\n";
    out << name << ".image.negative_max = " << cls.image.negative_max << "\n";
    out << name << ".negative_inclusive = " << (cls.negative_inclusive ? "true" : "false") << "\n";
  }
  return out.str();
}

bool seed_from_env(std::uint64_t& seed) {
  const char* raw = std::getenv("MLOD_SEED");
  if (raw == nullptr || *raw == '\0') return false;
  seed = parse_u64("MLOD_SEED", raw);
  return true;
}

}  // namespace mlod

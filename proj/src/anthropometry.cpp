#include "bodyfit/anthropometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "bodyfit/error.hpp"
#include "text_util.hpp"

namespace bodyfit {

namespace {

std::string_view kind_name(MeasureKind k) {
  switch (k) {
    case MeasureKind::kCircumference: return "circumference";
    case MeasureKind::kLength: return "length";
    default: return "height";
  }
}

MeasureKind parse_kind(const std::string& s) {
  if (s == "circumference") return MeasureKind::kCircumference;
  if (s == "length") return MeasureKind::kLength;
  if (s == "height") return MeasureKind::kHeight;
  throw InvalidArgument("unknown measurement kind '" + s + "'");
}

std::size_t landmarks_needed(MeasureKind k) {
  switch (k) {
    case MeasureKind::kCircumference: return 1;
    case MeasureKind::kLength: return 2;
    default: return 0;
  }
}

}  // namespace

MeasurementSpec MeasurementSpec::standard() {
  using K = MeasureKind;
  MeasurementSpec s;
  s.measures = {
      {'A', "Head circumference", K::kCircumference, {"head_front"}},
      {'B', "Neck circumference", K::kCircumference, {"neck_front"}},
      {'C', "Shoulder to crotch length", K::kLength, {"acromion_l", "crotch"}},
      {'D', "Chest circumference", K::kCircumference, {"chest_front"}},
      {'E', "Waist circumference", K::kCircumference, {"waist_front"}},
      {'F', "Pelvis circumference", K::kCircumference, {"pelvis_front"}},
      {'G', "Wrist circumference", K::kCircumference, {"wrist_l"}},
      {'H', "Bicep circumference", K::kCircumference, {"bicep_l"}},
      {'I', "Forearm circumference", K::kCircumference, {"forearm_l"}},
      {'J', "Arm length", K::kLength, {"acromion_l", "wrist_l"}},
      {'K', "Inside leg length", K::kLength, {"crotch", "ankle_medial_l"}},
      {'L', "Thigh circumference", K::kCircumference, {"thigh_l"}},
      {'M', "Calf circumference", K::kCircumference, {"calf_l"}},
      {'N', "Ankle circumference", K::kCircumference, {"ankle_l"}},
      {'O', "Overall height", K::kHeight, {}},
      {'P', "Shoulder breadth", K::kLength, {"acromion_l", "acromion_r"}},
  };
  return s;
}

void MeasurementSpec::validate() const {
  if (measures.size() != kMeasureCount) {
    throw InvalidArgument("measurement spec needs exactly 16 entries");
  }
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const MeasureDef& m = measures[i];
    if (m.id != static_cast<char>('A' + i)) {
      throw InvalidArgument("measurement ids must run A to P in order");
    }
    if (m.landmarks.size() != landmarks_needed(m.kind)) {
      throw InvalidArgument(std::string("measurement ") + m.id + " (" +
                            std::string(kind_name(m.kind)) +
                            ") has the wrong number of landmarks");
    }
  }
}

MeasurementSpec MeasurementSpec::from_json(std::istream& in) {
  MeasurementSpec spec;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    for (const auto& e : j.at("measures")) {
      MeasureDef m;
      const std::string id = e.at("id").get<std::string>();
      if (id.size() != 1) throw InvalidArgument("measurement id must be one letter");
      m.id = id[0];
      m.name = e.at("name").get<std::string>();
      m.kind = parse_kind(e.at("kind").get<std::string>());
      m.landmarks = e.value("landmarks", std::vector<std::string>{});
      spec.measures.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("measurement spec: ") + ex.what());
  }
  spec.validate();
  return spec;
}

MeasurementSpec MeasurementSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open measurement spec: " + path.string());
  return from_json(in);
}

void MeasurementSpec::write_json(std::ostream& out) const {
  nlohmann::json arr = nlohmann::json::array();
  for (const MeasureDef& m : measures) {
    arr.push_back({{"id", std::string(1, m.id)},
                   {"name", m.name},
                   {"kind", kind_name(m.kind)},
                   {"landmarks", m.landmarks}});
  }
  out << nlohmann::json{{"measures", arr}}.dump(2) << '\n';
}

namespace {

// Distance from p to the closed polygon through `loop`.
double polyline_distance(const std::vector<Vec3>& loop, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec3& a = loop[i];
    const Vec3& b = loop[(i + 1) % loop.size()];
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + t * ab - p).norm());
  }
  return best;
}

}  // namespace

Measurements measure(const Mesh& mesh, const LandmarkSet& landmarks,
                     const MeasurementSpec& spec, double reference_height) {
  spec.validate();
  auto point = [&](const std::string& name) -> const Vec3& {
    const auto it = landmarks.find(name);
    if (it == landmarks.end()) throw InvalidArgument("missing landmark '" + name + "'");
    if (it->second >= mesh.vertex_count()) {
      throw InvalidArgument("landmark '" + name + "' is out of range");
    }
    return mesh.vertices()[it->second];
  };

  const double height = mesh_height(mesh);
  Measurements out{};
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    const MeasureDef& m = spec.measures[i];
    switch (m.kind) {
      case MeasureKind::kHeight:
        out[i] = height;
        break;
      case MeasureKind::kLength:
        out[i] = (point(m.landmarks[0]) - point(m.landmarks[1])).norm();
        break;
      case MeasureKind::kCircumference: {
        const Vec3& p = point(m.landmarks[0]);
        const CrossSection cs = plane_cross_section(mesh, kUpAxis, p[static_cast<int>(kUpAxis)]);
        // Overlapping parts can give concentric loops; the one passing
        // through the landmark wins, centroid distance breaks near-ties.
        const std::vector<Vec3>* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        double best_c = best_d;
        const double tie = 1e-6 * std::max(height, 1.0);
        for (const auto& loop : cs.loops) {
          const double d = polyline_distance(loop, p);
          const double c = (loop_centroid(loop) - p).norm();
          if (d < best_d - tie || (d <= best_d + tie && c < best_c)) {
            best_d = std::min(d, best_d);
            best_c = c;
            best = &loop;
          }
        }
        if (!best) {
          throw InvalidArgument(std::string("no cross-section loop for measurement ") + m.id);
        }
        out[i] = loop_perimeter(*best);
        break;
      }
    }
  }
  if (reference_height > 0.0) {
    if (!(height > 0.0)) throw InvalidArgument("mesh has zero height");
    const double s = reference_height / height;
    for (double& v : out) v *= s;
  }
  return out;
}

Measurements measure_params(const StatModel& model, const ParamVector& params,
                            const MeasurementSpec& spec, double reference_height) {
  return measure(synthesize_shape(model, params), model.landmarks, spec,
                 reference_height);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

ErrorStats error_stats(std::span<const Measurements> truth,
                       std::span<const Measurements> estimate) {
  if (truth.size() != estimate.size()) {
    throw InvalidArgument("ground truth and estimates differ in length");
  }
  if (truth.empty()) throw InvalidArgument("no subjects to compare");
  ErrorStats s;
  s.subjects = truth.size();
  std::vector<double> col(truth.size());
  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    for (std::size_t i = 0; i < truth.size(); ++i) {
      col[i] = std::abs(estimate[i][m] - truth[i][m]);
    }
    s.per_measure[m] = mean_std(col);
  }
  std::vector<double> key;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t m : kKeyMeasures) key.push_back(std::abs(estimate[i][m] - truth[i][m]));
  }
  s.key_subset = mean_std(key);
  return s;
}

MeanStd aggregate_rows(std::span<const MeanStd> rows) {
  if (rows.empty()) throw InvalidArgument("no rows to aggregate");
  MeanStd a;
  for (const MeanStd& r : rows) {
    a.mean += r.mean;
    a.std += r.std;
  }
  a.mean /= static_cast<double>(rows.size());
  a.std /= static_cast<double>(rows.size());
  return a;
}

double subset_error(const Measurements& truth, const Measurements& estimate,
                    std::span<const std::size_t> indices) {
  if (indices.empty()) throw InvalidArgument("empty measure subset");
  double sum = 0.0;
  for (std::size_t m : indices) sum += std::abs(estimate.at(m) - truth.at(m));
  return sum / static_cast<double>(indices.size());
}

void write_stats_markdown(const ErrorStats& stats, const MeasurementSpec& spec,
                          std::ostream& out) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(2);
  out << "| Measure | Mean (mm) | Std (mm) |\n|---|---:|---:|\n";
  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    out << "| " << spec.measures[m].id << '.' << spec.measures[m].name << " | "
        << stats.per_measure[m].mean << " | " << stats.per_measure[m].std << " |\n";
  }
  out << "| Key subset (B,C,D,E,F,L,P) | " << stats.key_subset.mean << " | "
      << stats.key_subset.std << " |\n";
  out.flags(flags);
}

void write_stats_csv(const ErrorStats& stats, const MeasurementSpec& spec,
                     std::ostream& out) {
  using detail::format_double;
  out << "id,name,mean,std\n";
  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    out << spec.measures[m].id << ',' << spec.measures[m].name << ','
        << format_double(stats.per_measure[m].mean) << ','
        << format_double(stats.per_measure[m].std) << '\n';
  }
  out << "key,Key subset," << format_double(stats.key_subset.mean) << ','
      << format_double(stats.key_subset.std) << '\n';
}

}  // namespace bodyfit

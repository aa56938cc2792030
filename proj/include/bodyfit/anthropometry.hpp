#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bodyfit/mesh.hpp"
#include "bodyfit/shape_model.hpp"

namespace bodyfit {

inline constexpr std::size_t kMeasureCount = 16;
/// Neck, shoulder-to-crotch, chest, waist, pelvis, thigh, shoulder breadth.
inline constexpr std::array<std::size_t, 7> kKeyMeasures = {1, 2, 3, 4, 5, 11, 15};
/// Chest, waist and pelvis circumference.
inline constexpr std::array<std::size_t, 3> kTorsoMeasures = {3, 4, 5};
inline constexpr double kReferenceHeight = 1700.0;  // mm

enum class MeasureKind { kCircumference, kLength, kHeight };

struct MeasureDef {
  char id = 'A';
  std::string name;
  MeasureKind kind = MeasureKind::kLength;
  /// One landmark for a circumference (the slice passes through it), two
  /// for a length, none for the overall height.
  std::vector<std::string> landmarks;
};

struct MeasurementSpec {
  std::vector<MeasureDef> measures;

  /// The built-in A-P definitions for the synthetic template.
  static MeasurementSpec standard();
  /// {"measures": [{"id", "name", "kind", "landmarks"}, ...]}
  static MeasurementSpec from_json(std::istream& in);
  static MeasurementSpec load(const std::filesystem::path& path);
  void write_json(std::ostream& out) const;

  /// Exactly 16 entries labelled A-P in order, with the landmark count
  /// each kind needs. Throws InvalidArgument.
  void validate() const;
};

using Measurements = std::array<double, kMeasureCount>;

/// All 16 measurements in mesh units. Circumferences are the perimeter of
/// the horizontal cross-section loop passing closest to the landmark, with
/// centroid distance deciding between coincident loops; lengths are landmark distances; the height is the
/// vertical extent. With `reference_height` > 0 every value is rescaled so
/// the body is that tall.
Measurements measure(const Mesh& mesh, const LandmarkSet& landmarks,
                     const MeasurementSpec& spec, double reference_height = 0.0);

/// Shape-only body for the chromosome, measured at the reference height.
Measurements measure_params(const StatModel& model, const ParamVector& params,
                            const MeasurementSpec& spec,
                            double reference_height = kReferenceHeight);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

struct ErrorStats {
  std::size_t subjects = 0;
  std::array<MeanStd, kMeasureCount> per_measure{};
  /// Over every raw absolute error of the key measures.
  MeanStd key_subset;
};

/// Absolute per-measure errors. Throws InvalidArgument on length mismatch
/// or empty input.
ErrorStats error_stats(std::span<const Measurements> truth,
                       std::span<const Measurements> estimate);

/// Mean of the row means and mean of the row deviations, as a table's
/// summary line reports them.
MeanStd aggregate_rows(std::span<const MeanStd> rows);

/// Mean absolute error over the given measure indices for one subject.
double subset_error(const Measurements& truth, const Measurements& estimate,
                    std::span<const std::size_t> indices);

/// Markdown table: one row per measure plus the key-subset aggregate.
void write_stats_markdown(const ErrorStats& stats, const MeasurementSpec& spec,
                          std::ostream& out);
/// id,name,mean,std rows plus a "key" row.
void write_stats_csv(const ErrorStats& stats, const MeasurementSpec& spec,
                     std::ostream& out);

}  // namespace bodyfit

#pragma once

#include <array>
#include <iosfwd>

#include "bodyfit/body_part.hpp"
#include "bodyfit/registration.hpp"

namespace bodyfit {

/// Per-part coefficients plus extreme-point and view weights. Defaults are
/// the standard table: head 2, chest 5, waist 5, hip 5, leg 2, foot 1,
/// arm 3, elbow 2, hand 1, highest point 5, lowest point 5, front 2, side 3.
struct WeightConfig {
  std::array<double, kBodyPartCount> part{2, 5, 5, 5, 2, 1, 3, 2, 1};
  double top = 5.0;
  double bottom = 5.0;
  double front = 2.0;
  double side = 3.0;

  double part_weight(BodyPart p) const;
  /// Throws InvalidArgument on a negative or non-finite weight.
  void validate() const;

  static WeightConfig table() { return {}; }
  /// Every weight set to one.
  static WeightConfig uniform();

  friend bool operator==(const WeightConfig&, const WeightConfig&) = default;
};

struct ViewCost {
  double total = 0.0;
  /// (1/n) * sum of w * d over the pairs carrying each label.
  std::array<double, kBodyPartCount> part_terms{};
  double top_term = 0.0;
  double bottom_term = 0.0;
  std::size_t pairs = 0;
};

struct FitnessBreakdown {
  double f_front = 0.0;
  double f_side = 0.0;
  double f = 0.0;
  ViewCost front;
  ViewCost side;
};

/// (1/n) * sum_i d_i * w(label_i) + top_gap * w_top + bottom_gap * w_bottom,
/// with unsquared pair distances.
ViewCost view_cost_detailed(const CorrespondenceSet& corr,
                            const ExtremePair& extremes,
                            const WeightConfig& weights);
double view_cost(const CorrespondenceSet& corr, const ExtremePair& extremes,
                 const WeightConfig& weights);

/// w_front * f_front + w_side * f_side.
double total_cost(double f_front, double f_side, const WeightConfig& weights);

/// One JSON object on a single line.
void write_breakdown_json(const FitnessBreakdown& b, std::ostream& out);

}  // namespace bodyfit

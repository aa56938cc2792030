#include "bodyfit/objective.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "bodyfit/error.hpp"

namespace bodyfit {

double WeightConfig::part_weight(BodyPart p) const {
  const auto i = index_of(p);
  if (i >= kBodyPartCount) throw InvalidArgument("no weight for unknown body part");
  return part[i];
}

void WeightConfig::validate() const {
  auto check = [](double w, std::string_view name) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("weight '" + std::string(name) +
                            "' must be finite and non-negative");
    }
  };
  for (BodyPart p : kAllBodyParts) check(part[index_of(p)], to_string(p));
  check(top, "highest_point");
  check(bottom, "lowest_point");
  check(front, "front");
  check(side, "side");
}

WeightConfig WeightConfig::uniform() {
  WeightConfig w;
  w.part.fill(1.0);
  w.top = w.bottom = w.front = w.side = 1.0;
  return w;
}

ViewCost view_cost_detailed(const CorrespondenceSet& corr,
                            const ExtremePair& extremes,
                            const WeightConfig& weights) {
  if (corr.pairs.empty()) throw InvalidArgument("view cost needs at least one pair");
  ViewCost c;
  c.pairs = corr.pairs.size();
  const double inv_n = 1.0 / static_cast<double>(c.pairs);
  std::array<double, kBodyPartCount> sums{};
  for (const Correspondence& p : corr.pairs) {
    sums[index_of(p.label)] += p.distance * weights.part_weight(p.label);
  }
  double matched = 0.0;
  for (std::size_t i = 0; i < kBodyPartCount; ++i) {
    c.part_terms[i] = sums[i] * inv_n;
    matched += sums[i];
  }
  c.top_term = extremes.top_gap * weights.top;
  c.bottom_term = extremes.bottom_gap * weights.bottom;
  c.total = matched * inv_n + c.top_term + c.bottom_term;
  return c;
}

double view_cost(const CorrespondenceSet& corr, const ExtremePair& extremes,
                 const WeightConfig& weights) {
  return view_cost_detailed(corr, extremes, weights).total;
}

double total_cost(double f_front, double f_side, const WeightConfig& weights) {
  return weights.front * f_front + weights.side * f_side;
}

namespace {

nlohmann::json view_json(const ViewCost& v) {
  nlohmann::json parts = nlohmann::json::object();
  for (BodyPart p : kAllBodyParts) parts[std::string(to_string(p))] = v.part_terms[index_of(p)];
  return {{"cost", v.total}, {"pairs", v.pairs}, {"parts", parts},
          {"top", v.top_term}, {"bottom", v.bottom_term}};
}

}  // namespace

void write_breakdown_json(const FitnessBreakdown& b, std::ostream& out) {
  nlohmann::json j = {{"f", b.f}, {"f_front", b.f_front}, {"f_side", b.f_side}};
  if (std::isfinite(b.f)) {
    j["front"] = view_json(b.front);
    j["side"] = view_json(b.side);
  } else {
    j["f"] = nullptr;  // degenerate chromosome
  }
  out << j.dump() << '\n';
}

}  // namespace bodyfit

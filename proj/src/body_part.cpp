#include "bodyfit/body_part.hpp"

namespace bodyfit {

namespace {
constexpr std::array<std::string_view, kBodyPartCount> kNames = {
    "head", "chest", "waist", "hip", "leg", "foot", "arm", "elbow", "hand"};
}

std::string_view to_string(BodyPart part) { return kNames[index_of(part)]; }

std::optional<BodyPart> parse_body_part(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<BodyPart>(i);
  }
  return std::nullopt;
}

}  // namespace bodyfit

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace bodyfit {

/// The nine segmentation classes that carry matching weights.
enum class BodyPart : std::uint8_t {
  kHead = 0,
  kChest,
  kWaist,
  kHip,
  kLeg,
  kFoot,
  kArm,
  kElbow,
  kHand,
};

inline constexpr std::size_t kBodyPartCount = 9;

inline constexpr std::array<BodyPart, kBodyPartCount> kAllBodyParts = {
    BodyPart::kHead, BodyPart::kChest, BodyPart::kWaist,
    BodyPart::kHip,  BodyPart::kLeg,   BodyPart::kFoot,
    BodyPart::kArm,  BodyPart::kElbow, BodyPart::kHand};

std::string_view to_string(BodyPart part);
std::optional<BodyPart> parse_body_part(std::string_view name);

constexpr std::size_t index_of(BodyPart part) {
  return static_cast<std::size_t>(part);
}

constexpr bool is_valid_body_part(std::uint8_t raw) {
  return raw < kBodyPartCount;
}

}  // namespace bodyfit

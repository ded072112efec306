#pragma once

#include <optional>
#include <string>

#include "relgrow/timestamp.hpp"

namespace relgrow {

/// One observed crash.
struct FailureEvent {
  std::string app_id;
  std::optional<std::string> version;  // nullopt for `??? (???)`
  Timestamp timestamp;
  std::optional<int> crashed_thread;
  int severity = 1;

  friend bool operator==(const FailureEvent&, const FailureEvent&) = default;
};

/// Leading integer of a dotted version string ("2.7.0.181" -> 2).
std::optional<int> major_of(const std::optional<std::string>& version);

}  // namespace relgrow

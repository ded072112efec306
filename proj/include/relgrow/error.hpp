#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relgrow {

/// Failure categories raised across the toolkit. Every module throws
/// relgrow::Error carrying one of these, so callers (and the CLI report)
/// can record a fit failure by code instead of parsing messages.
enum class Errc {
  MissingField,
  BadTimestamp,
  Io,
  Schema,
  NegativeCount,
  EmptySeries,
  DegenerateSeries,
  Domain,
  Overflow,
  TooFewEvents,
  NoFiniteMle,
  TooFewBins,
  FitDiverged,
  AllZeroCounts,
  UndefinedTmax,
  LengthMismatch,
  Empty,
  ZeroActual,
  DegenerateVariance,
  InsufficientDof,
  MissingCriticalValue,
  InsufficientCells,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace relgrow

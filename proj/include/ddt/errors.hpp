#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddt {

enum class ErrorKind {
  Domain,
  DimensionMismatch,
  InvalidValue,
  Asymmetric,
  GroupSize,
  CovariateMismatch,
  DegenerateVariance,
  RankDeficient,
  InsufficientDf,
  NonpositiveMean,
  ZeroVariance,
  EmptyEnsemble,
  NoDwe,
  InvalidConfig,
  Io,
  Parse,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the toolkit. `stage` is filled
/// in by the pipeline drivers so diagnostics say where a run stopped.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message, std::string stage = {})
      : std::runtime_error(message), kind_(kind), stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const { return Error(kind_, what(), std::move(stage)); }

private:
  ErrorKind kind_;
  std::string stage_;
};

}  // namespace ddt

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frackbench {

/// Coarse error category, surfaced by the command line tool as a machine-parsable code.
enum class ErrorCode {
  config,
  geometry,
  mesh,
  scenario,
  solver,
  io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config: return "E_CONFIG";
    case ErrorCode::geometry: return "E_GEOMETRY";
    case ErrorCode::mesh: return "E_MESH";
    case ErrorCode::scenario: return "E_SCENARIO";
    case ErrorCode::solver: return "E_SOLVER";
    case ErrorCode::io: return "E_IO";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace frackbench

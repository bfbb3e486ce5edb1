#pragma once

#include <stdexcept>
#include <string>

namespace ada {

// Exit status categories used by the command-line tool.
enum class ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kSolver = 3 };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode code() const noexcept = 0;
};

// Malformed configuration or command-line usage.
class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kUsage; }
};

// Bad input data: parse failures, invariant violations, dimension mismatches.
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kData; }
};

// LP failure or double-oracle non-convergence.
class SolverError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kSolver; }
};

}  // namespace ada

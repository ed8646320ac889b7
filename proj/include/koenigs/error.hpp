#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace koenigs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression source. `offset` is the 0-based character position.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

/// Evaluation outside the region where an expression or operation is defined
/// (branch cuts, vanishing denominators, points outside the disk, overflow).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Parameter outside its admissible range.
class RangeError : public Error {
  public:
    using Error::Error;
};

/// An iteration did not reach its tolerance within the allowed depth.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, int depth, double final_gap)
        : Error(what + " (depth " + std::to_string(depth) + ", final gap " +
                std::to_string(final_gap) + ")"),
          depth_(depth), final_gap_(final_gap) {}

    int depth() const noexcept { return depth_; }
    double final_gap() const noexcept { return final_gap_; }

  private:
    int depth_;
    double final_gap_;
};

/// A grid sweep could not evaluate enough points to produce an estimate.
class CoverageError : public Error {
  public:
    CoverageError(const std::string& what, double coverage)
        : Error(what + " (coverage " + std::to_string(coverage) + ")"), coverage_(coverage) {}

    double coverage() const noexcept { return coverage_; }

  private:
    double coverage_;
};

/// Invalid experiment configuration or command-line usage.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace koenigs

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace casper {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An instruction field is outside its encodable range.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// A kernel needs more streams, constants or instructions than the SPU buffers hold.
class ProgramTooLarge : public Error {
 public:
  using Error::Error;
};

/// Grid extents are incompatible with the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Placement does not fit inside the stencil segment.
class SegmentOverflow : public Error {
 public:
  using Error::Error;
};

/// An access touched an address outside the simulated physical space.
class AddressFault : public Error {
 public:
  AddressFault(const std::string& what, std::uint64_t addr) : Error(what), addr_(addr) {}
  std::uint64_t address() const noexcept { return addr_; }

 private:
  std::uint64_t addr_;
};

/// API misuse or an invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Simulation stopped making progress.
class DeadlockError : public Error {
 public:
  using Error::Error;
};

/// A simulated result differs from the golden executor.
class FunctionalMismatch : public Error {
 public:
  FunctionalMismatch(const std::string& what, std::size_t index, double expected, double actual)
      : Error(what), index_(index), expected_(expected), actual_(actual) {}
  std::size_t index() const noexcept { return index_; }
  double expected() const noexcept { return expected_; }
  double actual() const noexcept { return actual_; }

 private:
  std::size_t index_;
  double expected_;
  double actual_;
};

}  // namespace casper

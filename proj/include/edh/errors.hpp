#pragma once

#include <stdexcept>
#include <string>

namespace edh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define EDH_DEFINE_ERROR(Name)              \
  class Name : public Error                 \
  {                                         \
  public:                                   \
    using Error::Error;                     \
  }

EDH_DEFINE_ERROR(FileNotFound);
EDH_DEFINE_ERROR(IoError);
EDH_DEFINE_ERROR(InvalidParams);
EDH_DEFINE_ERROR(DistanceExceedsRange);
EDH_DEFINE_ERROR(ZeroBackground);
EDH_DEFINE_ERROR(TooFewPhotons);
EDH_DEFINE_ERROR(QNotPowerOfTwo);
EDH_DEFINE_ERROR(InvalidBinCount);
EDH_DEFINE_ERROR(EmptyHistogram);
EDH_DEFINE_ERROR(OutOfRange);
EDH_DEFINE_ERROR(ShapeMismatch);
EDH_DEFINE_ERROR(QMismatch);
EDH_DEFINE_ERROR(InvalidSweepValue);

#undef EDH_DEFINE_ERROR

/// Malformed input file. Carries the 1-based line (text formats) or byte
/// offset (binary formats) where parsing stopped.
class ParseError : public Error
{
public:
  ParseError(const std::string& what, std::size_t location)
    : Error(what + " (at " + std::to_string(location) + ")"), location_(location)
  {}
  std::size_t location() const noexcept { return location_; }

private:
  std::size_t location_;
};

class DepthOutOfRange : public Error
{
public:
  DepthOutOfRange(double value, double limit)
    : Error("depth " + std::to_string(value) + " outside (0, " +
            std::to_string(limit) + "]"),
      value_(value), limit_(limit)
  {}
  double value() const noexcept { return value_; }
  double limit() const noexcept { return limit_; }

private:
  double value_;
  double limit_;
};

}  // namespace edh

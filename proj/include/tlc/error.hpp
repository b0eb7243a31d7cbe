#pragma once

#include <stdexcept>
#include <string>

namespace tlc {

// Every library error derives from tlc::Error so callers can catch the family
// and the CLI can map each kind to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed the configured cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

// A row is not the difference of any two tabulated loss rows.
class NotRepresentable : public Error {
 public:
  using Error::Error;
};

class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidKernel : public Error {
 public:
  using Error::Error;
};

class NotSubRoot : public Error {
 public:
  using Error::Error;
};

class InvalidClass : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message carries the source name and line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tlc

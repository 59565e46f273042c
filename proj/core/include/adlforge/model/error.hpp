#pragma once

#include <stdexcept>
#include <string>

namespace adlforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent manifest / sidecar content.
class ManifestError : public Error {
 public:
  using Error::Error;
};

/// A violated precondition on an operation's inputs.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant does not hold on data produced or consumed.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Model output that could not be turned into the requested structure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

/// Parsed successfully but with the wrong number of items.
class ArityError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Media could not be decoded or encoded.
class MediaError : public Error {
 public:
  using Error::Error;
};

}  // namespace adlforge

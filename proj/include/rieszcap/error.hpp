#pragma once

#include <stdexcept>
#include <string>

namespace rieszcap {

enum class ErrorCode {
  Domain = 1,
  Argument,
  Size,
  Parse,
  Io,
  UnsupportedExponent,
  EmptyRestriction,
  ToleranceNotMet,
};

/// Base exception for every library failure. The code maps one-to-one onto
/// the status values of the C interface.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorCode::Argument, what) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(ErrorCode::Size, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class UnsupportedExponentError : public Error {
 public:
  explicit UnsupportedExponentError(const std::string& what)
      : Error(ErrorCode::UnsupportedExponent, what) {}
};

class EmptyRestrictionError : public Error {
 public:
  explicit EmptyRestrictionError(const std::string& what)
      : Error(ErrorCode::EmptyRestriction, what) {}
};

class ToleranceNotMetError : public Error {
 public:
  explicit ToleranceNotMetError(const std::string& what)
      : Error(ErrorCode::ToleranceNotMet, what) {}
};

}  // namespace rieszcap

// Copyright 2026 Weft Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace weft {

/// Base class for all framework errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A name was registered twice (token type, definition).
class DuplicateNameError : public Error {
 public:
  using Error::Error;
};

/// flatten/spawn was attempted on a graph that does not validate.
class NotValidatedError : public Error {
 public:
  using Error::Error;
};

/// A token's payload does not fit the channel's declared bit width.
class TypeMismatchError : public Error {
 public:
  using Error::Error;
};

/// A benchmark builder was asked for an unsupported size.
class BadSizeError : public Error {
 public:
  using Error::Error;
};

/// No benchmark registered under the requested name.
class UnknownBenchError : public Error {
 public:
  using Error::Error;
};

/// assemble() was given no unit for an instantiated definition.
class MissingUnitError : public Error {
 public:
  using Error::Error;
};

/// A unit port width disagrees with the FIFO it is wired to.
class WidthMismatchError : public Error {
 public:
  using Error::Error;
};

/// A synthesis backend invocation failed.
class BackendFailureError : public Error {
 public:
  using Error::Error;
};

/// Filesystem trouble while emitting or reading a package.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A leaf behavior raised an exception; carries the instance path.
class BehaviorPanic : public Error {
 public:
  BehaviorPanic(std::string instance, const std::string& what)
      : Error("behavior panic in " + instance + ": " + what),
        instance_(std::move(instance)) {}

  const std::string& instance() const { return instance_; }

 private:
  std::string instance_;
};

}  // namespace weft

// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_ERROR_H_
#define RECSHARD_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace recshard {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range configuration: bad JSON, unknown preset names,
// violated type invariants, zero bandwidths.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A cluster topology that cannot host the requested placement.
class InvalidTopologyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A capacity constraint cannot be met. `needed` and `available` are in bytes.
class InfeasibleError : public Error {
 public:
  InfeasibleError(uint64_t needed, uint64_t available, const std::string& what)
      : Error(what + " (needed " + std::to_string(needed) +
              " bytes, available " + std::to_string(available) + " bytes)"),
        needed_(needed),
        available_(available) {}

  uint64_t needed() const { return needed_; }
  uint64_t available() const { return available_; }

 private:
  uint64_t needed_;
  uint64_t available_;
};

// An integer size computation left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// An exhaustive search was asked to handle more than it supports.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

}  // namespace recshard

#endif  // RECSHARD_ERROR_H_

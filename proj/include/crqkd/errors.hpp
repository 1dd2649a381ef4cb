#pragma once

#include <stdexcept>
#include <string>

namespace crqkd {

// Precondition violations use std::invalid_argument directly. The types
// below name the protocol-level failure conditions callers may recover from.

class InsufficientMaterial : public std::runtime_error {
 public:
  explicit InsufficientMaterial(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientEntropy : public std::runtime_error {
 public:
  explicit InsufficientEntropy(const std::string& what) : std::runtime_error(what) {}
};

class CorruptFrame : public std::runtime_error {
 public:
  explicit CorruptFrame(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedVersion : public std::runtime_error {
 public:
  explicit UnsupportedVersion(const std::string& what) : std::runtime_error(what) {}
};

class OtpReuse : public std::logic_error {
 public:
  explicit OtpReuse(const std::string& what) : std::logic_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crqkd

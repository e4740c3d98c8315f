#pragma once

#include <stdexcept>
#include <string>

namespace hdbench {

// Malformed or inconsistent input data (files, frames, datasets).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or API misuse by the caller.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Wire-level violations and network failures in the distributed harness.
class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

}  // namespace hdbench

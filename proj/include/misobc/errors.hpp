#pragma once

#include <stdexcept>
#include <string>

namespace misobc {

// malformed serialized data (bit strings, config files, CSV inputs)
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// filesystem / stream failures
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace misobc

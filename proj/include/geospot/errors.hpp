#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace geospot {

enum class ErrorKind {
  Parse,              // malformed input file
  Validation,         // structurally valid input violating a constraint
  MissingRate,        // price book has no rate for the requested key
  MissingLink,        // network matrix has no entry for the requested pair
  Domain,             // argument outside the defined domain of an operation
  UnderdeterminedFit, // calibration has fewer observations than free parameters
  SpaceTooLarge,      // search space exceeds the enumeration cap
};

/* All failures carry a kind plus the offending key (field name, site id,
   link pair, ...) so callers can report exactly what was wrong. */
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string key, const std::string& message)
      : std::runtime_error(message + " [" + key + "]"),
        kind_(kind),
        key_(std::move(key)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& key() const noexcept { return key_; }

 private:
  ErrorKind kind_;
  std::string key_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& key,
                               const std::string& message) {
  throw Error(kind, key, message);
}

}  // namespace geospot

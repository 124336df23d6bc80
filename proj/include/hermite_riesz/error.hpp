#pragma once

#include <stdexcept>
#include <string>

namespace hermite_riesz {

class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// A computation refused to return a number it cannot vouch for.
class NumericalError : public Error
{
 public:
  using Error::Error;
};

/// Bad caller input: invalid parameters, malformed files, unknown keys.
class ConfigError : public Error
{
 public:
  using Error::Error;
};

}  // namespace hermite_riesz

#pragma once

#include <stdexcept>
#include <string>

namespace icbf {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class IntegrationDiverged : public Error {
 public:
  using Error::Error;
};

// Two agent centers closer than 1e-9 m; direction-dependent geometry is undefined there.
class CoincidentCenters : public Error {
 public:
  using Error::Error;
};

class Uncontrollable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class QpInfeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace icbf

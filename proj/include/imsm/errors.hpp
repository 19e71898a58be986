#pragma once

#include <stdexcept>
#include <string>

namespace imsm {

// Every failure raised by the library derives from Error; the CLI maps the
// concrete type onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedKindError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, double requested, double cap)
      : Error(what), requested_(requested), cap_(cap) {}
  double requested() const { return requested_; }
  double cap() const { return cap_; }

 private:
  double requested_;
  double cap_;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved_tolerance)
      : Error(what), achieved_(achieved_tolerance) {}
  double achieved_tolerance() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace imsm

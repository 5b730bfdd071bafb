#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksym {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// expression language

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected,
              const std::string& found);
  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::string name, std::size_t position);
  const std::string& name() const { return name_; }
  std::size_t position() const { return position_; }

 private:
  std::string name_;
  std::size_t position_;
};

class BadExponent : public Error {
 public:
  BadExponent(std::string token, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Division by zero, log/sqrt of a nonpositive argument and the like.
/// Carries the offending subexpression in text form.
class EvalError : public Error {
 public:
  EvalError(const std::string& what, std::string subexpression);
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

// geometry

#define KSYM_SIMPLE_ERROR(Name)  \
  class Name : public Error {    \
   public:                       \
    using Error::Error;          \
  };

KSYM_SIMPLE_ERROR(IndexOutOfRange)
KSYM_SIMPLE_ERROR(DimensionMismatch)
KSYM_SIMPLE_ERROR(CompatibilityError)
KSYM_SIMPLE_ERROR(SingularSystem)
KSYM_SIMPLE_ERROR(OrthogonalityError)
KSYM_SIMPLE_ERROR(SingularMetric)
KSYM_SIMPLE_ERROR(NotSPD)
KSYM_SIMPLE_ERROR(PropertyViolation)
KSYM_SIMPLE_ERROR(NotGeodesic)
KSYM_SIMPLE_ERROR(NotVertical)
KSYM_SIMPLE_ERROR(NotHorizontal)
KSYM_SIMPLE_ERROR(IncompleteLeaf)
KSYM_SIMPLE_ERROR(NotFlat)
KSYM_SIMPLE_ERROR(PathDependence)
KSYM_SIMPLE_ERROR(NewtonDivergence)
KSYM_SIMPLE_ERROR(StructureViolation)
KSYM_SIMPLE_ERROR(DegreeOverflow)

// spec files

KSYM_SIMPLE_ERROR(IoError)
KSYM_SIMPLE_ERROR(SpecError)

#undef KSYM_SIMPLE_ERROR

class JsonError : public Error {
 public:
  JsonError(const std::string& what, std::size_t byte_position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ksym

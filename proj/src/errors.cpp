#include "ksym/errors.hpp"

namespace ksym {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t position, std::vector<std::string> expected,
                         const std::string& found)
    : Error("syntax error at position " + std::to_string(position) +
            ": expected " + join_expected(expected) + ", found " + found),
      position_(position),
      expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(std::string name, std::size_t position)
    : Error("unknown identifier '" + name + "' at position " +
            std::to_string(position)),
      name_(std::move(name)),
      position_(position) {}

BadExponent::BadExponent(std::string token, std::size_t position)
    : Error("exponent must be an integer literal, found '" + token +
            "' at position " + std::to_string(position)),
      position_(position) {}

EvalError::EvalError(const std::string& what, std::string subexpression)
    : Error(what + " in '" + subexpression + "'"),
      subexpression_(std::move(subexpression)) {}

JsonError::JsonError(const std::string& what, std::size_t byte_position)
    : Error(what), position_(byte_position) {}

}  // namespace ksym

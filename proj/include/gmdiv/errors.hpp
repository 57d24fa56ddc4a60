#pragma once

#include <stdexcept>
#include <string>

namespace gmdiv {

// Malformed input: wrong dimension, bad weights, unknown names.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A parameter lies outside the hypothesis of the formula being evaluated.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// The request is well formed but cannot be served with a certificate,
// e.g. an unconstrained mixture class has no certifiable tail.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gmdiv

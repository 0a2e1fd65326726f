#pragma once

#include <stdexcept>
#include <string>

namespace hiercache {

// Argument outside its mathematical domain (e.g. a cache fraction not in [0,1]).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by operations that are only defined for two caching relays.
class NotTwoRelayError : public std::invalid_argument {
 public:
  explicit NotTwoRelayError(const std::string& what) : std::invalid_argument(what) {}
};

// Distinct-file worst case requested on a network with fewer files than users.
class WorstCaseInfeasibleError : public std::invalid_argument {
 public:
  explicit WorstCaseInfeasibleError(const std::string& what) : std::invalid_argument(what) {}
};

// Demand or schedule refers to content the placement does not hold.
class InconsistentPlacementError : public std::logic_error {
 public:
  explicit InconsistentPlacementError(const std::string& what) : std::logic_error(what) {}
};

// A schedule symbol depends on a symbol emitted after it.
class CyclicDependencyError : public std::logic_error {
 public:
  explicit CyclicDependencyError(const std::string& what) : std::logic_error(what) {}
};

// Malformed config file or CLI input.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hiercache

#ifndef SPECBOUND_ERRORS_HPP
#define SPECBOUND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specbound {

/// Invalid input: bad domain, out-of-range parameter, point off the domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested operation is not available for this domain or representation.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A numerical procedure failed (degenerate element, factorization, no convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specbound

#endif  // SPECBOUND_ERRORS_HPP

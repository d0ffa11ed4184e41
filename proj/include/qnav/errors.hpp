#pragma once

#include <stdexcept>

namespace qnav {

/// A geometric configuration for which frames are undefined (coincident or
/// antipodal agents).
class DegenerateConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A floating-point excursion larger than the documented slack; indicates a
/// bug rather than a user error.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qnav

#pragma once

#include <stdexcept>
#include <string>

namespace polykron {

// Construction / validation failures.
struct EmptySpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAMatchingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A crossing that cannot be classified at tolerance, e.g. an axis-parallel
// geodesic running exactly along an edge through a vertex.
struct NumericalDegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroMeasureSetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HeightTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CertificationFailedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResolutionTooCoarseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A start point whose orbit hits a cone point after finitely many steps.
struct PathologicalStartError : std::runtime_error {
  PathologicalStartError(const std::string& what, long index, double time)
      : std::runtime_error(what), index(index), time(time) {}
  long index;
  double time;
};

// Invalid experiment configuration; carries the offending field name.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, std::string field_name = {})
      : std::runtime_error(what), field(std::move(field_name)) {}
  std::string field;
};

}  // namespace polykron

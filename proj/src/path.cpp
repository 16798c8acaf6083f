#include "metricspace/path.hpp"

#include <string>

namespace metricspace {

void PathPolyline::validate() const {
  if (times.size() != fields.size()) throw InputError("path: times and fields differ in length");
  if (!velocities.empty() && velocities.size() != fields.size()) {
    throw InputError("path: velocities and fields differ in length");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InputError("path: times not strictly increasing at sample " + std::to_string(i));
    }
    require_same_manifold(fields[0].manifold(), fields[i].manifold(), "path");
  }
}

}  // namespace metricspace

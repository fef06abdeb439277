#include "inewton/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace inewton {

TraceCheck check_multiplicative_identity(const std::vector<IterationRecord>& trace, double p0,
                                         double gamma, bool grow_on_accept, double floor) {
  TraceCheck out;
  std::ostringstream os;
  os.precision(17);
  double replay = p0;
  long long exponent = 0;
  bool floor_hit = false;
  for (const IterationRecord& r : trace) {
    ++out.checked;
    if (r.radius_or_sigma != replay) {
      os << "t=" << r.t << ": recorded " << r.radius_or_sigma << " but replay gives " << replay;
      out.ok = false;
      break;
    }
    const double closed = p0 * std::pow(gamma, static_cast<double>(exponent));
    if (!floor_hit && std::abs(closed - replay) > 1e-12 * std::abs(closed)) {
      os << "t=" << r.t << ": closed form " << closed << " differs from " << replay;
      out.ok = false;
      break;
    }
    if (r.terminal) break;
    const bool grow = grow_on_accept == r.accepted;
    if (grow) {
      replay *= gamma;
      ++exponent;
    } else {
      const double next = replay / gamma;
      if (next < floor) floor_hit = true;
      replay = std::max(next, floor);
      --exponent;
    }
  }
  out.detail = os.str();
  return out;
}

TraceCheck check_sufficient_decrease(const std::vector<IterationRecord>& trace, double eta) {
  TraceCheck out;
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const IterationRecord& r = trace[k];
    if (!r.accepted) continue;
    ++out.checked;
    const double decrease = r.F_value - trace[k + 1].F_value;
    if (!(decrease >= eta * r.model_decrease) || !(decrease > 0.0)) {
      os << "t=" << r.t << ": decrease " << decrease << " < eta*(-m) = " << eta * r.model_decrease;
      out.ok = false;
      break;
    }
  }
  out.detail = os.str();
  return out;
}

}  // namespace inewton

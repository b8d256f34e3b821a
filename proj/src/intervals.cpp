#include "wavebound/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wavebound/errors.hpp"

namespace wavebound {

IntervalUnion::IntervalUnion(std::vector<std::pair<double, double>> parts) {
  for (const auto& [lo, hi] : parts) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw ValidationError("interval endpoints must satisfy lo <= hi");
  }
  std::sort(parts.begin(), parts.end());
  for (const auto& p : parts) {
    if (!parts_.empty() && p.first <= parts_.back().second)
      parts_.back().second = std::max(parts_.back().second, p.second);
    else
      parts_.push_back(p);
  }
}

IntervalUnion IntervalUnion::real_line() {
  const double inf = std::numeric_limits<double>::infinity();
  return IntervalUnion({{-inf, inf}});
}

IntervalUnion IntervalUnion::interval(double lo, double hi) { return IntervalUnion({{lo, hi}}); }

bool IntervalUnion::contains(double x) const {
  for (const auto& [lo, hi] : parts_)
    if (x >= lo && x <= hi) return true;
  return false;
}

std::string IntervalUnion::describe() const {
  if (parts_.empty()) return "{}";
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) os << " U ";
    os << "[" << parts_[i].first << ", " << parts_[i].second << "]";
  }
  return os.str();
}

}  // namespace wavebound

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wavebound {

// Finite union of closed intervals on the real line.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<std::pair<double, double>> parts);
  static IntervalUnion empty() { return {}; }
  static IntervalUnion real_line();
  static IntervalUnion interval(double lo, double hi);

  bool contains(double x) const;
  bool is_empty() const { return parts_.empty(); }
  const std::vector<std::pair<double, double>>& parts() const { return parts_; }
  std::string describe() const;

 private:
  std::vector<std::pair<double, double>> parts_;
};

}  // namespace wavebound

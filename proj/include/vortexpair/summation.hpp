#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace vortexpair {

// Neumaier-compensated accumulator. Order of add() calls is part of the result.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double ordered_sum(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// Sum that depends only on the multiset of inputs: any permutation gives the same bits.
inline double multiset_sum(std::span<const double> xs) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  return ordered_sum(sorted);
}

}  // namespace vortexpair

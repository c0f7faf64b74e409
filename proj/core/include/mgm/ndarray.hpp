#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mgm {

/// Dense row-major array of doubles of arbitrary rank. Used for interaction
/// parameter arrays, whose rank is the order of the interaction.
class NdArray {
 public:
  NdArray() = default;
  explicit NdArray(std::vector<int> shape, double fill = 0.0);
  NdArray(std::vector<int> shape, std::vector<double> values);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  std::size_t offset(std::span<const int> index) const;
  double& at(std::span<const int> index) { return values_[offset(index)]; }
  double at(std::span<const int> index) const { return values_[offset(index)]; }
  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }

  std::vector<int> unravel(std::size_t flat) const;
  double mean_abs() const;
  bool all_zero() const;

  friend bool operator==(const NdArray&, const NdArray&) = default;

 private:
  std::vector<int> shape_;
  std::vector<double> values_;
};

std::size_t shape_size(std::span<const int> shape);

/// Calls fn(index) for every multi-index of `shape` in row-major order.
void for_each_index(std::span<const int> shape,
                    const std::function<void(std::span<const int>)>& fn);

}  // namespace mgm

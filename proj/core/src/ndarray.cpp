#include "mgm/ndarray.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mgm {

std::size_t shape_size(std::span<const int> shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("negative array extent");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

NdArray::NdArray(std::vector<int> shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

NdArray::NdArray(std::vector<int> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_size(shape_)) {
    throw std::invalid_argument("array of " + std::to_string(values_.size()) +
                                " values does not match its shape");
  }
}

std::size_t NdArray::offset(std::span<const int> index) const {
  if (index.size() != shape_.size()) throw std::out_of_range("array rank mismatch");
  std::size_t flat = 0;
  for (std::size_t d = 0; d < shape_.size(); ++d) {
    if (index[d] < 0 || index[d] >= shape_[d]) throw std::out_of_range("array index out of range");
    flat = flat * static_cast<std::size_t>(shape_[d]) + static_cast<std::size_t>(index[d]);
  }
  return flat;
}

std::vector<int> NdArray::unravel(std::size_t flat) const {
  std::vector<int> index(shape_.size());
  for (std::size_t d = shape_.size(); d-- > 0;) {
    index[d] = static_cast<int>(flat % static_cast<std::size_t>(shape_[d]));
    flat /= static_cast<std::size_t>(shape_[d]);
  }
  return index;
}

double NdArray::mean_abs() const {
  if (values_.empty()) return 0.0;
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s / static_cast<double>(values_.size());
}

bool NdArray::all_zero() const {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

void for_each_index(std::span<const int> shape,
                    const std::function<void(std::span<const int>)>& fn) {
  const std::size_t total = shape_size(shape);
  std::vector<int> index(shape.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(index);
    for (std::size_t d = shape.size(); d-- > 0;) {
      if (++index[d] < shape[d]) break;
      index[d] = 0;
    }
  }
}

}  // namespace mgm

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lanet/num/ops.hpp"
#include "lanet/num/tensor.hpp"

namespace lanet::num {

/// Ordered, uniquely named collection of trainable tensors.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
  };

  /// Registers `t` (marked as requiring grad) and returns the shared handle.
  Tensor add(std::string name, Tensor t);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

 private:
  std::vector<Entry> entries_;
};

/// Samples from N(0, 1).
Tensor normal_init(std::size_t rows, std::size_t cols, Rng& rng);
/// Samples from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Tensor fan_in_uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng);

}  // namespace lanet::num

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lanet/num/params.hpp"

namespace lanet::num {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

/// One bias-corrected Adam update of `param` in place.
void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& state,
               const AdamHyper& hyper);

/// Adam over every tensor of a ParamSet. Tensors without a grad buffer are
/// treated as having zero gradient.
class Adam {
 public:
  Adam(ParamSet& params, AdamHyper hyper);

  void step();
  void zero_grad() { params_->zero_grad(); }

  double lr() const { return hyper_.lr; }
  void set_lr(double lr) { hyper_.lr = lr; }
  const std::vector<AdamMoments>& state() const { return state_; }

 private:
  ParamSet* params_;
  AdamHyper hyper_;
  std::vector<AdamMoments> state_;
};

}  // namespace lanet::num

#include "lanet/num/optim.hpp"

#include <cmath>

namespace lanet::num {

void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& state,
               const AdamHyper& hyper) {
  if (grad.size() != param.size()) {
    throw DimensionError("adam_step: " + std::to_string(param.size()) + " params vs " +
                         std::to_string(grad.size()) + " grads");
  }
  if (state.m.size() != param.size()) {
    state.m.assign(param.size(), 0.0);
    state.v.assign(param.size(), 0.0);
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * grad[i];
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    param[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
}

Adam::Adam(ParamSet& params, AdamHyper hyper)
    : params_(&params), hyper_(hyper), state_(params.size()) {}

void Adam::step() {
  auto& entries = params_->entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor& t = entries[i].tensor;
    if (!t.has_grad()) t.zero_grad();
    adam_step(t.mutable_data(), t.grad(), state_[i], hyper_);
  }
}

}  // namespace lanet::num

#include "lanet/num/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lanet::num {

using detail::make_result;
using detail::Node;

namespace {

// Grad buffer of parent `i`, or nullptr when it does not need one.
double* parent_grad(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  if (!p.requires_grad) return nullptr;
  p.ensure_grad();
  return p.grad.data();
}

const std::vector<double>& parent_data(Node& self, std::size_t i) {
  return self.parents[i]->data;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()) + " differ");
  }
}

template <class Fwd, class Deriv>
Tensor unary(const Tensor& a, Fwd fwd, Deriv deriv) {
  std::vector<double> out(a.size());
  auto in = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(in[i]);
  return make_result(a.shape(), std::move(out), {a}, [deriv](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const auto& x = parent_data(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ga[i] += self.grad[i] * deriv(x[i], self.data[i]);
    }
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner dimensions differ for " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      if (av == 0.0) continue;
      const double* brow = B.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  return make_result({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    const auto& A = parent_data(self, 0);
    const auto& B = parent_data(self, 1);
    const double* G = self.grad.data();
    if (double* ga = parent_grad(self, 0)) {
      // dA = dC * B^T
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = B.data() + p * n;
          const double* grow = G + i * n;
          // split accumulators so the reduction vectorizes
          double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
          std::size_t j = 0;
          for (; j + 4 <= n; j += 4) {
            s0 += grow[j] * brow[j];
            s1 += grow[j + 1] * brow[j + 1];
            s2 += grow[j + 2] * brow[j + 2];
            s3 += grow[j + 3] * brow[j + 3];
          }
          for (; j < n; ++j) s0 += grow[j] * brow[j];
          ga[i * k + p] += (s0 + s1) + (s2 + s3);
        }
      }
    }
    if (double* gb = parent_grad(self, 1)) {
      // dB = A^T * dC
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A[i * k + p];
          if (av == 0.0) continue;
          double* gbrow = gb + p * n;
          const double* grow = G + i * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
        }
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  auto A = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = A[i * n + j];
  return make_result({n, m}, std::move(out), {a}, [m, n](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += self.grad[j * m + i];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (numel(shape) != a.size()) {
    throw DimensionError("reshape: " + shape_str(a.shape()) + " to " + shape_str(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return make_result(std::move(shape), std::move(out), {a}, [](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (double* g = parent_grad(self, p))
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    if (double* g = parent_grad(self, 1))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& A = parent_data(self, 0);
    const auto& B = parent_data(self, 1);
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * B[i];
    if (double* g = parent_grad(self, 1))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * A[i];
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * factor;
  return make_result(a.shape(), std::move(out), {a}, [factor](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

Tensor scale_by(const Tensor& a, const Tensor& s) {
  if (s.size() != 1) throw DimensionError("scale_by: factor shape " + shape_str(s.shape()));
  const double f = s.data()[0];
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * f;
  return make_result(a.shape(), std::move(out), {a, s}, [](Node& self) {
    const auto& A = parent_data(self, 0);
    const double f = parent_data(self, 1)[0];
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * f;
    if (double* g = parent_grad(self, 1)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i] * A[i];
      g[0] += acc;
    }
  });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  const std::size_t m = a.rows(), n = a.cols();
  if (row.size() != n) {
    throw DimensionError("add_row: " + shape_str(a.shape()) + " + " + shape_str(row.shape()));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  auto R = row.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += R[j];
  return make_result(a.shape(), std::move(out), {a, row}, [m, n](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    if (double* g = parent_grad(self, 1))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
  });
}

Tensor mul_row(const Tensor& a, const Tensor& row) {
  const std::size_t m = a.rows(), n = a.cols();
  if (row.size() != n) {
    throw DimensionError("mul_row: " + shape_str(a.shape()) + " * " + shape_str(row.shape()));
  }
  std::vector<double> out(a.size());
  auto A = a.data();
  auto R = row.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = A[i * n + j] * R[j];
  return make_result(a.shape(), std::move(out), {a, row}, [m, n](Node& self) {
    const auto& A = parent_data(self, 0);
    const auto& R = parent_data(self, 1);
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[i * n + j] * R[j];
    if (double* g = parent_grad(self, 1))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j] * A[i * n + j];
  });
}

Tensor broadcast_rows(const Tensor& row, std::size_t count) {
  const std::size_t n = row.size();
  std::vector<double> out(count * n);
  for (std::size_t i = 0; i < count; ++i)
    std::copy(row.data().begin(), row.data().end(), out.begin() + static_cast<long>(i * n));
  return make_result({count, n}, std::move(out), {row}, [count, n](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
  });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor softmax_rows(const Tensor& x) {
  const std::size_t m = x.rows(), n = x.cols();
  auto X = x.data();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = X.data() + i * n;
    double mx = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(row[j])) throw NumericError("softmax_rows: non-finite input");
      mx = std::max(mx, row[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = std::exp(row[j] - mx);
      total += out[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= total;
  }
  return make_result(x.shape(), std::move(out), {x}, [m, n](Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    for (std::size_t i = 0; i < m; ++i) {
      const double* y = self.data.data() + i * n;
      const double* dy = self.grad.data() + i * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += dy[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += y[j] * (dy[j] - dot);
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const std::size_t m = x.rows(), n = x.cols();
  if (n == 0) throw DimensionError("layer_norm: empty rows");
  if (gain.size() != n || bias.size() != n) {
    throw DimensionError("layer_norm: input " + shape_str(x.shape()) + " with gain " +
                         shape_str(gain.shape()) + " and bias " + shape_str(bias.shape()));
  }
  auto X = x.data();
  auto G = gain.data();
  auto B = bias.data();
  std::vector<double> out(m * n);
  std::vector<double> normed(m * n);
  std::vector<double> inv_std(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = X.data() + i * n;
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      normed[i * n + j] = (row[j] - mu) * inv_std[i];
      out[i * n + j] = normed[i * n + j] * G[j] + B[j];
    }
  }
  return make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [m, n, normed = std::move(normed), inv_std = std::move(inv_std)](Node& self) {
        const auto& G = parent_data(self, 1);
        const double* dy = self.grad.data();
        if (double* gx = parent_grad(self, 0)) {
          std::vector<double> dxhat(n);
          for (std::size_t i = 0; i < m; ++i) {
            double mean_d = 0.0, mean_dx = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              dxhat[j] = dy[i * n + j] * G[j];
              mean_d += dxhat[j];
              mean_dx += dxhat[j] * normed[i * n + j];
            }
            mean_d /= static_cast<double>(n);
            mean_dx /= static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j) {
              gx[i * n + j] += inv_std[i] * (dxhat[j] - mean_d - normed[i * n + j] * mean_dx);
            }
          }
        }
        if (double* gg = parent_grad(self, 1))
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gg[j] += dy[i * n + j] * normed[i * n + j];
        if (double* gb = parent_grad(self, 2))
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gb[j] += dy[i * n + j];
      });
}

Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  if (mode == Mode::eval || p == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - p);
  const double factor = 1.0 / (1.0 - p);
  std::vector<double> mask(x.size());
  for (auto& v : mask) v = keep(rng) ? factor : 0.0;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] * mask[i];
  return make_result(x.shape(), std::move(out), {x}, [mask = std::move(mask)](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * mask[i];
  });
}

Tensor bce_with_logits(const Tensor& logits, const Tensor& targets) {
  if (logits.size() != targets.size()) {
    throw DimensionError("bce_with_logits: logits " + shape_str(logits.shape()) + " vs targets " +
                         shape_str(targets.shape()));
  }
  if (logits.size() == 0) throw DimensionError("bce_with_logits: empty input");
  auto Z = logits.data();
  auto Y = targets.data();
  double total = 0.0;
  for (std::size_t i = 0; i < Z.size(); ++i) {
    if (Y[i] != 0.0 && Y[i] != 1.0) {
      throw ValidationError("bce_with_logits: target " + std::to_string(Y[i]) + " is not 0/1");
    }
    const double z = Z[i];
    total += std::max(z, 0.0) - z * Y[i] + std::log1p(std::exp(-std::abs(z)));
  }
  const double n = static_cast<double>(Z.size());
  return make_result({1}, {total / n}, {logits, targets}, [n](Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    const auto& Z = parent_data(self, 0);
    const auto& Y = parent_data(self, 1);
    const double up = self.grad[0] / n;
    for (std::size_t i = 0; i < Z.size(); ++i) {
      const double s = Z[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-Z[i]))
                                   : std::exp(Z[i]) / (1.0 + std::exp(Z[i]));
      g[i] += up * (s - Y[i]);
    }
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t m = parts[0].rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rows() != m) {
      throw DimensionError("concat_cols: row counts differ, " + shape_str(parts[0].shape()) +
                           " vs " + shape_str(p.shape()));
    }
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(m * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto d = parts[k].data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < widths[k]; ++j)
        out[i * total + offset + j] = d[i * widths[k] + j];
    offset += widths[k];
  }
  return make_result({m, total}, std::move(out), parts, [m, total, widths](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      if (double* g = parent_grad(self, k))
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < widths[k]; ++j)
            g[i * widths[k] + j] += self.grad[i * total + offset + j];
      offset += widths[k];
    }
  });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t n = parts[0].cols();
  std::vector<std::size_t> sizes;
  std::size_t rows = 0;
  std::vector<double> out;
  for (const auto& p : parts) {
    if (p.cols() != n) {
      throw DimensionError("concat_rows: column counts differ, " + shape_str(parts[0].shape()) +
                           " vs " + shape_str(p.shape()));
    }
    rows += p.rows();
    sizes.push_back(p.size());
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  return make_result({rows, n}, std::move(out), parts, [sizes](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (double* g = parent_grad(self, k))
        for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += self.grad[offset + i];
      offset += sizes[k];
    }
  });
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  const std::size_t m = a.rows(), n = a.cols();
  if (begin > end || end > n) {
    throw DimensionError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") of " + shape_str(a.shape()));
  }
  const std::size_t w = end - begin;
  std::vector<double> out(m * w);
  auto A = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = A[i * n + begin + j];
  return make_result({m, w}, std::move(out), {a}, [m, n, w, begin](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) g[i * n + begin + j] += self.grad[i * w + j];
  });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
  const std::size_t m = a.rows(), n = a.cols();
  if (begin > end || end > m) {
    throw DimensionError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") of " + shape_str(a.shape()));
  }
  auto A = a.data();
  std::vector<double> out(A.begin() + static_cast<long>(begin * n),
                          A.begin() + static_cast<long>(end * n));
  return make_result({end - begin, n}, std::move(out), {a}, [n, begin](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * n + i] += self.grad[i];
  });
}

Tensor mean_rows(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m == 0) throw DimensionError("mean_rows: no rows");
  std::vector<double> out(n, 0.0);
  auto A = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += A[i * n + j];
  for (auto& v : out) v /= static_cast<double>(m);
  return make_result({1, n}, std::move(out), {a}, [m, n](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j] / static_cast<double>(m);
  });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return make_result({1}, {total}, {a}, [](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (std::size_t i = 0; i < self.parents[0]->data.size(); ++i) g[i] += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw DimensionError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor embedding_bag(const Tensor& table, std::size_t out_rows,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const std::size_t vocab = table.rows(), n = table.cols();
  auto T = table.data();
  std::vector<double> out(out_rows * n, 0.0);
  for (const auto& [r, idx] : pairs) {
    if (r >= out_rows || idx >= vocab) {
      throw DimensionError("embedding_bag: pair (" + std::to_string(r) + ", " +
                           std::to_string(idx) + ") outside " + std::to_string(out_rows) +
                           " rows / table " + shape_str(table.shape()));
    }
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] += T[idx * n + j];
  }
  return make_result({out_rows, n}, std::move(out), {table}, [n, pairs](Node& self) {
    if (double* g = parent_grad(self, 0))
      for (const auto& [r, idx] : pairs)
        for (std::size_t j = 0; j < n; ++j) g[idx * n + j] += self.grad[r * n + j];
  });
}

}  // namespace lanet::num

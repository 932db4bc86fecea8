#pragma once

// Plain-loop re-implementation of the eval-mode forward passes. Shares no
// code with the library beyond reading parameters by name.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lanet/model/model.hpp"

namespace lanet::testing::ref {

using Mat = std::vector<std::vector<double>>;

inline Mat param(const model::Model& m, const std::string& name) {
  const auto& t = m.params().get(name);
  Mat out(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) out[r][c] = t(r, c);
  return out;
}

inline Mat linear(const Mat& x, const model::Model& m, const std::string& name) {
  const Mat w = param(m, name + ".weight");
  const Mat b = param(m, name + ".bias");
  Mat y(x.size(), std::vector<double>(w[0].size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < w[0].size(); ++j) {
      double s = b[0][j];
      for (std::size_t k = 0; k < w.size(); ++k) s += x[i][k] * w[k][j];
      y[i][j] = s;
    }
  return y;
}

inline Mat layer_norm(const Mat& x, const model::Model& m, const std::string& name) {
  const Mat g = param(m, name + ".gain");
  const Mat b = param(m, name + ".bias");
  Mat y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(x[i].size());
    double mu = 0.0, var = 0.0;
    for (double v : x[i]) mu += v;
    mu /= n;
    for (double v : x[i]) var += (v - mu) * (v - mu);
    var /= n;
    for (std::size_t j = 0; j < x[i].size(); ++j)
      y[i][j] = (x[i][j] - mu) / std::sqrt(var + 1e-5) * g[0][j] + b[0][j];
  }
  return y;
}

inline Mat add(Mat a, const Mat& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] += b[i][j];
  return a;
}

/// Returns the layer output; appends per-head alpha matrices to `alphas`.
inline Mat encoder_layer(const Mat& x, const model::Model& m, const std::string& prefix,
                         std::size_t heads, std::vector<Mat>* alphas = nullptr) {
  const std::size_t T = x.size();
  Mat merged(T);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string p = prefix + ".attn.head" + std::to_string(h);
    const Mat q = linear(x, m, p + ".query");
    const Mat k = linear(x, m, p + ".key");
    const Mat v = linear(x, m, p + ".value");
    const double d = static_cast<double>(q[0].size());
    Mat alpha(T, std::vector<double>(T));
    for (std::size_t i = 0; i < T; ++i) {
      double mx = -1e300;
      for (std::size_t j = 0; j < T; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < q[0].size(); ++c) s += q[i][c] * k[j][c];
        alpha[i][j] = s / std::sqrt(d);
        mx = std::max(mx, alpha[i][j]);
      }
      double z = 0.0;
      for (auto& a : alpha[i]) z += (a = std::exp(a - mx));
      for (auto& a : alpha[i]) a /= z;
    }
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t c = 0; c < v[0].size(); ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < T; ++j) s += alpha[i][j] * v[j][c];
        merged[i].push_back(s);
      }
    if (alphas) alphas->push_back(alpha);
  }
  const Mat attn = linear(merged, m, prefix + ".attn.output");
  const Mat h1 = layer_norm(add(x, attn), m, prefix + ".norm1");
  Mat f = linear(h1, m, prefix + ".ff_in");
  for (auto& r : f)
    for (auto& v : r) v = std::max(0.0, v);
  f = linear(f, m, prefix + ".ff_out");
  return layer_norm(add(h1, f), m, prefix + ".norm2");
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline Mat label_tokens(const model::Model& m, const data::EncodedSample& s) {
  const Mat label = param(m, "emb.label"), dt = param(m, "emb.dt"), pos = param(m, "emb.position"),
            amount = param(m, "emb.amount"), id = param(m, "emb.id");
  const std::size_t K = label.size();
  const std::size_t wt = dt[0].size(), wa = amount[0].size();
  Mat tokens;
  tokens.push_back(id[s.id]);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> row = label[k];
    std::vector<double> time(wt, 0.0), amt(wa, 0.0);
    for (const auto& o : s.occurrences) {
      if (o.label != k) continue;
      for (std::size_t c = 0; c < wt; ++c) time[c] += dt[o.dt][c] + pos[o.position][c];
      for (std::size_t c = 0; c < wa; ++c) amt[c] += amount[o.bin][c];
    }
    row.insert(row.end(), time.begin(), time.end());
    row.insert(row.end(), amt.begin(), amt.end());
    tokens.push_back(row);
  }
  return tokens;
}

inline std::vector<double> lanet_scores(const model::Model& m, const data::EncodedSample& s,
                                        std::vector<Mat>* alphas = nullptr) {
  const auto& c = m.config();
  Mat x = label_tokens(m, s);
  for (std::size_t l = 0; l < c.layers; ++l)
    x = encoder_layer(x, m, "enc" + std::to_string(l), c.heads, alphas);
  const Mat w = param(m, "head.weight"), b = param(m, "head.bias");
  std::vector<double> out;
  for (std::size_t k = 1; k < x.size(); ++k) {
    double z = b[0][0];
    for (std::size_t j = 0; j < w.size(); ++j) z += x[k][j] * w[j][0];
    out.push_back(sigmoid(z));
  }
  return out;
}

/// Per-timestamp baseline inputs: standardized amount vector projected to D,
/// plus dt and position embeddings.
inline Mat baseline_inputs(const model::Model& m, const data::EncodedSample& s) {
  const std::size_t K = m.label_count();
  const Mat dt = param(m, "dt"), pos = param(m, "position");
  Mat z(s.tau, std::vector<double>(K, 0.0));
  for (const auto& o : s.occurrences) z[o.position][o.label] = o.amount;
  for (auto& r : z)
    for (std::size_t k = 0; k < K; ++k)
      r[k] = (r[k] - m.normalizer().mean[k]) / m.normalizer().stddev[k];
  Mat x = linear(z, m, "amount_proj");
  for (std::size_t p = 0; p < s.tau; ++p)
    for (std::size_t c = 0; c < x[p].size(); ++c)
      x[p][c] += dt[s.dt_per_position[p]][c] + pos[p][c];
  return x;
}

inline std::vector<double> head_scores(const model::Model& m, const std::vector<double>& h) {
  const Mat out = linear(Mat{h}, m, "head");
  std::vector<double> scores;
  for (double z : out[0]) scores.push_back(sigmoid(z));
  return scores;
}

inline std::vector<double> transformer_base_scores(const model::Model& m,
                                                   const data::EncodedSample& s) {
  const auto& c = m.config();
  Mat x = baseline_inputs(m, s);
  x.push_back(param(m, "id")[s.id]);
  for (std::size_t l = 0; l < c.layers; ++l) x = encoder_layer(x, m, "enc" + std::to_string(l), c.heads);
  std::vector<double> pooled(x[0].size(), 0.0);
  for (const auto& r : x)
    for (std::size_t j = 0; j < r.size(); ++j) pooled[j] += r[j] / static_cast<double>(x.size());
  return head_scores(m, pooled);
}

inline std::vector<double> lstm_scores(const model::Model& m, const data::EncodedSample& s) {
  Mat x = baseline_inputs(m, s);
  const auto id = param(m, "id")[s.id];
  const Mat U = param(m, "lstm.recurrent");
  const std::size_t H = U.size();
  std::vector<double> h(H, 0.0), c(H, 0.0);
  for (std::size_t p = 0; p < s.tau; ++p) {
    std::vector<double> xp = x[p];
    for (std::size_t j = 0; j < H; ++j) xp[j] += id[j];
    Mat gates = linear(Mat{xp}, m, "lstm.input");
    for (std::size_t j = 0; j < 4 * H; ++j)
      for (std::size_t i = 0; i < H; ++i) gates[0][j] += h[i] * U[i][j];
    for (std::size_t j = 0; j < H; ++j) {
      const double ig = sigmoid(gates[0][j]), fg = sigmoid(gates[0][H + j]),
                   g = std::tanh(gates[0][2 * H + j]), og = sigmoid(gates[0][3 * H + j]);
      c[j] = fg * c[j] + ig * g;
      h[j] = og * std::tanh(c[j]);
    }
  }
  return head_scores(m, h);
}

}  // namespace lanet::testing::ref

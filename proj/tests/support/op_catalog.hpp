#pragma once

// Finite-difference cases for every differentiable primitive, each drawing a
// fresh random shape from the supplied generator.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lanet/num/nn.hpp"
#include "lanet/num/ops.hpp"
#include "support/gradcheck.hpp"

namespace lanet::testing {

struct GradCase {
  std::string name;
  std::function<double(std::mt19937_64&)> run;  // returns relative error
};

inline std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double check_unary(std::mt19937_64& rng, Tensor (*op)(const Tensor&)) {
  auto x = random_tensor({draw(rng, 1, 5), draw(rng, 1, 6)}, rng);
  auto w = projection_weights(x.size(), rng);
  return gradcheck([&] { return weighted_sum(op(x), w); }, {x});
}

inline std::vector<GradCase> op_catalog() {
  using namespace lanet::num;
  std::vector<GradCase> cases;
  cases.push_back({"matmul", [](std::mt19937_64& rng) {
                     const auto m = draw(rng, 1, 5), k = draw(rng, 1, 5), n = draw(rng, 1, 5);
                     auto a = random_tensor({m, k}, rng);
                     auto b = random_tensor({k, n}, rng);
                     auto w = projection_weights(m * n, rng);
                     return gradcheck([&] { return weighted_sum(matmul(a, b), w); }, {a, b});
                   }});
  cases.push_back({"transpose", [](std::mt19937_64& rng) { return check_unary(rng, transpose); }});
  cases.push_back({"add/sub/mul", [](std::mt19937_64& rng) {
                     Shape s{draw(rng, 1, 4), draw(rng, 1, 5)};
                     auto a = random_tensor(s, rng);
                     auto b = random_tensor(s, rng);
                     auto c = random_tensor(s, rng);
                     auto w = projection_weights(a.size(), rng);
                     return gradcheck([&] { return weighted_sum(mul(add(a, b), sub(c, a)), w); },
                                      {a, b, c});
                   }});
  cases.push_back({"scale/scale_by", [](std::mt19937_64& rng) {
                     auto a = random_tensor({draw(rng, 1, 4), draw(rng, 1, 5)}, rng);
                     auto s = random_tensor({1}, rng);
                     auto w = projection_weights(a.size(), rng);
                     return gradcheck([&] { return weighted_sum(scale(scale_by(a, s), 1.7), w); },
                                      {a, s});
                   }});
  cases.push_back({"add_row/mul_row", [](std::mt19937_64& rng) {
                     const auto m = draw(rng, 1, 5), n = draw(rng, 1, 5);
                     auto a = random_tensor({m, n}, rng);
                     auto r1 = random_tensor({1, n}, rng);
                     auto r2 = random_tensor({n}, rng);
                     auto w = projection_weights(m * n, rng);
                     return gradcheck([&] { return weighted_sum(mul_row(add_row(a, r1), r2), w); },
                                      {a, r1, r2});
                   }});
  cases.push_back({"broadcast_rows", [](std::mt19937_64& rng) {
                     const auto m = draw(rng, 1, 5);
                     auto r = random_tensor({1, draw(rng, 1, 5)}, rng);
                     auto w = projection_weights(m * r.size(), rng);
                     return gradcheck([&] { return weighted_sum(broadcast_rows(r, m), w); }, {r});
                   }});
  cases.push_back({"relu", [](std::mt19937_64& rng) { return check_unary(rng, relu); }});
  cases.push_back({"sigmoid", [](std::mt19937_64& rng) { return check_unary(rng, sigmoid); }});
  cases.push_back({"tanh", [](std::mt19937_64& rng) { return check_unary(rng, num::tanh); }});
  cases.push_back(
      {"softmax_rows", [](std::mt19937_64& rng) { return check_unary(rng, softmax_rows); }});
  cases.push_back({"layer_norm", [](std::mt19937_64& rng) {
                     const auto m = draw(rng, 1, 4), n = draw(rng, 2, 7);
                     auto x = random_tensor({m, n}, rng);
                     auto g = random_tensor({1, n}, rng);
                     auto b = random_tensor({1, n}, rng);
                     auto w = projection_weights(m * n, rng);
                     return gradcheck([&] { return weighted_sum(layer_norm(x, g, b), w); },
                                      {x, g, b});
                   }});
  cases.push_back({"dropout(train, fixed mask)", [](std::mt19937_64& rng) {
                     auto x = random_tensor({draw(rng, 1, 4), draw(rng, 1, 6)}, rng);
                     auto w = projection_weights(x.size(), rng);
                     const auto seed = rng();
                     return gradcheck(
                         [&] {
                           Rng local(seed);
                           return weighted_sum(dropout(x, 0.3, Mode::train, local), w);
                         },
                         {x});
                   }});
  cases.push_back({"bce_with_logits", [](std::mt19937_64& rng) {
                     const auto n = draw(rng, 1, 8);
                     auto z = random_tensor({n}, rng, 2.0);
                     std::vector<double> y(n);
                     for (auto& v : y) v = static_cast<double>(draw(rng, 0, 1));
                     Tensor t({n}, y);
                     return gradcheck([&] { return bce_with_logits(z, t); }, {z});
                   }});
  cases.push_back({"concat/slice", [](std::mt19937_64& rng) {
                     const auto m = draw(rng, 2, 4), n1 = draw(rng, 1, 4), n2 = draw(rng, 1, 4);
                     auto a = random_tensor({m, n1}, rng);
                     auto b = random_tensor({m, n2}, rng);
                     auto c = random_tensor({1, n1 + n2}, rng);
                     auto w = projection_weights(n1 + n2 - 1, rng);
                     return gradcheck(
                         [&] {
                           auto rows = concat_rows({concat_cols({a, b}), c});
                           auto part = slice_cols(slice_rows(rows, 1, m + 1), 1, n1 + n2);
                           return weighted_sum(mean_rows(part), w);
                         },
                         {a, b, c});
                   }});
  cases.push_back({"embedding_bag", [](std::mt19937_64& rng) {
                     const auto vocab = draw(rng, 2, 6), n = draw(rng, 1, 5), rows = draw(rng, 1, 4);
                     auto table = random_tensor({vocab, n}, rng);
                     std::vector<std::pair<std::size_t, std::size_t>> pairs;
                     for (std::size_t i = 0, e = draw(rng, 1, 8); i < e; ++i)
                       pairs.emplace_back(draw(rng, 0, rows - 1), draw(rng, 0, vocab - 1));
                     auto w = projection_weights(rows * n, rng);
                     return gradcheck(
                         [&] { return weighted_sum(embedding_bag(table, rows, pairs), w); },
                         {table});
                   }});
  cases.push_back({"scaled_dot_attention", [](std::mt19937_64& rng) {
                     const auto T = draw(rng, 1, 5), d = draw(rng, 1, 4);
                     auto q = random_tensor({T, d}, rng);
                     auto k = random_tensor({T, d}, rng);
                     auto v = random_tensor({T, d}, rng);
                     auto w = projection_weights(T * d, rng);
                     return gradcheck(
                         [&] { return weighted_sum(scaled_dot_attention(q, k, v).out, w); },
                         {q, k, v});
                   }});
  cases.push_back({"multihead_attention", [](std::mt19937_64& rng) {
                     const auto heads = draw(rng, 1, 3), T = draw(rng, 1, 5);
                     const auto D = heads * draw(rng, 1, 3);
                     ParamSet ps;
                     Rng init(rng());
                     auto params = make_multihead(ps, "mh", D, heads, init);
                     auto x = random_tensor({T, D}, rng);
                     auto w = projection_weights(T * D, rng);
                     std::vector<Tensor> inputs{x};
                     for (auto& e : ps.entries()) inputs.push_back(e.tensor);
                     return gradcheck(
                         [&] { return weighted_sum(multihead_attention(x, params).out, w); },
                         inputs);
                   }});
  cases.push_back({"encoder_layer", [](std::mt19937_64& rng) {
                     const auto heads = draw(rng, 1, 2), T = draw(rng, 1, 4);
                     const auto D = heads * draw(rng, 2, 3);
                     ParamSet ps;
                     Rng init(rng());
                     auto params = make_encoder_layer(ps, "enc", D, heads, 4 * D, init);
                     auto x = random_tensor({T, D}, rng);
                     auto w = projection_weights(T * D, rng);
                     std::vector<Tensor> inputs{x};
                     for (auto& e : ps.entries()) inputs.push_back(e.tensor);
                     Rng unused(0);
                     return gradcheck(
                         [&] {
                           return weighted_sum(
                               encoder_layer(x, params, 0.3, Mode::eval, unused).out, w);
                         },
                         inputs);
                   }});
  cases.push_back({"lstm_cell (3 steps)", [](std::mt19937_64& rng) {
                     const auto in = draw(rng, 1, 4), H = draw(rng, 1, 4);
                     ParamSet ps;
                     Rng init(rng());
                     auto params = make_lstm(ps, "lstm", in, H, init);
                     std::vector<Tensor> xs;
                     for (int t = 0; t < 3; ++t) xs.push_back(random_tensor({1, in}, rng));
                     auto w = projection_weights(H, rng);
                     std::vector<Tensor> inputs = xs;
                     for (auto& e : ps.entries()) inputs.push_back(e.tensor);
                     return gradcheck(
                         [&] {
                           LstmState s{Tensor::zeros({1, H}), Tensor::zeros({1, H})};
                           for (auto& x : xs) s = lstm_cell(x, s, params);
                           return weighted_sum(s.h, w);
                         },
                         inputs);
                   }});
  return cases;
}

}  // namespace lanet::testing

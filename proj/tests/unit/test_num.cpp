#include <cmath>
#include <numeric>
#include <unordered_set>

#include "doctest.h"
#include "lanet/num/nn.hpp"
#include "lanet/num/ops.hpp"
#include "lanet/num/optim.hpp"
#include "support/gradcheck.hpp"
#include "support/op_catalog.hpp"

using namespace lanet;
using namespace lanet::num;
using lanet::testing::gradcheck;
using lanet::testing::projection_weights;
using lanet::testing::random_tensor;
using lanet::testing::weighted_sum;

TEST_CASE("matmul values") {
  auto eye = Tensor::matrix(2, 2, {1, 0, 0, 1});
  auto m = Tensor::matrix(2, 2, {1, 2, 3, 4});
  auto r = matmul(eye, m);
  CHECK(std::vector<double>(r.data().begin(), r.data().end()) == std::vector<double>{1, 2, 3, 4});

  auto dot = matmul(Tensor::matrix(1, 2, {1, 2}), Tensor::matrix(2, 1, {3, 4}));
  CHECK(dot.item() == 11.0);
}

TEST_CASE("matmul shape error names both shapes") {
  try {
    matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    std::string msg = e.what();
    CHECK(msg.find("[2x3] x [2x3]") != std::string::npos);
  }
}

TEST_CASE("matmul gradient matches finite differences") {
  std::mt19937_64 rng(11);
  auto a = random_tensor({3, 4}, rng);
  auto b = random_tensor({4, 2}, rng);
  auto w = projection_weights(6, rng);
  CHECK(gradcheck([&] { return weighted_sum(matmul(a, b), w); }, {a, b}) < 1e-6);
}

TEST_CASE("softmax_rows") {
  auto u = softmax_rows(Tensor::matrix(1, 3, {0, 0, 0}));
  for (double v : u.data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  auto big = softmax_rows(Tensor::matrix(1, 2, {1000, 0}));
  CHECK(std::isfinite(big.data()[0]));
  CHECK(big.data()[0] == doctest::Approx(1.0));
  CHECK(big.data()[1] < 1e-300);

  CHECK_THROWS_AS(softmax_rows(Tensor::matrix(1, 2, {NAN, 0})), NumericError);

  std::mt19937_64 rng(5);
  auto x = random_tensor({2, 5}, rng);
  auto w = projection_weights(10, rng);
  CHECK(gradcheck([&] { return weighted_sum(softmax_rows(x), w); }, {x}) < 1e-6);
}

TEST_CASE("softmax rows are nonnegative and sum to one") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = random_tensor({1 + rng() % 6, 1 + rng() % 9}, rng, 5.0, false);
    auto y = softmax_rows(x);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) {
        CHECK(y(i, j) >= 0.0);
        total += y(i, j);
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("scaled_dot_attention special cases") {
  auto v = Tensor::matrix(1, 3, {0.5, -1, 2});
  auto single = scaled_dot_attention(v, v, v);
  CHECK(single.weights.item() == 1.0);
  for (std::size_t j = 0; j < 3; ++j) CHECK(single.out(0, j) == v(0, j));

  std::mt19937_64 rng(2);
  auto q = random_tensor({4, 3}, rng);
  auto k = broadcast_rows(Tensor::matrix(1, 3, {0.2, 0.1, -0.4}), 4);
  auto r = scaled_dot_attention(q, k, random_tensor({4, 3}, rng));
  for (double w : r.weights.data()) CHECK(w == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(scaled_dot_attention(Tensor::zeros({2, 0}), Tensor::zeros({2, 0}),
                                       Tensor::zeros({2, 0})),
                  DimensionError);
}

TEST_CASE("scaled_dot_attention matches per-element evaluation") {
  std::mt19937_64 rng(3);
  const std::size_t T = 4, d = 3;
  auto q = random_tensor({T, d}, rng);
  auto k = random_tensor({T, d}, rng);
  auto v = random_tensor({T, d}, rng);
  auto r = scaled_dot_attention(q, k, v);
  for (std::size_t i = 0; i < T; ++i) {
    std::vector<double> score(T);
    double total = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += q(i, c) * k(j, c);
      score[j] = std::exp(s / std::sqrt(3.0));
      total += score[j];
    }
    for (std::size_t j = 0; j < T; ++j) CHECK(std::abs(r.weights(i, j) - score[j] / total) < 1e-12);
    for (std::size_t c = 0; c < d; ++c) {
      double e = 0.0;
      for (std::size_t j = 0; j < T; ++j) e += score[j] / total * v(j, c);
      CHECK(std::abs(r.out(i, c) - e) < 1e-12);
    }
  }
}

TEST_CASE("multihead_attention") {
  Rng init(4);
  std::mt19937_64 rng(40);

  SUBCASE("one head reduces to attention plus output projection") {
    ParamSet ps;
    auto p = make_multihead(ps, "mh", 6, 1, init);
    auto x = random_tensor({3, 6}, rng);
    auto mh = multihead_attention(x, p);
    const auto& h = p.heads[0];
    auto direct = scaled_dot_attention(linear(x, h.query), linear(x, h.key), linear(x, h.value));
    auto expected = linear(direct.out, p.output);
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(mh.out.data()[i] == expected.data()[i]);
    for (std::size_t i = 0; i < 9; ++i) CHECK(mh.weights.data()[i] == direct.weights.data()[i]);
  }

  SUBCASE("single token gets weight one and output is affine in it") {
    ParamSet ps;
    auto p = make_multihead(ps, "mh", 8, 4, init);
    auto x = random_tensor({1, 8}, rng);
    auto r = multihead_attention(x, p);
    CHECK(r.weights.shape() == Shape{4, 1, 1});
    for (double w : r.weights.data()) CHECK(w == 1.0);
    // With T = 1 the output is linear(concat of value projections).
    std::vector<Tensor> vals;
    for (const auto& h : p.heads) vals.push_back(linear(x, h.value));
    auto expected = linear(concat_cols(vals), p.output);
    for (std::size_t i = 0; i < 8; ++i)
      CHECK(r.out.data()[i] == doctest::Approx(expected.data()[i]).epsilon(1e-14));
  }

  SUBCASE("gradient check T=5 heads=4 D=8") {
    ParamSet ps;
    auto p = make_multihead(ps, "mh", 8, 4, init);
    auto x = random_tensor({5, 8}, rng);
    auto w = projection_weights(40, rng);
    std::vector<Tensor> inputs{x};
    for (auto& e : ps.entries()) inputs.push_back(e.tensor);
    CHECK(gradcheck([&] { return weighted_sum(multihead_attention(x, p).out, w); }, inputs) <
          1e-5);
  }

  SUBCASE("indivisible dimension is a configuration error") {
    ParamSet ps;
    CHECK_THROWS_AS(make_multihead(ps, "mh", 10, 4, init), ConfigError);
  }
}

TEST_CASE("layer_norm") {
  auto one = Tensor::matrix(1, 3, {1, 1, 1});
  auto zero = Tensor::matrix(1, 3, {0, 0, 0});
  auto c = layer_norm(Tensor::matrix(1, 3, {4, 4, 4}), one, zero);
  for (double v : c.data()) CHECK(v == 0.0);

  auto r = layer_norm(Tensor::matrix(1, 2, {1, -1}), Tensor::matrix(1, 2, {1, 1}),
                      Tensor::matrix(1, 2, {0, 0}));
  CHECK(r.data()[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.data()[1] == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(r.data()[0] == doctest::Approx(1.0 / std::sqrt(1.0 + 1e-5)).epsilon(1e-15));

  std::mt19937_64 rng(8);
  auto x = random_tensor({3, 5}, rng);
  auto g = random_tensor({1, 5}, rng);
  auto b = random_tensor({1, 5}, rng);
  auto w = projection_weights(15, rng);
  CHECK(gradcheck([&] { return weighted_sum(layer_norm(x, g, b), w); }, {x, g, b}) < 1e-5);
}

TEST_CASE("encoder_layer") {
  Rng init(9);
  std::mt19937_64 rng(90);
  ParamSet ps;
  auto p = make_encoder_layer(ps, "enc", 8, 2, 32, init);
  Rng drop(1);

  SUBCASE("zero attention output and zero feed-forward leave the norm path") {
    for (auto* t : {&p.attention.output.weight, &p.attention.output.bias, &p.ff_out.weight,
                    &p.ff_out.bias})
      for (auto& v : t->mutable_data()) v = 0.0;
    auto x = random_tensor({3, 8}, rng);
    auto out = encoder_layer(x, p, 0.0, Mode::eval, drop).out;
    auto expected = layer_norm(layer_norm(x, p.norm1.gain, p.norm1.bias), p.norm2.gain,
                               p.norm2.bias);
    for (std::size_t i = 0; i < out.size(); ++i)
      CHECK(out.data()[i] == doctest::Approx(expected.data()[i]).epsilon(1e-12));
  }

  SUBCASE("gradient check on 3x8 input") {
    auto x = random_tensor({3, 8}, rng);
    auto w = projection_weights(24, rng);
    std::vector<Tensor> inputs{x};
    for (auto& e : ps.entries()) inputs.push_back(e.tensor);
    CHECK(gradcheck([&] { return weighted_sum(encoder_layer(x, p, 0.3, Mode::eval, drop).out, w); },
                    inputs) < 1e-5);
  }

  SUBCASE("token permutation permutes the output") {
    auto x = random_tensor({4, 8}, rng, 1.0, false);
    std::vector<std::size_t> perm{2, 0, 3, 1};
    std::vector<double> permuted;
    for (auto i : perm) permuted.insert(permuted.end(), x.data().begin() + i * 8, x.data().begin() + (i + 1) * 8);
    auto a = encoder_layer(x, p, 0.0, Mode::eval, drop).out;
    auto b = encoder_layer(Tensor::matrix(4, 8, permuted), p, 0.0, Mode::eval, drop).out;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 8; ++c) CHECK(b(r, c) == doctest::Approx(a(perm[r], c)).epsilon(1e-12));
  }
}

TEST_CASE("dropout") {
  Rng rng(12);
  auto x = Tensor::full({1, 100}, 2.0);
  auto same = dropout(x, 0.0, Mode::train, rng);
  for (double v : same.data()) CHECK(v == 2.0);
  auto eval = dropout(x, 0.7, Mode::eval, rng);
  for (double v : eval.data()) CHECK(v == 2.0);
  CHECK_THROWS_AS(dropout(x, 1.0, Mode::train, rng), ConfigError);
  CHECK_THROWS_AS(dropout(x, -0.1, Mode::train, rng), ConfigError);

  auto big = Tensor::full({1, 100000}, 1.0);
  auto d = dropout(big, 0.3, Mode::train, rng);
  std::size_t zeros = 0;
  for (double v : d.data()) {
    if (v == 0.0) ++zeros;
    else CHECK(v == doctest::Approx(1.0 / 0.7));
  }
  CHECK(std::abs(zeros / 1e5 - 0.3) < 0.01);
}

TEST_CASE("bce_with_logits") {
  auto loss = bce_with_logits(Tensor({3}, {0, 0, 0}), Tensor({3}, {1, 0, 1}));
  CHECK(loss.item() == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  auto saturated = bce_with_logits(Tensor({1}, {50}), Tensor({1}, {1}));
  CHECK(std::isfinite(saturated.item()));
  CHECK(saturated.item() < 1e-20);

  CHECK_THROWS_AS(bce_with_logits(Tensor({2}, {0, 0}), Tensor({2}, {0.5, 1})), ValidationError);

  auto z = Tensor({4}, {-1.5, 0.2, 3.0, -0.1}, true);
  Tensor y({4}, {1, 0, 1, 0});
  bce_with_logits(z, y).backward();
  for (std::size_t i = 0; i < 4; ++i) {
    const double s = 1.0 / (1.0 + std::exp(-z.data()[i]));
    CHECK(z.grad()[i] == doctest::Approx((s - y.data()[i]) / 4.0).epsilon(1e-14));
  }
  CHECK(gradcheck([&] { return bce_with_logits(z, y); }, {z}) < 1e-6);
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradient leaves params unchanged and only decays moments") {
    std::vector<double> fresh{3.0};
    std::vector<double> zero{0.0};
    AdamMoments empty;
    adam_step(fresh, zero, empty, {});
    CHECK(fresh[0] == 3.0);
    CHECK(empty.m[0] == 0.0);
    CHECK(empty.v[0] == 0.0);
    CHECK(empty.step == 1);

    std::vector<double> p{1.0};
    AdamMoments st;
    st.m = {0.5};
    st.v = {0.25};
    st.step = 3;
    adam_step(p, zero, st, {});
    CHECK(st.m[0] == doctest::Approx(0.9 * 0.5).epsilon(1e-15));
    CHECK(st.v[0] == doctest::Approx(0.999 * 0.25).epsilon(1e-15));
  }

  SUBCASE("first step with unit gradient moves by lr") {
    std::vector<double> p{0.0};
    std::vector<double> g{1.0};
    AdamMoments st;
    AdamHyper hyper;
    hyper.lr = 0.1;
    adam_step(p, g, st, hyper);
    CHECK(p[0] == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-15));
  }

  SUBCASE("identical seeds give bit-identical parameters") {
    auto run = [] {
      Rng init(77);
      ParamSet ps;
      auto layer = make_linear(ps, "lin", 3, 2, init);
      Adam opt(ps, {});
      std::mt19937_64 data(5);
      for (int step = 0; step < 10; ++step) {
        opt.zero_grad();
        auto x = random_tensor({4, 3}, data, 1.0, false);
        sum(mul(linear(x, layer), linear(x, layer))).backward();
        opt.step();
      }
      std::vector<double> out(layer.weight.data().begin(), layer.weight.data().end());
      return out;
    };
    CHECK(run() == run());
  }
}

TEST_CASE("lstm_cell") {
  Rng init(3);
  ParamSet ps;
  auto p = make_lstm(ps, "lstm", 3, 4, init);

  SUBCASE("zero params and inputs give zero hidden state") {
    for (auto& e : ps.entries())
      for (auto& v : e.tensor.mutable_data()) v = 0.0;
    auto s = lstm_cell(Tensor::zeros({1, 3}), {Tensor::zeros({1, 4}), Tensor::zeros({1, 4})}, p);
    for (double v : s.h.data()) CHECK(v == 0.0);
  }

  SUBCASE("open forget gate and closed input gate keep the cell") {
    auto b = p.input.bias.mutable_data();
    for (std::size_t j = 0; j < 4; ++j) {
      b[j] = -800.0;     // input gate
      b[4 + j] = 800.0;  // forget gate
    }
    std::mt19937_64 rng(1);
    auto c_prev = random_tensor({1, 4}, rng, 1.0, false);
    auto s = lstm_cell(random_tensor({1, 3}, rng, 0.1, false),
                       {random_tensor({1, 4}, rng, 0.1, false), c_prev}, p);
    for (std::size_t j = 0; j < 4; ++j) CHECK(s.c.data()[j] == c_prev.data()[j]);
  }
}

TEST_CASE("gradient catalog on random shapes") {
  std::mt19937_64 rng(2024);
  for (const auto& c : lanet::testing::op_catalog()) {
    for (int trial = 0; trial < 3; ++trial) {
      INFO(c.name);
      CHECK(c.run(rng) < 1e-4);
    }
  }
}

TEST_CASE("backward visits every node exactly once") {
  std::mt19937_64 rng(1);
  auto a = random_tensor({2, 3}, rng);
  auto b = random_tensor({3, 2}, rng);
  // A diamond: `m` feeds two branches that rejoin.
  auto m = matmul(a, b);
  auto loss = sum(add(sigmoid(m), mul(m, m)));

  std::unordered_set<const void*> nodes;
  std::vector<const detail::Node*> stack{loss.node().get()};
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    if (!nodes.insert(n).second) continue;
    for (auto& p : n->parents)
      if (p->requires_grad) stack.push_back(p.get());
  }
  CHECK(loss.backward() == nodes.size());
  CHECK(nodes.size() == 7);
}

TEST_CASE("no-grad scope records no graph") {
  auto a = Tensor::matrix(1, 2, {1, 2}, true);
  NoGradGuard guard;
  auto b = scale(a, 2.0);
  CHECK_FALSE(b.requires_grad());
  CHECK(b.node()->parents.empty());
}

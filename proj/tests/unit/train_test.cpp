// Copyright 2026 The TerraSeg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <thread>

#include "support/oracles.hpp"
#include "terraseg/error.hpp"
#include "terraseg/models/topologies.hpp"
#include "terraseg/rng.hpp"
#include "terraseg/train/checkpoint.hpp"
#include "terraseg/train/engine.hpp"
#include "terraseg/train/grad_check.hpp"
#include "terraseg/train/graph.hpp"
#include "terraseg/train/optimizer.hpp"
#include "terraseg/train/trainer.hpp"

namespace terraseg::train {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "terraseg_train_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::vector<std::uint8_t> slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

models::TopologySpec tiny_spec(models::TopologyKind kind, std::size_t h = 8) {
  models::TopologySpec s;
  s.kind = kind;
  s.depth = 2;
  s.base_channels = 2;
  s.in_channels = 2;
  s.num_classes = 3;
  s.input_height = h;
  s.input_width = h;
  s.seed = 7;
  return s;
}

Sample random_sample(SeededRng& rng, std::size_t c, std::size_t h,
                     std::size_t classes) {
  Sample s;
  s.input = tensor_random({c, h, h}, rng, -1.0, 1.0);
  s.labels = Tensor({h, h}, 0.0);
  for (auto& v : s.labels.values()) v = static_cast<double>(rng.below(classes));
  return s;
}

// Labelled bands with inputs that carry a noisy hint of the class.
Sample synthetic_tile(SeededRng& rng, std::size_t c, std::size_t h,
                      std::size_t classes) {
  Sample s;
  s.labels = Tensor({h, h}, 0.0);
  s.input = tensor_random({c, h, h}, rng, -0.5, 0.5);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < h; ++x) {
      const std::size_t k = ((x + y) * classes / (2 * h - 1)) % classes;
      s.labels[y * h + x] = static_cast<double>(k);
      s.input[(k % c) * h * h + y * h + x] += 1.0;
    }
  return s;
}

// ---- graph ----------------------------------------------------------------

TEST(Graph, ShapeInferenceAndNames) {
  NetworkGraph g;
  NodeId in = g.add_input("in", {3, 8, 8});
  NodeId c = g.add_conv("c", in, 4, 3, 1, 0);
  EXPECT_EQ(g.node(c).output_shape, (Shape{4, 6, 6}));
  NodeId p = g.add_max_pool("p", c);
  EXPECT_EQ(g.node(p).output_shape, (Shape{4, 3, 3}));
  NodeId u = g.add_unpool("u", p, p);
  EXPECT_EQ(g.node(u).output_shape, (Shape{4, 6, 6}));
  NodeId t = g.add_conv_transpose("t", p, 5, 2, 2);
  EXPECT_EQ(g.node(t).output_shape, (Shape{5, 6, 6}));
  NodeId cat = g.add_concat("cat", {in, t});
  EXPECT_EQ(g.node(cat).output_shape, (Shape{8, 6, 6}));
  EXPECT_THROW(g.add_conv("c", in, 1, 1), GraphError);
  EXPECT_THROW(g.add_add("bad", {c, t}), GraphError);
  EXPECT_THROW(g.add_max_pool("odd", g.add_conv("c7", in, 1, 2), 2, 2), GraphError);
  EXPECT_THROW(g.add_unpool("u2", p, p), GraphError);
  try {
    g.add_conv("huge", p, 1, 5);
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("huge"), std::string::npos);
  }
}

TEST(Graph, CountParameters) {
  NetworkGraph g;
  EXPECT_EQ(count_parameters(g), 0u);
  g.add_conv("c", g.add_input("in", {1, 5, 5}), 1, 3);
  EXPECT_EQ(count_parameters(g), 10u);
}

TEST(Graph, DescriptorRoundTripRebuildsTopology) {
  NetworkGraph g = models::build_segnet(tiny_spec(models::TopologyKind::kSegNet));
  NetworkGraph h = NetworkGraph::from_descriptor(g.descriptor());
  EXPECT_EQ(h.descriptor(), g.descriptor());
  EXPECT_EQ(h.parameter_count(), g.parameter_count());
  for (const auto& n : h.nodes()) {
    if (n.kind != NodeKind::kConv2d) continue;
    for (double v : n.params[0].value.values()) ASSERT_EQ(v, 0.0);
  }
}

TEST(Graph, InitializationWithinGlorotBound) {
  NetworkGraph g(3);
  NodeId c = g.add_conv("c", g.add_input("in", {4, 6, 6}), 6, 3);
  const double bound = std::sqrt(6.0 / (4 * 9 + 6 * 9));
  double peak = 0.0;
  for (double v : g.node(c).params[0].value.values()) peak = std::max(peak, std::abs(v));
  EXPECT_LE(peak, bound);
  EXPECT_GT(peak, 0.5 * bound);
  for (double v : g.node(c).params[1].value.values()) EXPECT_EQ(v, 0.0);
}

// ---- forward / backward ---------------------------------------------------

TEST(Forward, UnitConvIsIdentity) {
  NetworkGraph g;
  NodeId c = g.add_conv("c", g.add_input("in", {1, 4, 4}), 1, 1);
  g.node(c).params[0].value[0] = 1.0;
  SeededRng rng(1);
  Tensor x = tensor_random({1, 4, 4}, rng, -2.0, 2.0);
  EXPECT_EQ(predict(g, x), x);
}

TEST(Forward, DeterministicAndShapeChecked) {
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  SeededRng rng(2);
  Tensor x = tensor_random({2, 8, 8}, rng, -1.0, 1.0);
  EXPECT_EQ(predict(g, x), predict(g, x));
  EXPECT_EQ(predict(g, x).shape(), (Shape{3, 8, 8}));
  try {
    predict(g, Tensor({3, 8, 8}, 0.0));
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("input"), std::string::npos);
  }
}

TEST(Backward, ZeroGradientGivesZeroParameterGradients) {
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  SeededRng rng(3);
  ForwardCache c = forward(g, tensor_random({2, 8, 8}, rng, -1, 1), true);
  Gradients gr = backward(g, c, Tensor({3, 8, 8}, 0.0));
  for (const Tensor& t : gr.params)
    for (double v : t.values()) ASSERT_EQ(v, 0.0);
}

TEST(Backward, MissingCacheIsStateError) {
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  EXPECT_THROW(backward(g, ForwardCache{}, Tensor({3, 8, 8}, 1.0)), StateError);
}

TEST(Backward, SingleConvMatchesFiniteDifferences) {
  NetworkGraph g(4);
  g.add_conv("c", g.add_input("in", {2, 5, 5}), 3, 3, 1, 1);
  SeededRng rng(4);
  const Tensor x = tensor_random({2, 5, 5}, rng, -1, 1);
  const Tensor w = tensor_random({3, 5, 5}, rng, -1, 1);
  ForwardCache c = forward(g, x, false);
  Gradients gr = backward(g, c, w);
  // Loss <w, f(theta)> is linear in the output, so its gradient is backward(w).
  Tensor& k = *g.parameters()[0];
  auto f = [&](const Tensor& kk) {
    Tensor saved = k;
    k = kk;
    const double v = testing::inner(w, predict(g, x));
    k = saved;
    return v;
  };
  const Tensor numeric = testing::numeric_gradient(f, k, testing::kFiniteDiffStep);
  EXPECT_LE(testing::max_relative_error(gr.params[0], numeric), 1e-4);
}

TEST(Backward, ResidualSkipCarriesDownstreamGradient) {
  // y = conv(x) + x on a 2x2 input with a 3x3 kernel whose only nonzero tap is
  // the centre w, so dL/dx = g * (1 + w) by hand.
  NetworkGraph g;
  NodeId in = g.add_input("in", {1, 2, 2});
  NodeId c = g.add_conv("c", in, 1, 3, 1, 1);
  g.add_add("sum", {c, in});
  Tensor& k = g.node(c).params[0].value;
  for (auto& v : k.values()) v = 0.0;
  k[4] = 0.5;
  ForwardCache cache = forward(g, Tensor({1, 2, 2}, {1, -1, 2, 0}), false);
  const Tensor grad({1, 2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(backward(g, cache, grad).input, Tensor({1, 2, 2}, {1.5, 3, 4.5, 6}));

  k[4] = 0.0;
  cache = forward(g, Tensor({1, 2, 2}, {1, -1, 2, 0}), false);
  EXPECT_EQ(backward(g, cache, grad).input, grad);
}

TEST(Backward, UncropIsAdjointOfCrop) {
  SeededRng rng(5);
  const Tensor x = tensor_random({2, 3, 7, 6}, rng, -1, 1);
  const Tensor y = tensor_random({2, 3, 4, 3}, rng, -1, 1);
  EXPECT_NEAR(testing::inner(crop_center(x, 4, 3), y),
              testing::inner(x, uncrop_center(y, 7, 6)), 1e-12);
}

TEST(Backward, BatchedInputKeepsRank) {
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  SeededRng rng(6);
  ForwardCache c = forward(g, tensor_random({3, 2, 8, 8}, rng, -1, 1), true);
  EXPECT_EQ(c.output(g).shape(), (Shape{3, 3, 8, 8}));
  Gradients gr = backward(g, c, Tensor({3, 3, 8, 8}, 0.1));
  EXPECT_EQ(gr.input.shape(), (Shape{3, 2, 8, 8}));
}

// ---- optimizers -----------------------------------------------------------

TEST(Sgd, Examples) {
  OptimizerState s = OptimizerState::sgd(0.1);
  Tensor p({1}, 1.0);
  std::vector<Tensor*> ps{&p};
  sgd_step(s, ps, std::vector<Tensor>{Tensor({1}, 0.0)});
  EXPECT_EQ(p[0], 1.0);
  sgd_step(s, ps, std::vector<Tensor>{Tensor({1}, 0.5)});
  EXPECT_DOUBLE_EQ(p[0], 0.95);

  Tensor a({3}, {0.3, -1.0, 2.0}), b = a;
  std::vector<Tensor*> pa{&a}, pb{&b};
  const Tensor g({3}, {0.25, -0.5, 1.0});
  Tensor g2 = g;
  for (auto& v : g2.values()) v *= 2.0;
  sgd_step(s, pa, std::vector<Tensor>{g});
  sgd_step(s, pa, std::vector<Tensor>{g});
  sgd_step(s, pb, std::vector<Tensor>{g2});
  EXPECT_LE(max_abs_diff(a, b), 1e-15);
}

TEST(Adam, DefaultsAndValidation) {
  OptimizerState s = OptimizerState::adam();
  EXPECT_EQ(s.learning_rate, 0.001);
  EXPECT_EQ(s.beta1, 0.9);
  EXPECT_EQ(s.beta2, 0.999);
  EXPECT_EQ(s.epsilon, 1e-7);
  EXPECT_THROW(OptimizerState::adam(0.001, 1.0), ParameterError);
  EXPECT_THROW(OptimizerState::adam(0.001, 0.9, 0.0), ParameterError);
  EXPECT_THROW(OptimizerState::adam(0.001, 0.9, 0.999, 0.0), ParameterError);
  EXPECT_THROW(OptimizerState::sgd(0.0), ParameterError);
}

TEST(Adam, FirstStepWorkedExample) {
  OptimizerState s = OptimizerState::adam();
  Tensor p({1}, 0.0);
  std::vector<Tensor*> ps{&p};
  adam_step(s, ps, std::vector<Tensor>{Tensor({1}, 1.0)});
  EXPECT_EQ(s.t, 1u);
  EXPECT_NEAR(p[0], -0.001 / (1.0 + 1e-7), 1e-15);
  EXPECT_NEAR(p[0], -0.0009999999, 1e-12);
}

TEST(Adam, ZeroGradientIsFixedPoint) {
  OptimizerState s = OptimizerState::adam();
  SeededRng rng(7);
  Tensor p = tensor_random({4, 3}, rng, -1, 1);
  const Tensor before = p;
  std::vector<Tensor*> ps{&p};
  for (int i = 0; i < 5; ++i) adam_step(s, ps, std::vector<Tensor>{Tensor({4, 3}, 0.0)});
  EXPECT_EQ(p, before);
}

TEST(Adam, MatchesLongDoubleReference) {
  OptimizerState s = OptimizerState::adam(0.01);
  Tensor p({1}, 0.5);
  std::vector<Tensor*> ps{&p};
  long double rp = 0.5L, m = 0, v = 0;
  const double grads[] = {0.3, -1.2, 0.7, 2.0, -0.1, 0.05};
  int t = 0;
  for (double g : grads) {
    adam_step(s, ps, std::vector<Tensor>{Tensor({1}, g)});
    ++t;
    m = 0.9L * m + 0.1L * g;
    v = 0.999L * v + 0.001L * g * g;
    const long double mh = m / (1 - std::pow(0.9L, t));
    const long double vh = v / (1 - std::pow(0.999L, t));
    rp -= 0.01L * mh / (std::sqrt(vh) + 1e-7L);
  }
  EXPECT_NEAR(p[0], static_cast<double>(rp), 1e-12);
}

// ---- callbacks ------------------------------------------------------------

TEST(EarlyStoppingCallback, WaitsPatienceEpochsAfterLastImprovement) {
  EarlyStopping es({"val_loss", 0.001, 3});
  EXPECT_FALSE(es.on_epoch_end(1.0));
  EXPECT_FALSE(es.on_epoch_end(0.9995));  // improves by < min_delta
  EXPECT_FALSE(es.on_epoch_end(0.5));     // real improvement resets
  EXPECT_FALSE(es.on_epoch_end(0.5));
  EXPECT_FALSE(es.on_epoch_end(0.4995));
  EXPECT_TRUE(es.on_epoch_end(0.6));
  EXPECT_EQ(*es.best(), 0.5);
}

TEST(EarlyStoppingCallback, MetricMonitorsAreMaximized) {
  EarlyStopping es({"val_accuracy", 0.0, 1});
  EXPECT_FALSE(es.on_epoch_end(0.5));
  EXPECT_FALSE(es.on_epoch_end(0.6));
  EXPECT_TRUE(es.on_epoch_end(0.55));
}

TEST(PlateauCallback, RateIsInitialTimesFactorPower) {
  PlateauConfig cfg;
  ReduceLROnPlateau rp(cfg, 0.001);
  double lr = rp.on_epoch_end(1.0);
  for (int epoch = 0; epoch < 5; ++epoch) lr = rp.on_epoch_end(1.0);
  EXPECT_EQ(rp.reductions(), 1u);
  EXPECT_EQ(lr, 0.001 * std::pow(0.2, 1.0));
  for (int epoch = 0; epoch < 10; ++epoch) lr = rp.on_epoch_end(1.0);
  EXPECT_EQ(rp.reductions(), 3u);
  EXPECT_EQ(lr, 0.001 * std::pow(0.2, 3.0));
}

// ---- checkpoint -----------------------------------------------------------

TEST(Checkpoint, RoundTripIsBitExact) {
  NetworkGraph g = models::build_segnet(tiny_spec(models::TopologyKind::kSegNet));
  SeededRng rng(8);
  Tensor x = tensor_random({2, 8, 8}, rng, -1, 1);
  forward(g, x, true);  // moves the running statistics off their defaults
  const fs::path p = scratch("roundtrip.tseg");
  checkpoint_write(g, p);
  LoadedCheckpoint back = checkpoint_load(p);
  EXPECT_EQ(predict(back.graph, x), predict(g, x));
  EXPECT_EQ(count_parameters(back.graph), count_parameters(g));
  EXPECT_EQ(checkpoint_encode(back.graph, {}), slurp(p));
}

TEST(Checkpoint, SavesOnlyOnImprovement) {
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  const fs::path p = scratch("monitor.tseg");
  EXPECT_TRUE(checkpoint_save(g, p, 0.5));
  const auto first = slurp(p);
  const auto mtime = fs::last_write_time(p);
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  EXPECT_FALSE(checkpoint_save(g, p, 0.7));
  EXPECT_FALSE(checkpoint_save(g, p, 0.5));
  EXPECT_EQ(slurp(p), first);
  EXPECT_EQ(fs::last_write_time(p), mtime);
  EXPECT_TRUE(checkpoint_save(g, p, 0.4));
  EXPECT_NE(slurp(p), first);
  EXPECT_EQ(*checkpoint_load(p).header.monitor_value, 0.4);
}

TEST(Checkpoint, CorruptionIsFormatErrorWithOffset) {
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  const auto bytes = checkpoint_encode(g, {});
  auto bad_magic = bytes;
  bad_magic[1] = 'X';
  try {
    checkpoint_decode(bad_magic);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  try {
    checkpoint_decode(flipped);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), bytes.size() - 4);
  }
  auto version = bytes;
  version[4] = 9;
  try {
    checkpoint_decode(version);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(checkpoint_decode({bytes.begin(), bytes.begin() + 6}), FormatError);
}

// ---- grad_check -----------------------------------------------------------

TEST(GradCheck, LinearGraphIsNearlyExact) {
  NetworkGraph g(9);
  g.add_conv("c", g.add_input("in", {3, 4, 4}), 2, 1);
  SeededRng rng(9);
  GradCheckOptions o;
  o.include_input = true;
  GradCheckResult r = grad_check(g, tensor_random({3, 4, 4}, rng, -1, 1),
                                 tensor_random({2, 4, 4}, rng, -1, 1), {}, o);
  EXPECT_EQ(r.checked, count_parameters(g) + 48);
  EXPECT_LE(r.max_relative_error, 1e-8);
}

TEST(GradCheck, ReluKinkIsNudged) {
  // Zero input pixels with zero bias put the ReLU input exactly on its kink
  // for every value of the weight; moving the bias straddles it.
  NetworkGraph g;
  NodeId c = g.add_conv("c", g.add_input("in", {1, 2, 2}), 1, 1);
  g.add_activation("relu", c, nn::Activation::relu());
  g.node(c).params[0].value[0] = 0.7;
  GradCheckResult r = grad_check(g, Tensor({1, 2, 2}, {0, 1, -1, 0}),
                                 Tensor({1, 2, 2}, {0.3, 0.2, -0.4, 0.1}));
  EXPECT_GE(r.nudged, 1u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST(GradCheck, RejectsLargeGraphsWithoutSampling) {
  models::TopologySpec s = tiny_spec(models::TopologyKind::kUNet, 16);
  s.base_channels = 16;
  NetworkGraph g = models::build_unet(s);
  ASSERT_GT(count_parameters(g), 10000u);
  EXPECT_THROW(grad_check(g, Tensor({2, 16, 16}, 0.0), Tensor({3, 16, 16}, 0.0)),
               ParameterError);
}

TEST(GradCheck, BuilderGraphsPass) {
  for (auto kind : {models::TopologyKind::kUNet, models::TopologyKind::kSegNet,
                    models::TopologyKind::kResUNet}) {
    NetworkGraph g = models::build_topology(tiny_spec(kind));
    SeededRng rng(10);
    Sample s = random_sample(rng, 2, 8, 3);
    const Tensor target = one_hot(s.labels, {}, 3);
    GradCheckResult r = grad_check(g, s.input, target);
    SCOPED_TRACE(models::to_string(kind) + " worst " + r.worst);
    EXPECT_EQ(r.checked + r.skipped, count_parameters(g));
    EXPECT_LE(r.max_relative_error, 1e-4);
  }
}

// ---- fit ------------------------------------------------------------------

TEST(OneHot, EncodesAndValidates) {
  Tensor labels({1, 3}, {2, 0, 7});
  Tensor ignore({1, 3}, {0, 0, 1});
  Tensor t = one_hot(labels, ignore, 3);
  EXPECT_EQ(t, Tensor({3, 1, 3}, {0, 1, 0, 0, 0, 0, 1, 0, 0}));
  EXPECT_THROW(one_hot(labels, {}, 3), DataError);
}

TEST(Fit, EmptySourceIsDataError) {
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  OptimizerState opt = OptimizerState::adam();
  TrainConfig cfg;
  cfg.epochs = 1;
  EXPECT_THROW(fit(g, VectorSource{}, nullptr, opt, cfg), DataError);
}

TEST(Fit, DeterministicGivenSeed) {
  SeededRng rng(11);
  VectorSource src;
  for (int i = 0; i < 4; ++i) src.push(random_sample(rng, 2, 8, 3));
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 2;
  cfg.metrics = {"accuracy", "MIoU"};
  auto run = [&] {
    models::TopologySpec s = tiny_spec(models::TopologyKind::kSegNet);
    s.dropout = 0.2;
    NetworkGraph g = models::build_segnet(s);
    OptimizerState opt = OptimizerState::adam();
    History h = fit(g, src, &src, opt, cfg);
    return std::make_pair(h, checkpoint_encode(g, {}));
  };
  auto [h1, w1] = run();
  auto [h2, w2] = run();
  ASSERT_EQ(h1.epochs.size(), 3u);
  for (std::size_t e = 0; e < 3; ++e) {
    EXPECT_EQ(h1.epochs[e].values, h2.epochs[e].values);
  }
  EXPECT_TRUE(h1.epochs[2].values.count("val_MIoU"));
  EXPECT_EQ(w1, w2);
}

TEST(Fit, OverfitsOneTile) {
  models::TopologySpec s = tiny_spec(models::TopologyKind::kUNet, 16);
  s.base_channels = 4;
  s.in_channels = 4;
  NetworkGraph g = models::build_unet(s);
  SeededRng rng(12);
  VectorSource src({synthetic_tile(rng, 4, 16, 3)});
  OptimizerState opt = OptimizerState::adam();
  TrainConfig cfg;
  cfg.epochs = 200;
  History h = fit(g, src, nullptr, opt, cfg);
  EXPECT_LT(h.epochs.back().train_loss, 0.05);
}

TEST(Fit, CallbacksWithStalledLoss) {
  // A learning rate too small to move the loss: plateau cuts at epochs 6, 11,
  // 16, 21 and early stopping fires 20 epochs after the first.
  SeededRng rng(13);
  VectorSource src({random_sample(rng, 2, 8, 3)});
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  OptimizerState opt = OptimizerState::sgd(1e-12);
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.early_stop = EarlyStopConfig{};
  cfg.plateau = PlateauConfig{};
  cfg.checkpoint = CheckpointConfig{"val_loss", scratch("fit.tseg")};
  History h = fit(g, src, &src, opt, cfg);
  EXPECT_TRUE(h.stopped_early);
  EXPECT_EQ(h.epochs.size(), 21u);
  EXPECT_EQ(h.lr_reductions, 4u);
  EXPECT_EQ(h.epochs[5].learning_rate, 1e-12);
  EXPECT_EQ(h.epochs[6].learning_rate, 1e-12 * std::pow(0.2, 1.0));
  EXPECT_EQ(opt.learning_rate, 1e-12 * std::pow(0.2, 4.0));
  EXPECT_TRUE(h.epochs[0].checkpoint_written);
  EXPECT_TRUE(fs::exists(cfg.checkpoint->path));
}

TEST(Fit, ValMonitorFallsBackToTrainingLoss) {
  SeededRng rng(14);
  VectorSource src({random_sample(rng, 2, 8, 3)});
  NetworkGraph g = models::build_unet(tiny_spec(models::TopologyKind::kUNet));
  OptimizerState opt = OptimizerState::adam();
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.early_stop = EarlyStopConfig{};
  EXPECT_NO_THROW(fit(g, src, nullptr, opt, cfg));
  cfg.early_stop->monitor = "val_bogus";
  EXPECT_THROW(fit(g, src, nullptr, opt, cfg), ConfigError);
}

}  // namespace
}  // namespace terraseg::train

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

#include "terraseg/train/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "terraseg/error.hpp"
#include "terraseg/nn/loss.hpp"
#include "terraseg/rng.hpp"
#include "terraseg/train/engine.hpp"

namespace terraseg::train {

namespace {

struct Probe {
  double loss = 0.0;
  std::vector<std::uint8_t> fingerprint;
  ForwardCache cache;
  Tensor grad_seed;
  NodeId seed_node = 0;
};

bool ends_in_softmax(const NetworkGraph& g) {
  return g.node(g.output_node()).kind == NodeKind::kSoftmax;
}

std::vector<std::uint8_t> fingerprint(const NetworkGraph& g,
                                      const ForwardCache& c) {
  std::vector<std::uint8_t> fp;
  for (NodeId i = 0; i < g.size(); ++i) {
    const Node& n = g.node(i);
    if (n.kind == NodeKind::kActivation && n.activation.has_kink()) {
      for (double v : c.outputs[n.inputs[0]].values()) {
        fp.push_back(v > 0.0 ? 2 : (v < 0.0 ? 0 : 1));
      }
    } else if (n.kind == NodeKind::kMaxPool) {
      for (std::size_t idx : c.pool_indices[i].flat) {
        fp.push_back(static_cast<std::uint8_t>(idx & 0xFF));
        fp.push_back(static_cast<std::uint8_t>((idx >> 8) & 0xFF));
      }
    }
  }
  return fp;
}

class Snapshot {
 public:
  explicit Snapshot(NetworkGraph& g) : g_(g) {
    for (const auto& n : g.nodes()) stats_.push_back(n.running);
  }
  void restore() {
    for (std::size_t i = 0; i < g_.size(); ++i) g_.node(i).running = stats_[i];
  }
  ~Snapshot() { restore(); }

 private:
  NetworkGraph& g_;
  std::vector<nn::RunningStats> stats_;
};

Probe evaluate(NetworkGraph& g, const Tensor& input, const Tensor& target,
                    const Tensor& ignore, const GradCheckOptions& o,
                    Snapshot& snap, bool want_cache) {
  Probe e;
  e.cache = forward(g, input, o.training, o.dropout_seed);
  snap.restore();
  const Tensor out = e.cache.outputs[g.output_node()];
  const Tensor t = target.rank() == out.rank() ? target : target.reshape(out.shape());
  if (ends_in_softmax(g)) {
    nn::LossResult r = nn::categorical_cross_entropy(out, t, ignore);
    e.loss = r.loss;
    e.seed_node = g.node(g.output_node()).inputs[0];
    e.grad_seed = std::move(r.grad_logits);
  } else {
    if (t.shape() != out.shape()) {
      throw ShapeError("grad_check: target " + shape_to_string(target.shape()) +
                       " vs output " + shape_to_string(out.shape()));
    }
    e.grad_seed = Tensor(out.shape(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = out[i] - t[i];
      e.loss += 0.5 * d * d;
      e.grad_seed[i] = d;
    }
    e.seed_node = g.output_node();
  }
  e.fingerprint = fingerprint(g, e.cache);
  if (!want_cache) e.cache = {};
  return e;
}

double rel_error(double a, double n, double floor) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

}  // namespace

double check_loss(NetworkGraph& graph, const Tensor& input, const Tensor& target,
                  const Tensor& ignore, const GradCheckOptions& options) {
  Snapshot snap(graph);
  return evaluate(graph, input, target, ignore, options, snap, false).loss;
}

GradCheckResult grad_check(NetworkGraph& graph, const Tensor& input,
                           const Tensor& target, const Tensor& ignore,
                           const GradCheckOptions& o) {
  const std::size_t total = graph.parameter_count();
  if (total > o.max_parameters && o.sample == 0) {
    throw ParameterError("grad_check: " + std::to_string(total) +
                         " parameters exceed the limit of " +
                         std::to_string(o.max_parameters) +
                         "; enable coordinate sampling");
  }
  Snapshot snap(graph);
  Tensor x = input;

  // Coordinates: (tensor slot, element). Slot == params.size() is the input.
  std::vector<Tensor*> params = graph.parameters();
  const auto names = graph.parameter_names();
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t s = 0; s < params.size(); ++s)
    for (std::size_t k = 0; k < params[s]->size(); ++k) coords.emplace_back(s, k);
  if (o.include_input)
    for (std::size_t k = 0; k < x.size(); ++k) coords.emplace_back(params.size(), k);
  if (o.sample > 0 && o.sample < coords.size()) {
    SeededRng rng(o.sample_seed);
    rng.shuffle(coords);
    coords.resize(o.sample);
  }
  auto slot = [&](std::size_t s) -> Tensor& {
    return s == params.size() ? x : *params[s];
  };
  auto analytic_at = [&](std::size_t s, std::size_t k) {
    Probe e = evaluate(graph, x, target, ignore, o, snap, true);
    Gradients g = backward_from(graph, e.cache, e.seed_node, e.grad_seed);
    return s == params.size() ? g.input[k] : g.params[s][k];
  };

  Probe base = evaluate(graph, x, target, ignore, o, snap, true);
  const Gradients grads = backward_from(graph, base.cache, base.seed_node,
                                        base.grad_seed);
  base.cache = {};

  GradCheckResult res;
  for (auto [s, k] : coords) {
    Tensor& t = slot(s);
    const double origin = t[k];
    double analytic = s == params.size() ? grads.input[k] : grads.params[s][k];
    std::vector<std::uint8_t> ref = base.fingerprint;
    bool ok = false;
    for (int attempt = 0; attempt <= o.max_nudges; ++attempt) {
      if (attempt > 0) {
        // +1, -1, +2, -2, ... times the nudge.
        const double mag = o.nudge * ((attempt + 1) / 2);
        t[k] = origin + (attempt % 2 == 1 ? mag : -mag);
        ref = evaluate(graph, x, target, ignore, o, snap, false).fingerprint;
        analytic = analytic_at(s, k);
      }
      const double centre = t[k];
      t[k] = centre + o.step;
      const Probe plus = evaluate(graph, x, target, ignore, o, snap, false);
      t[k] = centre - o.step;
      const Probe minus = evaluate(graph, x, target, ignore, o, snap, false);
      t[k] = centre;
      if (plus.fingerprint != ref || minus.fingerprint != ref) continue;
      const double numeric = (plus.loss - minus.loss) / (2.0 * o.step);
      const double err = rel_error(analytic, numeric, o.floor);
      if (err > res.max_relative_error || res.checked == 0) {
        res.max_relative_error = std::max(res.max_relative_error, err);
        res.worst = (s == params.size() ? std::string("input") : names[s]) + "[" +
                    std::to_string(k) + "]";
      }
      ++res.checked;
      if (attempt > 0) ++res.nudged;
      ok = true;
      break;
    }
    t[k] = origin;
    if (!ok) ++res.skipped;
  }
  return res;
}

}  // namespace terraseg::train

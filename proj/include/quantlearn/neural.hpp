// SPDX-License-Identifier: Apache-2.0
//
// Stacked LSTM sequence classifier: per-timestep linear projection, a stack
// of LSTM layers, and a softmax head on the final top-layer hidden state.
// Gradients are exact, by backpropagation through every timestep and layer.
//
// Sequences are column-major: one column per timestep. A batch keeps all
// timesteps in one matrix so that input-side products run as a single GEMM;
// only the recurrent product is done step by step.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "quantlearn/rng.hpp"

namespace quantlearn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct NetConfig {
  int input_width = 14;
  int embed_width = 8;
  int hidden_width = 8;
  int num_layers = 2;
  int num_classes = 2;
  std::uint64_t seed = 0;

  void validate() const {
    if (input_width < 1 || embed_width < 1 || hidden_width < 1 || num_layers < 1) {
      throw std::invalid_argument("network widths and depth must be >= 1");
    }
    if (num_classes != 2) throw std::invalid_argument("num_classes must be 2");
  }
  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

struct TrainConfig {
  int batch_size = 8;
  int total_steps = 3001;
  int eval_every = 50;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool shuffle_each_epoch = true;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
    if (total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  }
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gate weights act on [layer input ; previous hidden state].
template <typename Scalar>
struct LstmLayerParams {
  Matrix<Scalar> wi, wf, wc, wo;
  Vector<Scalar> bi, bf, bc, bo;
};

/// Calls fn(name, tensor_0, tensor_1, ...) for each parameter tensor, walking
/// several identically shaped parameter sets in lockstep. Names follow the
/// checkpoint keys: proj.w, proj.b, lstm.<l>.{wi,wf,wc,wo,bi,bf,bc,bo}, head.w, head.b.
template <typename Fn, typename First, typename... Rest>
void visit_tensors(Fn&& fn, First& first, Rest&... rest) {
  fn(std::string_view("proj.w"), first.proj_w, rest.proj_w...);
  fn(std::string_view("proj.b"), first.proj_b, rest.proj_b...);
  for (std::size_t l = 0; l < first.layers.size(); ++l) {
    const std::string p = "lstm." + std::to_string(l) + ".";
    fn(std::string_view(p + "wi"), first.layers[l].wi, rest.layers[l].wi...);
    fn(std::string_view(p + "wf"), first.layers[l].wf, rest.layers[l].wf...);
    fn(std::string_view(p + "wc"), first.layers[l].wc, rest.layers[l].wc...);
    fn(std::string_view(p + "wo"), first.layers[l].wo, rest.layers[l].wo...);
    fn(std::string_view(p + "bi"), first.layers[l].bi, rest.layers[l].bi...);
    fn(std::string_view(p + "bf"), first.layers[l].bf, rest.layers[l].bf...);
    fn(std::string_view(p + "bc"), first.layers[l].bc, rest.layers[l].bc...);
    fn(std::string_view(p + "bo"), first.layers[l].bo, rest.layers[l].bo...);
  }
  fn(std::string_view("head.w"), first.head_w, rest.head_w...);
  fn(std::string_view("head.b"), first.head_b, rest.head_b...);
}

template <typename Scalar>
struct ModelParams {
  Matrix<Scalar> proj_w;
  Vector<Scalar> proj_b;
  std::vector<LstmLayerParams<Scalar>> layers;
  Matrix<Scalar> head_w;
  Vector<Scalar> head_b;

  /// Correctly shaped, all-zero parameters.
  static ModelParams zeros(const NetConfig& cfg) {
    cfg.validate();
    ModelParams p;
    p.proj_w = Matrix<Scalar>::Zero(cfg.embed_width, cfg.input_width);
    p.proj_b = Vector<Scalar>::Zero(cfg.embed_width);
    const int h = cfg.hidden_width;
    for (int l = 0; l < cfg.num_layers; ++l) {
      const int in = (l == 0 ? cfg.embed_width : h) + h;
      LstmLayerParams<Scalar> layer;
      for (auto* w : {&layer.wi, &layer.wf, &layer.wc, &layer.wo}) *w = Matrix<Scalar>::Zero(h, in);
      for (auto* b : {&layer.bi, &layer.bf, &layer.bc, &layer.bo}) *b = Vector<Scalar>::Zero(h);
      p.layers.push_back(std::move(layer));
    }
    p.head_w = Matrix<Scalar>::Zero(cfg.num_classes, h);
    p.head_b = Vector<Scalar>::Zero(cfg.num_classes);
    return p;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    visit_tensors([&](std::string_view, const auto& t) { n += static_cast<std::size_t>(t.size()); },
                  *this);
    return n;
  }

  bool all_finite() const {
    bool ok = true;
    visit_tensors([&](std::string_view, const auto& t) { ok = ok && t.allFinite(); }, *this);
    return ok;
  }

  template <typename NewScalar>
  ModelParams<NewScalar> cast() const {
    ModelParams<NewScalar> out;
    out.proj_w = proj_w.template cast<NewScalar>();
    out.proj_b = proj_b.template cast<NewScalar>();
    for (const auto& l : layers) {
      out.layers.push_back({l.wi.template cast<NewScalar>(), l.wf.template cast<NewScalar>(),
                            l.wc.template cast<NewScalar>(), l.wo.template cast<NewScalar>(),
                            l.bi.template cast<NewScalar>(), l.bf.template cast<NewScalar>(),
                            l.bc.template cast<NewScalar>(), l.bo.template cast<NewScalar>()});
    }
    out.head_w = head_w.template cast<NewScalar>();
    out.head_b = head_b.template cast<NewScalar>();
    return out;
  }
};

/// Uniform(-r, r) weights with r = sqrt(6 / (fan_in + fan_out)); zero biases
/// except forget-gate biases, which start at 1.
template <typename Scalar = double>
ModelParams<Scalar> init_params(const NetConfig& cfg) {
  auto p = ModelParams<Scalar>::zeros(cfg);
  Rng rng(cfg.seed);
  auto fill = [&](Matrix<Scalar>& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<Scalar>(rng.uniform(-limit, limit));
    }
  };
  fill(p.proj_w);
  for (auto& l : p.layers) {
    fill(l.wi);
    fill(l.wf);
    fill(l.wc);
    fill(l.wo);
    l.bf.setOnes();
  }
  fill(p.head_w);
  return p;
}

/// A batch of equal-length sequences. Column t * batch + b of `x` is the input
/// of sequence b at timestep t, so each timestep is a contiguous column block.
template <typename Scalar>
struct SequenceBatch {
  Matrix<Scalar> x;
  Eigen::Index steps = 0;
  Eigen::Index batch = 0;

  auto at(Eigen::Index t) const { return x.middleCols(t * batch, batch); }
};

template <typename Scalar>
struct LayerTape {
  // Same column layout as SequenceBatch. `gates` stacks the activated
  // input, forget, candidate and output gates (4 * hidden rows).
  Matrix<Scalar> gates, c, tanh_c, h;
};

template <typename Scalar>
struct ForwardTape {
  SequenceBatch<Scalar> input;
  Matrix<Scalar> embed;
  std::vector<LayerTape<Scalar>> layers;
  Matrix<Scalar> logits;
  Matrix<Scalar> probs;  // num_classes x batch
};

namespace detail {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& a) {
  using S = typename Derived::Scalar;
  return (S(1) + (-a).exp()).inverse();
}

template <typename Scalar>
Matrix<Scalar> softmax_columns(const Matrix<Scalar>& logits) {
  Matrix<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const Scalar mx = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - mx).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

/// Gate weights stacked as [wi; wf; wc; wo], split into input and recurrent parts.
template <typename Scalar>
struct FusedLayer {
  Matrix<Scalar> wx, wh;
  Vector<Scalar> b;

  explicit FusedLayer(const LstmLayerParams<Scalar>& p) {
    const Eigen::Index h = p.wi.rows();
    const Eigen::Index in = p.wi.cols() - h;
    wx.resize(4 * h, in);
    wh.resize(4 * h, h);
    b.resize(4 * h);
    Eigen::Index r = 0;
    for (const auto* w : {&p.wi, &p.wf, &p.wc, &p.wo}) {
      wx.middleRows(r, h) = w->leftCols(in);
      wh.middleRows(r, h) = w->rightCols(h);
      r += h;
    }
    b << p.bi, p.bf, p.bc, p.bo;
  }
};

}  // namespace detail

/// Packs sequences (width x T each, equal shapes) into a batch.
template <typename Scalar, typename Seq>
SequenceBatch<Scalar> pack_batch(std::span<const Seq> seqs) {
  SequenceBatch<Scalar> out;
  if (seqs.empty()) return out;
  const Eigen::Index width = seqs.front().rows();
  out.steps = seqs.front().cols();
  out.batch = static_cast<Eigen::Index>(seqs.size());
  out.x.resize(width, out.steps * out.batch);
  for (Eigen::Index b = 0; b < out.batch; ++b) {
    const auto& s = seqs[static_cast<std::size_t>(b)];
    if (s.rows() != width || s.cols() != out.steps) {
      throw std::invalid_argument("sequences in a batch must share one shape");
    }
    for (Eigen::Index t = 0; t < out.steps; ++t) out.x.col(t * out.batch + b) = s.col(t).template cast<Scalar>();
  }
  return out;
}

template <typename Scalar>
ForwardTape<Scalar> forward_batch(const ModelParams<Scalar>& p, SequenceBatch<Scalar> input) {
  if (input.steps < 1 || input.batch < 1) throw std::invalid_argument("forward: empty sequence batch");
  if (input.x.rows() != p.proj_w.cols()) throw std::invalid_argument("forward: input width mismatch");
  const Eigen::Index steps = input.steps;
  const Eigen::Index batch = input.batch;
  ForwardTape<Scalar> tape;
  tape.embed = (p.proj_w * input.x).colwise() + p.proj_b;
  tape.input = std::move(input);

  const Matrix<Scalar>* below = &tape.embed;
  tape.layers.resize(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const detail::FusedLayer<Scalar> w(p.layers[l]);
    auto& lt = tape.layers[l];
    const Eigen::Index h = w.wh.cols();
    lt.gates = (w.wx * *below).colwise() + w.b;
    lt.c.resize(h, steps * batch);
    lt.tanh_c.resize(h, steps * batch);
    lt.h.resize(h, steps * batch);
    for (Eigen::Index t = 0; t < steps; ++t) {
      auto gates = lt.gates.middleCols(t * batch, batch);
      if (t > 0) gates.noalias() += w.wh * lt.h.middleCols((t - 1) * batch, batch);
      gates.topRows(2 * h) = detail::sigmoid(gates.topRows(2 * h).array()).matrix();
      gates.middleRows(2 * h, h) = gates.middleRows(2 * h, h).array().tanh().matrix();
      gates.bottomRows(h) = detail::sigmoid(gates.bottomRows(h).array()).matrix();
      auto c = lt.c.middleCols(t * batch, batch);
      c = (gates.topRows(h).array() * gates.middleRows(2 * h, h).array()).matrix();
      if (t > 0) c.array() += gates.middleRows(h, h).array() * lt.c.middleCols((t - 1) * batch, batch).array();
      lt.tanh_c.middleCols(t * batch, batch) = c.array().tanh().matrix();
      lt.h.middleCols(t * batch, batch) =
          (gates.bottomRows(h).array() * lt.tanh_c.middleCols(t * batch, batch).array()).matrix();
    }
    below = &lt.h;
  }

  tape.logits = (p.head_w * below->rightCols(batch)).colwise() + p.head_b;
  if (!tape.logits.allFinite()) throw NumericError("forward: non-finite activation");
  tape.probs = detail::softmax_columns(tape.logits);
  return tape;
}

/// Class probabilities for a single (width x T) sequence.
template <typename Scalar, typename Derived>
Vector<Scalar> forward(const ModelParams<Scalar>& p, const Eigen::MatrixBase<Derived>& seq) {
  SequenceBatch<Scalar> in{seq.template cast<Scalar>(), seq.cols(), 1};
  return forward_batch(p, std::move(in)).probs.col(0);
}

template <typename Scalar>
struct LossAndGrads {
  Scalar loss;
  ModelParams<Scalar> grads;
};

/// Mean cross-entropy of `labels` under the tape's probabilities.
template <typename Scalar>
Scalar cross_entropy(const ForwardTape<Scalar>& tape, std::span<const int> labels) {
  Scalar loss = 0;
  for (Eigen::Index b = 0; b < tape.logits.cols(); ++b) {
    const auto col = tape.logits.col(b);
    const Scalar mx = col.maxCoeff();
    const Scalar lse = mx + std::log((col.array() - mx).exp().sum());
    loss += lse - col(labels[static_cast<std::size_t>(b)]);
  }
  return loss / static_cast<Scalar>(tape.logits.cols());
}

/// Exact gradient of the mean cross-entropy by backpropagation through time.
template <typename Scalar>
LossAndGrads<Scalar> backward(const ModelParams<Scalar>& p, const ForwardTape<Scalar>& tape,
                              std::span<const int> labels) {
  const Eigen::Index batch = tape.input.batch;
  const Eigen::Index steps = tape.input.steps;
  if (static_cast<Eigen::Index>(labels.size()) != batch) {
    throw std::invalid_argument("backward: label count does not match batch");
  }
  for (int y : labels) {
    if (y < 0 || y >= tape.probs.rows()) throw std::invalid_argument("backward: label out of range");
  }
  LossAndGrads<Scalar> out{cross_entropy(tape, labels), ModelParams<Scalar>{}};
  auto& g = out.grads;

  Matrix<Scalar> dlogits = tape.probs;
  for (Eigen::Index b = 0; b < batch; ++b) dlogits(labels[static_cast<std::size_t>(b)], b) -= Scalar(1);
  dlogits /= static_cast<Scalar>(batch);

  const auto& top = tape.layers.back();
  g.head_w = dlogits * top.h.rightCols(batch).transpose();
  g.head_b = dlogits.rowwise().sum();

  // Gradient reaching each layer's outputs from above, same layout as the tape.
  Matrix<Scalar> d_out = Matrix<Scalar>::Zero(top.h.rows(), steps * batch);
  d_out.rightCols(batch) = p.head_w.transpose() * dlogits;

  g.layers.resize(p.layers.size());
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    const detail::FusedLayer<Scalar> w(p.layers[l]);
    const auto& lt = tape.layers[l];
    const Matrix<Scalar>& inputs = l == 0 ? tape.embed : tape.layers[l - 1].h;
    const Eigen::Index h = w.wh.cols();

    Matrix<Scalar> da(4 * h, steps * batch);  // gate pre-activation gradients
    Matrix<Scalar> dh_next = Matrix<Scalar>::Zero(h, batch);
    Matrix<Scalar> dc_next = Matrix<Scalar>::Zero(h, batch);
    for (Eigen::Index t = steps; t-- > 0;) {
      const auto gates = lt.gates.middleCols(t * batch, batch).array();
      const auto i = gates.topRows(h);
      const auto f = gates.middleRows(h, h);
      const auto gg = gates.middleRows(2 * h, h);
      const auto o = gates.bottomRows(h);
      const auto tc = lt.tanh_c.middleCols(t * batch, batch).array();
      const Matrix<Scalar> dh = d_out.middleCols(t * batch, batch) + dh_next;

      const Matrix<Scalar> dc = (dh.array() * o * (Scalar(1) - tc.square()) + dc_next.array()).matrix();
      auto dat = da.middleCols(t * batch, batch);
      dat.topRows(h) = (dc.array() * gg * i * (Scalar(1) - i)).matrix();
      if (t > 0) {
        dat.middleRows(h, h) =
            (dc.array() * lt.c.middleCols((t - 1) * batch, batch).array() * f * (Scalar(1) - f)).matrix();
      } else {
        dat.middleRows(h, h).setZero();
      }
      dat.middleRows(2 * h, h) = (dc.array() * i * (Scalar(1) - gg.square())).matrix();
      dat.bottomRows(h) = (dh.array() * tc * o * (Scalar(1) - o)).matrix();
      dc_next = (dc.array() * f).matrix();
      dh_next.noalias() = w.wh.transpose() * dat;
    }

    const Matrix<Scalar> gwx = da * inputs.transpose();
    Matrix<Scalar> gwh = Matrix<Scalar>::Zero(4 * h, h);
    if (steps > 1) {
      gwh.noalias() = da.rightCols((steps - 1) * batch) * lt.h.leftCols((steps - 1) * batch).transpose();
    }
    const Vector<Scalar> gb = da.rowwise().sum();
    auto& gl = g.layers[l];
    Eigen::Index r = 0;
    for (auto [gw, gbias] : {std::pair{&gl.wi, &gl.bi}, std::pair{&gl.wf, &gl.bf},
                             std::pair{&gl.wc, &gl.bc}, std::pair{&gl.wo, &gl.bo}}) {
      gw->resize(h, gwx.cols() + h);
      gw->leftCols(gwx.cols()) = gwx.middleRows(r, h);
      gw->rightCols(h) = gwh.middleRows(r, h);
      *gbias = gb.segment(r, h);
      r += h;
    }
    d_out = w.wx.transpose() * da;
  }

  g.proj_w = d_out * tape.input.x.transpose();
  g.proj_b = d_out.rowwise().sum();

  if (!std::isfinite(static_cast<double>(out.loss)) || !g.all_finite()) {
    throw NumericError("non-finite loss or gradient");
  }
  return out;
}

template <typename Scalar>
LossAndGrads<Scalar> loss_and_gradients(const ModelParams<Scalar>& p, SequenceBatch<Scalar> batch,
                                        std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  const auto tape = forward_batch(p, std::move(batch));
  return backward(p, tape, labels);
}

/// Adaptive-moment optimizer state: first and second moment estimates plus step count.
template <typename Scalar>
struct AdamState {
  ModelParams<Scalar> m;
  ModelParams<Scalar> v;
  long step = 0;

  static AdamState like(const ModelParams<Scalar>& p) {
    AdamState s{p, p, 0};
    visit_tensors([](std::string_view, auto& a, auto& b) { a.setZero(); b.setZero(); }, s.m, s.v);
    return s;
  }
};

/// One bias-corrected adaptive-moment update, in place.
template <typename Scalar>
void optimizer_step(AdamState<Scalar>& state, ModelParams<Scalar>& params,
                    const ModelParams<Scalar>& grads, const TrainConfig& cfg) {
  ++state.step;
  const Scalar b1 = static_cast<Scalar>(cfg.beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.beta2);
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.epsilon);
  const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
  visit_tensors(
      [&](std::string_view, auto& p, const auto& gr, auto& m, auto& v) {
        if (p.rows() != gr.rows() || p.cols() != gr.cols()) {
          throw std::invalid_argument("optimizer_step: gradient shape mismatch");
        }
        m = b1 * m + (Scalar(1) - b1) * gr;
        v = (b2 * v.array() + (Scalar(1) - b2) * gr.array().square()).matrix();
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
      },
      params, grads, state.m, state.v);
}

}  // namespace quantlearn

#ifndef PUNCT_TAGGER_H_
#define PUNCT_TAGGER_H_

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "punct/error.h"
#include "punct/labels.h"
#include "punct/random.h"
#include "punct/tokenizer.h"

namespace punct {

// Per-position class scores, indexed by label id (EMPTY, PERIOD, COMMA,
// QUESTION).
using Logits = Eigen::Matrix<double, 4, 1>;

// Anything that scores every position of an encoded sequence: the trainable
// context-window model, or logits replayed from an outside model.
class TaggerBackend {
 public:
  virtual ~TaggerBackend() = default;
  // Must return exactly seq.size() finite vectors.
  virtual std::vector<Logits> logits(const EncodedSequence& seq) = 0;
};

// Argmax with ties resolved toward the lowest label id.
template <typename Derived>
PunctClass argmax_class(const Eigen::MatrixBase<Derived>& v) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (v(c) > v(best)) best = c;
  }
  return class_from_id(best);
}

// Root-token prediction: one class per word of `seq`.
std::vector<PunctClass> predict(TaggerBackend& backend,
                                const EncodedSequence& seq);
// Same, from logits already obtained from a backend.
std::vector<PunctClass> predict_from_logits(const EncodedSequence& seq,
                                            const std::vector<Logits>& z);

// ---------------------------------------------------------------------------
// Context-window model

// Hashed ids for (offset, piece) over offsets -radius..radius, one boundary
// feature for every offset that falls outside `tokens`, and a bias feature.
// Always 2 * radius + 2 ids; duplicates are possible under hashing.
std::vector<std::uint32_t> featurize(std::span<const std::string> tokens,
                                     std::size_t position, int radius,
                                     std::uint32_t dim);

void validate_window(int radius, std::uint32_t dim);

template <typename Scalar>
struct ContextWindowModel {
  using Weights = Eigen::Matrix<Scalar, 4, Eigen::Dynamic>;
  using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

  Weights weights;  // 4 x dim, rows in label-id order
  Vector4 bias;
  int radius = 2;
  std::uint32_t dim = 1u << 16;
  std::uint64_t seed = 0;

  static ContextWindowModel zeros(int radius, std::uint32_t dim,
                                  std::uint64_t seed = 0) {
    validate_window(radius, dim);
    ContextWindowModel m;
    m.weights = Weights::Zero(4, dim);
    m.bias = Vector4::Zero();
    m.radius = radius;
    m.dim = dim;
    m.seed = seed;
    return m;
  }

  bool all_finite() const {
    return weights.allFinite() && bias.allFinite();
  }
};

template <typename Scalar>
typename ContextWindowModel<Scalar>::Vector4 forward(
    const ContextWindowModel<Scalar>& model,
    std::span<const std::uint32_t> features) {
  typename ContextWindowModel<Scalar>::Vector4 z = model.bias;
  for (std::uint32_t f : features) z += model.weights.col(f);
  return z;
}

// Max-subtracted softmax.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 4, 1> softmax(
    const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, 4, 1> e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

template <typename Scalar>
struct Gradient {
  typename ContextWindowModel<Scalar>::Weights weights;
  typename ContextWindowModel<Scalar>::Vector4 bias;
};

template <typename Scalar>
struct LossAndGrad {
  Scalar loss = 0;
  Gradient<Scalar> grad;
  std::size_t scored = 0;  // unmasked positions in the batch
};

// Feature ids for every scored position of a sequence, cached for training.
struct FeaturizedSequence {
  std::vector<std::vector<std::uint32_t>> features;
  std::vector<int> labels;
};
FeaturizedSequence featurize_sequence(const EncodedSequence& seq, int radius,
                                      std::uint32_t dim);

using ClassWeights = std::array<double, 4>;
inline constexpr ClassWeights kUnitClassWeights = {1.0, 1.0, 1.0, 1.0};

// Weighted mean cross-entropy over scored positions:
//   sum_i w[y_i] * -log softmax(z_i)[y_i] / sum_i w[y_i].
// A batch with nothing scored has loss 0 and a zero gradient.
template <typename Scalar>
LossAndGrad<Scalar> loss_and_grad(
    const ContextWindowModel<Scalar>& model,
    std::span<const FeaturizedSequence> batch,
    const ClassWeights& class_weights = kUnitClassWeights) {
  using Vector4 = typename ContextWindowModel<Scalar>::Vector4;
  LossAndGrad<Scalar> out;
  out.grad.weights.setZero(4, model.dim);
  out.grad.bias.setZero();
  Scalar total_weight = 0;
  for (const auto& seq : batch) {
    for (std::size_t i = 0; i < seq.labels.size(); ++i) {
      const int y = seq.labels[i];
      const Scalar w = static_cast<Scalar>(class_weights[y]);
      const auto& feats = seq.features[i];
      const Vector4 z = forward(model, std::span<const std::uint32_t>(feats));
      const Scalar zmax = z.maxCoeff();
      const Scalar log_norm = zmax + std::log((z.array() - zmax).exp().sum());
      out.loss += w * (log_norm - z(y));
      Vector4 delta = (z.array() - log_norm).exp().matrix();
      delta(y) -= Scalar(1);
      delta *= w;
      out.grad.bias += delta;
      for (std::uint32_t f : feats) out.grad.weights.col(f) += delta;
      total_weight += w;
      ++out.scored;
    }
  }
  if (out.scored > 0 && total_weight > 0) {
    out.loss /= total_weight;
    out.grad.weights /= total_weight;
    out.grad.bias /= total_weight;
  }
  return out;
}

template <typename Scalar>
LossAndGrad<Scalar> loss_and_grad(
    const ContextWindowModel<Scalar>& model,
    std::span<const EncodedSequence> batch,
    const ClassWeights& class_weights = kUnitClassWeights) {
  std::vector<FeaturizedSequence> feats;
  feats.reserve(batch.size());
  for (const auto& s : batch) {
    feats.push_back(featurize_sequence(s, model.radius, model.dim));
  }
  return loss_and_grad(model, std::span<const FeaturizedSequence>(feats),
                       class_weights);
}

struct TrainingConfig {
  double learning_rate = 0.5;
  int epochs = 10;
  std::size_t batch_size = 4;
  std::uint64_t seed = 0;
  double momentum = 0.9;
  ClassWeights class_weights = kUnitClassWeights;

  void validate() const;
};

template <typename Scalar>
struct TrainResult {
  ContextWindowModel<Scalar> model;
  // Mean loss over the whole set before any update.
  double initial_loss = 0;
  // Mean loss of the batches seen during each epoch.
  std::vector<double> epoch_loss;
  std::vector<std::string> warnings;
};

// Mini-batch SGD with optional momentum. Batch order is reshuffled each epoch
// from a generator seeded once with cfg.seed.
template <typename Scalar>
TrainResult<Scalar> train(ContextWindowModel<Scalar> model,
                          std::span<const EncodedSequence> data,
                          const TrainingConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw ArgumentError("train: empty dataset");

  TrainResult<Scalar> result;
  std::vector<FeaturizedSequence> feats;
  feats.reserve(data.size());
  for (const auto& s : data) {
    feats.push_back(featurize_sequence(s, model.radius, model.dim));
  }

  {
    const auto full = loss_and_grad(
        model, std::span<const FeaturizedSequence>(feats), cfg.class_weights);
    result.initial_loss = static_cast<double>(full.loss);
    if (full.scored == 0) {
      result.warnings.push_back("training data has no scored positions");
    }
  }

  Generator gen(cfg.seed);
  std::vector<std::size_t> order(feats.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  typename ContextWindowModel<Scalar>::Weights vel_w;
  typename ContextWindowModel<Scalar>::Vector4 vel_b;
  vel_w.setZero(4, model.dim);
  vel_b.setZero();
  const auto lr = static_cast<Scalar>(cfg.learning_rate);
  const auto mu = static_cast<Scalar>(cfg.momentum);

  std::vector<FeaturizedSequence> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    seeded_shuffle(order.begin(), order.end(), gen);
    double sum = 0;
    std::size_t scored = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(feats[order[i]]);
      auto lg = loss_and_grad(
          model, std::span<const FeaturizedSequence>(batch), cfg.class_weights);
      if (!std::isfinite(static_cast<double>(lg.loss))) {
        throw TrainingError(
            "non-finite loss at epoch " + std::to_string(epoch + 1) +
            ", batch starting at " + std::to_string(start) +
            "; learning rate " + std::to_string(cfg.learning_rate) +
            " is probably too high");
      }
      if (lg.scored == 0) continue;
      sum += static_cast<double>(lg.loss) * static_cast<double>(lg.scored);
      scored += lg.scored;
      vel_w = mu * vel_w - lr * lg.grad.weights;
      vel_b = mu * vel_b - lr * lg.grad.bias;
      model.weights += vel_w;
      model.bias += vel_b;
    }
    if (!model.all_finite()) {
      throw TrainingError("weights became non-finite at epoch " +
                          std::to_string(epoch + 1) +
                          "; lower the learning rate");
    }
    result.epoch_loss.push_back(scored > 0 ? sum / scored : 0.0);
  }
  result.model = std::move(model);
  return result;
}

// Serves the model's logits; positions past [SEP] get zeros.
template <typename Scalar>
class ContextWindowBackend : public TaggerBackend {
 public:
  explicit ContextWindowBackend(const ContextWindowModel<Scalar>& model)
      : model_(model) {}

  std::vector<Logits> logits(const EncodedSequence& seq) override {
    std::vector<Logits> out(seq.size(), Logits::Zero());
    const std::size_t n = seq.active_length();
    const std::span<const std::string> active(seq.tokens.data(), n);
    for (std::size_t p = 0; p < n; ++p) {
      const auto feats = featurize(active, p, model_.radius, model_.dim);
      out[p] = forward(model_, std::span<const std::uint32_t>(feats))
                   .template cast<double>();
    }
    return out;
  }

 private:
  const ContextWindowModel<Scalar>& model_;
};

// Model file (text, version 1):
//   punct-context-window-model 1
//   radius <r>
//   dim <F>
//   seed <s>
//   bias <b0> <b1> <b2> <b3>
//   columns <n>
//   <feature id> <w0> <w1> <w2> <w3>     (n lines, non-zero columns only)
// Reals are C99 hex floats so the file round-trips bit for bit.
void write_model(std::ostream& out, const ContextWindowModel<double>& model);
ContextWindowModel<double> read_model(std::istream& in);
void save_model(const std::filesystem::path& path,
                const ContextWindowModel<double>& model);
ContextWindowModel<double> load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Logit replay

// One row of a logit file.
struct LogitRecord {
  std::string token;
  Logits logits;  // label-id order after loading
};

// JSON Lines: a header {"order": [...]} naming the column order, then
// {"t": token, "l": [4 reals]} for every non-special piece of every sequence.
class LogitReplay : public TaggerBackend {
 public:
  static LogitReplay read(std::istream& in);
  static LogitReplay load(const std::filesystem::path& path);
  explicit LogitReplay(std::vector<LogitRecord> records)
      : records_(std::move(records)) {}

  // Consumes one record per piece between [CLS] and [SEP]; throws
  // AlignmentError when a record's token differs from the piece.
  std::vector<Logits> logits(const EncodedSequence& seq) override;

  std::size_t remaining() const { return records_.size() - cursor_; }
  const std::vector<LogitRecord>& records() const { return records_; }

 private:
  std::vector<LogitRecord> records_;
  std::size_t cursor_ = 0;
};

void write_logit_header(std::ostream& out);
// Writes the backend's logits for the pieces between [CLS] and [SEP].
void export_logits(std::ostream& out, const EncodedSequence& seq,
                   const std::vector<Logits>& logits);

}  // namespace punct

#endif  // PUNCT_TAGGER_H_

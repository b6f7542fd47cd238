#ifndef PUNCT_EVAL_H_
#define PUNCT_EVAL_H_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "punct/batcher.h"
#include "punct/error.h"
#include "punct/labels.h"

namespace punct {

using CountMatrix4 = Eigen::Matrix<std::int64_t, 4, 4>;

// Rows are predicted classes, columns true classes, both in kMatrixOrder
// (PERIOD, COMMA, QUESTION, EMPTY).
struct ConfusionMatrix4 {
  CountMatrix4 counts = CountMatrix4::Zero();

  std::int64_t& at(PunctClass predicted, PunctClass truth) {
    return counts(matrix_index(predicted), matrix_index(truth));
  }
  std::int64_t at(PunctClass predicted, PunctClass truth) const {
    return counts(matrix_index(predicted), matrix_index(truth));
  }
  std::int64_t total() const { return counts.sum(); }
  std::int64_t true_positives(PunctClass c) const { return at(c, c); }
  // Row sum: everything predicted as c.
  std::int64_t predicted(PunctClass c) const {
    return counts.row(matrix_index(c)).sum();
  }
  // Column sum: everything whose true class is c.
  std::int64_t actual(PunctClass c) const {
    return counts.col(matrix_index(c)).sum();
  }

  ConfusionMatrix4& operator+=(const ConfusionMatrix4& o) {
    counts += o.counts;
    return *this;
  }
  friend ConfusionMatrix4 operator+(ConfusionMatrix4 a,
                                    const ConfusionMatrix4& b) {
    return a += b;
  }
  friend bool operator==(const ConfusionMatrix4& a, const ConfusionMatrix4& b) {
    return a.counts == b.counts;
  }

  static ConfusionMatrix4 from_rows(
      const std::array<std::array<std::int64_t, 4>, 4>& rows);
};

template <typename Scalar = double>
struct ClassMetrics {
  Scalar precision = 0;
  Scalar recall = 0;
  Scalar f1 = 0;
  // Some ratio was 0/0 and reported as 0.
  bool undefined = false;
};

template <typename Scalar = double>
struct MacroMetrics {
  Scalar precision = 0;
  Scalar recall = 0;
  Scalar f1 = 0;
};

template <typename Scalar = double>
struct EvalReport {
  std::array<ClassMetrics<Scalar>, 4> per_class;  // kMatrixOrder
  Scalar accuracy = 0;
  MacroMetrics<Scalar> macro_punct;  // PERIOD, COMMA, QUESTION
  MacroMetrics<Scalar> macro_all;    // all four classes

  const ClassMetrics<Scalar>& of(PunctClass c) const {
    return per_class[matrix_index(c)];
  }
};

// Harmonic mean with 0 when precision + recall is 0.
template <typename Scalar>
Scalar f1_score(Scalar precision, Scalar recall) {
  const Scalar s = precision + recall;
  return s > 0 ? Scalar(2) * precision * recall / s : Scalar(0);
}

ConfusionMatrix4 confusion(std::span<const PunctClass> gold,
                           std::span<const PunctClass> pred);

template <typename Scalar = double>
EvalReport<Scalar> metrics(const ConfusionMatrix4& m) {
  const std::int64_t total = m.total();
  if (total <= 0) {
    throw ArgumentError("metrics are undefined for an empty confusion matrix");
  }
  EvalReport<Scalar> r;
  auto ratio = [](std::int64_t num, std::int64_t den, bool* undefined) {
    if (den == 0) {
      *undefined = true;
      return Scalar(0);
    }
    return static_cast<Scalar>(num) / static_cast<Scalar>(den);
  };
  for (int i = 0; i < 4; ++i) {
    const PunctClass c = kMatrixOrder[i];
    auto& cm = r.per_class[i];
    const std::int64_t tp = m.true_positives(c);
    cm.precision = ratio(tp, m.predicted(c), &cm.undefined);
    cm.recall = ratio(tp, m.actual(c), &cm.undefined);
    cm.f1 = f1_score(cm.precision, cm.recall);
  }
  r.accuracy = static_cast<Scalar>(m.counts.trace()) /
               static_cast<Scalar>(total);
  for (int i = 0; i < 4; ++i) {
    const auto& cm = r.per_class[i];
    r.macro_all.precision += cm.precision / Scalar(4);
    r.macro_all.recall += cm.recall / Scalar(4);
    r.macro_all.f1 += cm.f1 / Scalar(4);
  }
  for (PunctClass c : kPunctuationClasses) {
    const auto& cm = r.of(c);
    r.macro_punct.precision += cm.precision / Scalar(3);
    r.macro_punct.recall += cm.recall / Scalar(3);
    r.macro_punct.f1 += cm.f1 / Scalar(3);
  }
  return r;
}

struct EmptyBalance {
  std::int64_t fp_empty = 0;  // predicted EMPTY, truly something else
  std::int64_t fn_empty = 0;  // truly EMPTY, predicted something else
};
EmptyBalance empty_balance(const ConfusionMatrix4& m);

// Confusion matrix with the given word positions left out of scoring.
ConfusionMatrix4 debias_batch_final(std::span<const PunctClass> gold,
                                    std::span<const PunctClass> pred,
                                    std::span<const std::size_t> excluded);
ConfusionMatrix4 debias_batch_final(std::span<const PunctClass> gold,
                                    std::span<const PunctClass> pred,
                                    std::span<const TrivialFinal> finals);

// Percent with one decimal, rounded half away from zero.
double round_percent(double fraction);
std::string format_percent(double fraction);

// 4 x 4 grid with row/column headers in kMatrixOrder.
std::string format_matrix(const ConfusionMatrix4& m);
// Accepts format_matrix output, four lines of four integers, or a nested
// list; row labels and header lines are skipped.
ConfusionMatrix4 parse_matrix(std::istream& in);

struct ResultsRow {
  std::string name;
  EvalReport<double> report;
};
// Columns Comma, Period, Question, Overall (macro over the three), each P R F1.
std::string format_results_table(const std::vector<ResultsRow>& rows);

struct EvalSummary {
  ConfusionMatrix4 matrix;
  EvalReport<double> report;
  std::optional<ConfusionMatrix4> debiased_matrix;
  std::optional<EvalReport<double>> debiased;
};

// Text report: results table, per-class block with macro_all, matrices,
// EMPTY balance.
std::string format_report(const EvalSummary& s);
// Raw counts plus unrounded metrics.
std::string report_json(const EvalSummary& s);

}  // namespace punct

#endif  // PUNCT_EVAL_H_

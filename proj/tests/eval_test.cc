#include "punct/eval.h"

#include <random>
#include <sstream>

#include "doctest.h"
#include "published_values.h"

using namespace punct;
using testdata::kHumanMatrix;

namespace {

constexpr PunctClass P = PunctClass::kPeriod;
constexpr PunctClass C = PunctClass::kComma;
constexpr PunctClass Q = PunctClass::kQuestion;
constexpr PunctClass E = PunctClass::kEmpty;

// Matrix with prescribed EMPTY off-diagonals and a busy interior.
ConfusionMatrix4 balance_matrix() {
  using testdata::kEmptyColOff;
  using testdata::kEmptyRowOff;
  return ConfusionMatrix4::from_rows({{
      {3772, 40, 3, kEmptyColOff[0]},
      {20, 2100, 1, kEmptyColOff[1]},
      {2, 4, 60, kEmptyColOff[2]},
      {kEmptyRowOff[0], kEmptyRowOff[1], kEmptyRowOff[2], 70000},
  }});
}

}  // namespace

TEST_CASE("human matrix reproduces the printed row") {
  const auto m = ConfusionMatrix4::from_rows(kHumanMatrix);
  const auto r = metrics(m);
  CHECK(round_percent(r.of(P).precision) == 87.2);
  CHECK(round_percent(r.of(P).recall) == 80.4);
  CHECK(round_percent(r.of(P).f1) == 83.6);
  CHECK(round_percent(r.of(C).precision) == 59.8);
  CHECK(round_percent(r.of(C).recall) == 63.3);
  CHECK(round_percent(r.of(C).f1) == 61.5);
  CHECK(round_percent(r.of(Q).precision) == 100.0);
  CHECK(round_percent(r.of(Q).f1) == 100.0);
  CHECK(round_percent(r.macro_punct.precision) == 82.3);
  CHECK(round_percent(r.macro_punct.recall) == 81.2);
  CHECK(round_percent(r.macro_punct.f1) == 81.7);
  // Gold counts of the slice.
  CHECK(m.actual(C) == 313);
  CHECK(m.actual(P) == 652);
  CHECK(m.actual(Q) == 1);
  CHECK(m.actual(E) == 10084);
  CHECK(r.macro_all.f1 < r.macro_punct.f1 + 1);
  CHECK(r.macro_all.f1 ==
        doctest::Approx((r.of(P).f1 + r.of(C).f1 + r.of(Q).f1 + r.of(E).f1) / 4));
}

TEST_CASE("f1 and macro cross-checks") {
  CHECK(round_percent(f1_score(0.792, 0.642)) == 70.9);
  CHECK(round_percent((0.709 + 0.897 + 0.760) / 3) == 78.9);
  CHECK(f1_score(0.0, 0.0) == 0.0);
  CHECK(f1_score(1.0f, 1.0f) == 1.0f);
}

TEST_CASE("confusion") {
  const std::vector<PunctClass> one = {P};
  const auto m = confusion(one, one);
  CHECK(m.at(P, P) == 1);
  CHECK(m.total() == 1);

  // skiner:PERIOD idag:EMPTY predicted as skiner:EMPTY idag:PERIOD.
  const std::vector<PunctClass> gold = {P, E};
  const std::vector<PunctClass> pred = {E, P};
  const auto d = confusion(gold, pred);
  CHECK(d.predicted(P) - d.true_positives(P) == 1);
  CHECK(d.actual(P) - d.true_positives(P) == 1);

  const std::vector<PunctClass> shorter = {P};
  CHECK_THROWS_AS(confusion(gold, shorter), ArgumentError);
}

TEST_CASE("identity predictions") {
  const std::vector<PunctClass> labels = {P, C, Q, E, E, C, P};
  const auto r = metrics(confusion(labels, labels));
  for (const auto& cm : r.per_class) CHECK(cm.f1 == 1.0);
  CHECK(r.accuracy == 1.0);

  const std::vector<PunctClass> no_q = {P, E, E};
  const auto rq = metrics(confusion(no_q, no_q));
  CHECK(rq.of(Q).undefined);
  CHECK(rq.of(Q).f1 == 0.0);
  CHECK_FALSE(rq.of(P).undefined);
}

TEST_CASE("empty matrix and negative counts are rejected") {
  CHECK_THROWS_AS(metrics(ConfusionMatrix4{}), ArgumentError);
  CHECK_THROWS_AS(ConfusionMatrix4::from_rows({{{-1, 0, 0, 0}, {}, {}, {}}}),
                  ArgumentError);
}

TEST_CASE("empty balance") {
  const auto b = empty_balance(balance_matrix());
  CHECK(b.fp_empty == 532);
  CHECK(b.fn_empty == 482);
  ConfusionMatrix4 diag;
  diag.counts.diagonal() << 5, 6, 7, 8;
  const auto z = empty_balance(diag);
  CHECK(z.fp_empty == 0);
  CHECK(z.fn_empty == 0);
}

TEST_CASE("debias removes batch-final positions") {
  // Stream with 3772 correct periods, 794 of which close a group.
  std::vector<PunctClass> gold, pred;
  std::vector<std::size_t> finals;
  for (int i = 0; i < testdata::kPeriodTpBefore; ++i) {
    gold.push_back(E);
    pred.push_back(E);
    if (i < testdata::kPeriodTpBefore - testdata::kPeriodTpAfter) {
      finals.push_back(gold.size());
    }
    gold.push_back(P);
    pred.push_back(P);
  }
  gold.push_back(P);
  pred.push_back(E);
  const auto raw = confusion(gold, pred);
  CHECK(raw.true_positives(P) == testdata::kPeriodTpBefore);
  const auto fixed = debias_batch_final(gold, pred, finals);
  CHECK(fixed.true_positives(P) == testdata::kPeriodTpAfter);
  CHECK(fixed.true_positives(E) == raw.true_positives(E));

  CHECK(debias_batch_final(gold, pred, std::span<const std::size_t>()) == raw);

  std::vector<std::size_t> all(gold.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto none = debias_batch_final(gold, pred, all);
  CHECK(none.total() == 0);
  CHECK_THROWS_AS(metrics(none), ArgumentError);

  const std::vector<std::size_t> bad = {gold.size()};
  CHECK_THROWS_AS(debias_batch_final(gold, pred, bad), ArgumentError);

  const std::vector<TrivialFinal> tf = {{0, 1}, {1, 3}};
  CHECK(debias_batch_final(gold, pred, tf).true_positives(P) ==
        raw.true_positives(P) - 2);
}

TEST_CASE("matrix invariants over random matrices") {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 300; ++t) {
    ConfusionMatrix4 m;
    for (int i = 0; i < 16; ++i) m.counts(i / 4, i % 4) = gen() % 50;
    m.counts(3, 3) += 1;
    const auto r = metrics(m);
    std::int64_t tp = 0;
    for (PunctClass c : kMatrixOrder) {
      tp += m.true_positives(c);
      CHECK(m.predicted(c) == m.counts.row(matrix_index(c)).sum());
      CHECK(m.actual(c) == m.counts.col(matrix_index(c)).sum());
    }
    CHECK(tp == m.counts.trace());
    CHECK(r.accuracy == doctest::Approx(double(tp) / m.total()));

    ConfusionMatrix4 scaled;
    scaled.counts = m.counts * (1 + gen() % 9);
    const auto rs = metrics(scaled);
    for (int i = 0; i < 4; ++i) {
      CHECK(rs.per_class[i].precision == doctest::Approx(r.per_class[i].precision));
      CHECK(rs.per_class[i].recall == doctest::Approx(r.per_class[i].recall));
      CHECK(rs.per_class[i].f1 == doctest::Approx(r.per_class[i].f1));
    }
    CHECK(rs.accuracy == doctest::Approx(r.accuracy));

    std::stringstream ss(format_matrix(m));
    CHECK(parse_matrix(ss) == m);
  }
}

TEST_CASE("rounding is half away from zero") {
  CHECK(round_percent(0.8365) == 83.7);
  CHECK(round_percent(0.00049) == 0.0);
  CHECK(round_percent(1.0) == 100.0);
  CHECK(format_percent(0.5985) == "59.9");
  CHECK(format_percent(0.0) == "0.0");
}

TEST_CASE("parse_matrix accepts bare grids and bracketed lists") {
  std::istringstream bare("524 11 0 66\n52 198 0 81\n0 0 1 0\n76 104 0 9937\n");
  CHECK(parse_matrix(bare) == ConfusionMatrix4::from_rows(kHumanMatrix));
  std::istringstream brackets(
      "[[524,11,0,66],[52,198,0,81],[0,0,1,0],[76,104,0,9937]]");
  CHECK(parse_matrix(brackets) == ConfusionMatrix4::from_rows(kHumanMatrix));
  std::istringstream short_grid("1 2 3 4\n5 6 7 8\n");
  CHECK_THROWS_AS(parse_matrix(short_grid), FormatError);
}

TEST_CASE("results table layout") {
  const auto r = metrics(ConfusionMatrix4::from_rows(kHumanMatrix));
  const auto table = format_results_table({{"Human", r}});
  CHECK(table.find("Comma") != std::string::npos);
  CHECK(table.find("Overall") != std::string::npos);
  // Comma block comes first, Overall last.
  const auto row = table.substr(table.rfind("Human"));
  CHECK(row.find("59.8") < row.find("87.2"));
  CHECK(row.find("81.7") != std::string::npos);

  EvalSummary s{ConfusionMatrix4::from_rows(kHumanMatrix), r, std::nullopt,
                std::nullopt};
  const auto text = format_report(s);
  CHECK(text.find("FP(EMPTY) = 180") != std::string::npos);
  const auto json = report_json(s);
  CHECK(json.find("\"fp_empty\": 180") != std::string::npos);
}

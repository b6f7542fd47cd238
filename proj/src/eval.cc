#include "punct/eval.h"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace punct {

ConfusionMatrix4 ConfusionMatrix4::from_rows(
    const std::array<std::array<std::int64_t, 4>, 4>& rows) {
  ConfusionMatrix4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (rows[r][c] < 0) throw ArgumentError("negative confusion count");
      m.counts(r, c) = rows[r][c];
    }
  }
  return m;
}

ConfusionMatrix4 confusion(std::span<const PunctClass> gold,
                           std::span<const PunctClass> pred) {
  if (gold.size() != pred.size()) {
    throw ArgumentError("confusion: " + std::to_string(gold.size()) +
                        " gold labels but " + std::to_string(pred.size()) +
                        " predictions");
  }
  ConfusionMatrix4 m;
  for (std::size_t i = 0; i < gold.size(); ++i) ++m.at(pred[i], gold[i]);
  return m;
}

EmptyBalance empty_balance(const ConfusionMatrix4& m) {
  const int e = matrix_index(PunctClass::kEmpty);
  EmptyBalance b;
  b.fp_empty = m.counts.row(e).sum() - m.counts(e, e);
  b.fn_empty = m.counts.col(e).sum() - m.counts(e, e);
  return b;
}

ConfusionMatrix4 debias_batch_final(std::span<const PunctClass> gold,
                                    std::span<const PunctClass> pred,
                                    std::span<const std::size_t> excluded) {
  if (gold.size() != pred.size()) {
    throw ArgumentError("debias_batch_final: gold/prediction length mismatch");
  }
  std::vector<bool> skip(gold.size(), false);
  for (std::size_t p : excluded) {
    if (p >= gold.size()) {
      throw ArgumentError("debias_batch_final: position " + std::to_string(p) +
                          " outside " + std::to_string(gold.size()) +
                          " scored words");
    }
    skip[p] = true;
  }
  ConfusionMatrix4 m;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!skip[i]) ++m.at(pred[i], gold[i]);
  }
  return m;
}

ConfusionMatrix4 debias_batch_final(std::span<const PunctClass> gold,
                                    std::span<const PunctClass> pred,
                                    std::span<const TrivialFinal> finals) {
  std::vector<std::size_t> positions;
  positions.reserve(finals.size());
  for (const auto& f : finals) positions.push_back(f.word_position);
  return debias_batch_final(gold, pred, positions);
}

double round_percent(double fraction) {
  return std::round(fraction * 1000.0) / 10.0;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", round_percent(fraction));
  return buf;
}

std::string format_matrix(const ConfusionMatrix4& m) {
  std::ostringstream out;
  constexpr int kW = 10;
  out << std::left << std::setw(kW) << "pred\\true";
  for (PunctClass c : kMatrixOrder) {
    out << std::right << std::setw(kW) << class_name(c);
  }
  out << '\n';
  for (int r = 0; r < 4; ++r) {
    out << std::left << std::setw(kW) << class_name(kMatrixOrder[r]);
    for (int c = 0; c < 4; ++c) out << std::right << std::setw(kW) << m.counts(r, c);
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix4 parse_matrix(std::istream& in) {
  std::vector<std::array<std::int64_t, 4>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::int64_t> values;
    std::string tok;
    while (ls >> tok) {
      for (char& ch : tok) {
        if (ch == ',' || ch == '[' || ch == ']' || ch == '{' || ch == '}') {
          ch = ' ';
        }
      }
      std::istringstream ts(tok);
      std::string part;
      while (ts >> part) {
        char* end = nullptr;
        const long long v = std::strtoll(part.c_str(), &end, 10);
        if (end != part.c_str() && *end == '\0') values.push_back(v);
      }
    }
    if (values.empty()) continue;
    // A whole nested list may sit on one line.
    if (values.size() % 4 != 0) {
      throw FormatError("count matrix row has " +
                        std::to_string(values.size()) + " values, expected 4");
    }
    for (std::size_t k = 0; k < values.size(); k += 4) {
      rows.push_back({values[k], values[k + 1], values[k + 2], values[k + 3]});
    }
  }
  if (rows.size() != 4) {
    throw FormatError("count matrix has " + std::to_string(rows.size()) +
                      " rows, expected 4");
  }
  try {
    return ConfusionMatrix4::from_rows({rows[0], rows[1], rows[2], rows[3]});
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
}

std::string format_results_table(const std::vector<ResultsRow>& rows) {
  std::size_t name_w = 6;
  for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
  std::ostringstream out;
  const int w = 7;
  out << std::left << std::setw(static_cast<int>(name_w)) << "" << " |";
  for (const char* group : {"Comma", "Period", "Question", "Overall"}) {
    out << ' ' << std::left << std::setw(3 * w) << group << '|';
  }
  out << '\n';
  out << std::left << std::setw(static_cast<int>(name_w)) << "Models" << " |";
  for (int g = 0; g < 4; ++g) {
    out << ' ' << std::right << std::setw(w - 1) << "P" << std::setw(w) << "R"
        << std::setw(w) << "F1" << " |";
  }
  out << '\n';
  for (const auto& row : rows) {
    out << std::left << std::setw(static_cast<int>(name_w)) << row.name << " |";
    auto cell = [&](double p, double r, double f) {
      out << ' ' << std::right << std::setw(w - 1) << format_percent(p)
          << std::setw(w) << format_percent(r) << std::setw(w)
          << format_percent(f) << " |";
    };
    for (PunctClass c :
         {PunctClass::kComma, PunctClass::kPeriod, PunctClass::kQuestion}) {
      const auto& m = row.report.of(c);
      cell(m.precision, m.recall, m.f1);
    }
    const auto& o = row.report.macro_punct;
    cell(o.precision, o.recall, o.f1);
    out << '\n';
  }
  return out.str();
}

namespace {

void write_block(std::ostream& out, const std::string& title,
                 const ConfusionMatrix4& m, const EvalReport<double>& r) {
  out << title << '\n';
  out << format_results_table({{"system", r}}) << '\n';
  out << std::left << std::setw(10) << "class" << std::right << std::setw(8)
      << "P" << std::setw(8) << "R" << std::setw(8) << "F1" << std::setw(10)
      << "support" << '\n';
  for (PunctClass c : kMatrixOrder) {
    const auto& cm = r.of(c);
    out << std::left << std::setw(10) << class_name(c) << std::right
        << std::setw(8) << format_percent(cm.precision) << std::setw(8)
        << format_percent(cm.recall) << std::setw(8) << format_percent(cm.f1)
        << std::setw(10) << m.actual(c);
    if (cm.undefined) out << "  (undefined: 0/0 reported as 0)";
    out << '\n';
  }
  out << std::left << std::setw(10) << "macro3" << std::right << std::setw(8)
      << format_percent(r.macro_punct.precision) << std::setw(8)
      << format_percent(r.macro_punct.recall) << std::setw(8)
      << format_percent(r.macro_punct.f1) << '\n';
  out << std::left << std::setw(10) << "macro4" << std::right << std::setw(8)
      << format_percent(r.macro_all.precision) << std::setw(8)
      << format_percent(r.macro_all.recall) << std::setw(8)
      << format_percent(r.macro_all.f1) << '\n';
  out << "accuracy " << format_percent(r.accuracy) << "  (" << m.counts.trace()
      << " / " << m.total() << ")\n\n";
  out << format_matrix(m) << '\n';
  const auto b = empty_balance(m);
  out << "FP(EMPTY) = " << b.fp_empty << "  FN(EMPTY) = " << b.fn_empty
      << "  difference = " << (b.fp_empty - b.fn_empty) << "\n";
}

nlohmann::ordered_json report_to_json(const ConfusionMatrix4& m,
                                      const EvalReport<double>& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json counts = nlohmann::ordered_json::array();
  for (int row = 0; row < 4; ++row) {
    nlohmann::ordered_json line = nlohmann::ordered_json::array();
    for (int col = 0; col < 4; ++col) line.push_back(m.counts(row, col));
    counts.push_back(line);
  }
  nlohmann::ordered_json order = nlohmann::ordered_json::array();
  for (PunctClass c : kMatrixOrder) order.push_back(class_name(c));
  j["class_order"] = order;
  j["matrix_rows"] = "predicted";
  j["counts"] = counts;
  j["total"] = m.total();
  nlohmann::ordered_json classes;
  for (PunctClass c : kMatrixOrder) {
    const auto& cm = r.of(c);
    classes[std::string(class_name(c))] = {{"precision", cm.precision},
                                           {"recall", cm.recall},
                                           {"f1", cm.f1},
                                           {"support", m.actual(c)},
                                           {"undefined", cm.undefined}};
  }
  j["classes"] = classes;
  j["accuracy"] = r.accuracy;
  j["macro_punct"] = {{"precision", r.macro_punct.precision},
                      {"recall", r.macro_punct.recall},
                      {"f1", r.macro_punct.f1}};
  j["macro_all"] = {{"precision", r.macro_all.precision},
                    {"recall", r.macro_all.recall},
                    {"f1", r.macro_all.f1}};
  const auto b = empty_balance(m);
  j["empty_balance"] = {{"fp_empty", b.fp_empty}, {"fn_empty", b.fn_empty}};
  return j;
}

}  // namespace

std::string format_report(const EvalSummary& s) {
  std::ostringstream out;
  write_block(out, "== all scored words", s.matrix, s.report);
  if (s.debiased && s.debiased_matrix) {
    out << '\n';
    write_block(out, "== batch-final words excluded", *s.debiased_matrix,
                *s.debiased);
    out << "TP(PERIOD) " << s.matrix.true_positives(PunctClass::kPeriod)
        << " -> " << s.debiased_matrix->true_positives(PunctClass::kPeriod)
        << "\n";
    out << "Only the trivially predictable period before [SEP] is removed; "
           "the model's use of the guaranteed period as context is not "
           "corrected.\n";
  }
  return out.str();
}

std::string report_json(const EvalSummary& s) {
  nlohmann::ordered_json j;
  j["raw"] = report_to_json(s.matrix, s.report);
  if (s.debiased && s.debiased_matrix) {
    j["debiased"] = report_to_json(*s.debiased_matrix, *s.debiased);
  }
  return j.dump(2) + "\n";
}

}  // namespace punct

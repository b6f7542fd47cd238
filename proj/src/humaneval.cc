#include "punct/humaneval.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "punct/error.h"

namespace punct {

std::vector<HumanTest> generate_tests(const Dataset& test_set,
                                      std::size_t words_per_test) {
  if (words_per_test == 0) throw ArgumentError("words_per_test must be > 0");

  std::size_t total = 0;
  for (const auto& d : test_set.documents) {
    for (const auto& s : d.sentences) total += s.words.size();
  }
  const std::size_t n_tests = (total + words_per_test - 1) / words_per_test;
  const int width =
      std::max<int>(3, static_cast<int>(std::to_string(n_tests).size()));

  std::vector<HumanTest> tests;
  auto open_test = [&]() {
    std::ostringstream id;
    id << "test_" << std::setw(width) << std::setfill('0') << tests.size() + 1;
    tests.push_back(HumanTest{id.str(), {}, {}, {}});
  };

  for (const auto& d : test_set.documents) {
    std::size_t offset = 0;
    for (const auto& s : d.sentences) {
      for (const auto& w : s.words) {
        if (tests.empty() || tests.back().words.size() == words_per_test) {
          open_test();
        }
        HumanTest& t = tests.back();
        if (t.provenance.empty() || t.provenance.back().doc_id != d.id) {
          t.provenance.push_back({d.id, offset, 0});
        }
        ++t.provenance.back().word_count;
        t.words.push_back(w.word);
        t.gold.push_back(w.label);
        ++offset;
      }
    }
  }
  return tests;
}

std::string test_text(const HumanTest& t) {
  std::string out;
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out.append(t.words[i]);
  }
  out.push_back('\n');
  return out;
}

std::string test_metadata_json(const HumanTest& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["words"] = t.words.size();
  nlohmann::ordered_json prov = nlohmann::ordered_json::array();
  for (const auto& p : t.provenance) {
    prov.push_back({{"doc", p.doc_id},
                    {"word_offset", p.word_offset},
                    {"word_count", p.word_count}});
  }
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

std::string instruction_sheet(const HumanTest& t) {
  std::ostringstream out;
  out << "Punctuation test " << t.id << " (" << t.words.size() << " words)\n\n"
      << "The attached text has had its punctuation and capital letters "
         "removed.\n"
      << "Read it from start to finish and add periods (.), commas (,) and\n"
      << "question marks (?) wherever you think they belong.\n\n"
      << "Rules:\n"
      << "  - Do not add, remove, reorder or respell any word.\n"
      << "  - Do not use any other punctuation marks.\n"
      << "  - Capital letters are not needed.\n"
      << "  - The text was cut at a fixed word count, so the first and last\n"
      << "    sentences may be incomplete.\n"
      << "  - Any of the three marks may appear; there is no quota.\n\n"
      << "Expected time: about 10-15 minutes. Return the edited text as a\n"
      << "plain UTF-8 file named " << t.id << ".txt.\n";
  return out.str();
}

namespace {

void write_string(const std::filesystem::path& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << s;
}

}  // namespace

void write_test(const std::filesystem::path& dir, const HumanTest& t) {
  write_string(dir / (t.id + ".txt"), test_text(t));
  write_string(dir / (t.id + ".meta.json"), test_metadata_json(t));
  std::ostringstream gold;
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    gold << t.words[i] << '\t' << class_name(t.gold[i]) << '\n';
  }
  write_string(dir / (t.id + ".gold.tsv"), gold.str());
}

HumanTest read_test(const std::filesystem::path& dir, const std::string& id) {
  HumanTest t;
  t.id = id;
  std::istringstream gold(read_file(dir / (id + ".gold.tsv")));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(gold, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    auto label = tab == std::string::npos
                     ? std::nullopt
                     : parse_class_name(std::string_view(line).substr(tab + 1));
    if (!label) {
      throw FormatError(id + ".gold.tsv line " + std::to_string(line_no) +
                        ": expected word<TAB>LABEL");
    }
    t.words.push_back(line.substr(0, tab));
    t.gold.push_back(*label);
  }
  const auto meta_path = dir / (id + ".meta.json");
  if (std::filesystem::exists(meta_path)) {
    try {
      const auto j = nlohmann::json::parse(read_file(meta_path));
      for (const auto& p : j.at("provenance")) {
        t.provenance.push_back({p.at("doc").get<std::string>(),
                                p.at("word_offset").get<std::size_t>(),
                                p.at("word_count").get<std::size_t>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(meta_path.filename().string() + ": " + e.what());
    }
  }
  return t;
}

ParticipantReport score_annotation(const HumanTest& test,
                                   const AnnotatedReturn& ret) {
  const Extraction ex = extract_labels(normalize_text(ret.text));
  const std::vector<LabeledWord> returned = flatten(ex.sentences);

  const std::size_t n = std::min(returned.size(), test.words.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (returned[i].word != test.words[i]) {
      throw AlignmentError(i, test.words[i], returned[i].word);
    }
  }
  if (returned.size() != test.words.size()) {
    throw AlignmentError(
        n, n < test.words.size() ? test.words[n] : "<end of test>",
        n < returned.size() ? returned[n].word : "<end of annotation>");
  }

  std::vector<PunctClass> pred;
  pred.reserve(returned.size());
  for (const auto& w : returned) pred.push_back(w.label);

  ParticipantReport r;
  r.test_id = test.id;
  r.matrix = confusion(test.gold, pred);
  r.report = metrics<double>(r.matrix);
  for (PunctClass c : test.gold) r.gold_counts.add(c);
  return r;
}

CohortStats cohort_stats(std::span<const ParticipantReport> reports) {
  if (reports.empty()) throw ArgumentError("cohort_stats: no reports");
  CohortStats s;
  s.participants = reports.size();
  const auto n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    s.pooled += r.matrix;
    for (int c = 0; c < 4; ++c) s.mean_f1[c] += r.report.per_class[c].f1 / n;
  }
  for (int c = 0; c < 4; ++c) {
    double sq = 0;
    for (const auto& r : reports) {
      const double d = r.report.per_class[c].f1 - s.mean_f1[c];
      sq += d * d;
    }
    s.stddev_f1[c] = std::sqrt(sq / n);
  }
  s.pooled_report = metrics<double>(s.pooled);
  return s;
}

namespace {

nlohmann::ordered_json counts_json(const ClassCounts& c) {
  return {{"words", c.words},
          {"period", c.period},
          {"comma", c.comma},
          {"question", c.question},
          {"empty", c.empty}};
}

nlohmann::ordered_json matrix_json(const ConfusionMatrix4& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m.counts(r, c));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::ordered_json f1_json(const EvalReport<double>& r) {
  nlohmann::ordered_json j;
  for (PunctClass c : kMatrixOrder) {
    j[std::string(class_name(c))] = r.of(c).f1;
  }
  return j;
}

}  // namespace

std::string format_participant(const ParticipantReport& r) {
  std::ostringstream out;
  out << "Test " << r.test_id << ": " << r.gold_counts.words << " words ("
      << r.gold_counts.period << " PERIOD, " << r.gold_counts.comma
      << " COMMA, " << r.gold_counts.question << " QUESTION, "
      << r.gold_counts.empty << " EMPTY)\n\n";
  out << format_results_table({{r.test_id, r.report}}) << '\n';
  out << format_matrix(r.matrix);
  return out.str();
}

std::string participant_json(const ParticipantReport& r) {
  nlohmann::ordered_json j;
  j["test_id"] = r.test_id;
  j["gold_counts"] = counts_json(r.gold_counts);
  j["counts"] = matrix_json(r.matrix);
  j["f1"] = f1_json(r.report);
  return j.dump(2) + "\n";
}

ParticipantReport parse_participant_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ParticipantReport r;
    r.test_id = j.at("test_id").get<std::string>();
    std::array<std::array<std::int64_t, 4>, 4> rows{};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        rows[a][b] = j.at("counts").at(a).at(b).get<std::int64_t>();
      }
    }
    r.matrix = ConfusionMatrix4::from_rows(rows);
    r.report = metrics<double>(r.matrix);
    const auto& g = j.at("gold_counts");
    r.gold_counts.words = g.at("words").get<std::uint64_t>();
    r.gold_counts.period = g.at("period").get<std::uint64_t>();
    r.gold_counts.comma = g.at("comma").get<std::uint64_t>();
    r.gold_counts.question = g.at("question").get<std::uint64_t>();
    r.gold_counts.empty = g.at("empty").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("participant report: ") + e.what());
  }
}

std::string format_cohort(const CohortStats& s,
                          std::span<const ParticipantReport> reports) {
  std::ostringstream out;
  out << "Participants: " << s.participants << "\n\n";
  std::vector<ResultsRow> rows;
  for (const auto& r : reports) rows.push_back({r.test_id, r.report});
  rows.push_back({"pooled", s.pooled_report});
  out << format_results_table(rows) << '\n';
  out << "Per-class F1 across participants (0-1 scale)\n";
  out << std::left << std::setw(10) << "class" << std::right << std::setw(10)
      << "mean" << std::setw(10) << "stddev" << '\n';
  for (int c = 0; c < 4; ++c) {
    char mean[32], sd[32];
    std::snprintf(mean, sizeof mean, "%.4f", s.mean_f1[c]);
    std::snprintf(sd, sizeof sd, "%.4f", s.stddev_f1[c]);
    out << std::left << std::setw(10) << class_name(kMatrixOrder[c])
        << std::right << std::setw(10) << mean << std::setw(10) << sd << '\n';
  }
  out << "\nPooled confusion matrix\n" << format_matrix(s.pooled);
  out << "\nStandard deviations are population values over the cohort.\n";
  return out.str();
}

std::string cohort_json(const CohortStats& s,
                        std::span<const ParticipantReport> reports) {
  nlohmann::ordered_json j;
  j["participants"] = s.participants;
  nlohmann::ordered_json mean, sd;
  for (int c = 0; c < 4; ++c) {
    mean[std::string(class_name(kMatrixOrder[c]))] = s.mean_f1[c];
    sd[std::string(class_name(kMatrixOrder[c]))] = s.stddev_f1[c];
  }
  j["mean_f1"] = mean;
  j["stddev_f1"] = sd;
  j["stddev_kind"] = "population";
  j["pooled_counts"] = matrix_json(s.pooled);
  j["pooled_f1"] = f1_json(s.pooled_report);
  j["pooled_macro_punct"] = {{"precision", s.pooled_report.macro_punct.precision},
                             {"recall", s.pooled_report.macro_punct.recall},
                             {"f1", s.pooled_report.macro_punct.f1}};
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    per.push_back({{"test_id", r.test_id}, {"f1", f1_json(r.report)}});
  }
  j["reports"] = per;
  return j.dump(2) + "\n";
}

}  // namespace punct

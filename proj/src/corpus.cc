#include "punct/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "punct/error.h"
#include "punct/random.h"
#include "punct/utf8.h"
#include "json.hpp"

namespace punct {

std::size_t Dataset::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.sentences.size();
  return n;
}

std::uint64_t ClassCounts::of(PunctClass c) const {
  switch (c) {
    case PunctClass::kPeriod:
      return period;
    case PunctClass::kComma:
      return comma;
    case PunctClass::kQuestion:
      return question;
    case PunctClass::kEmpty:
      break;
  }
  return empty;
}

void ClassCounts::add(PunctClass c) {
  ++words;
  switch (c) {
    case PunctClass::kPeriod:
      ++period;
      break;
    case PunctClass::kComma:
      ++comma;
      break;
    case PunctClass::kQuestion:
      ++question;
      break;
    case PunctClass::kEmpty:
      ++empty;
      break;
  }
}

ClassCounts& ClassCounts::operator+=(const ClassCounts& o) {
  words += o.words;
  period += o.period;
  comma += o.comma;
  question += o.question;
  empty += o.empty;
  return *this;
}

void SplitConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1), got " +
                      std::to_string(train_fraction));
  }
}

namespace {

bool is_space(char32_t c) {
  switch (c) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_horizontal_space(char32_t c) { return c == U' ' || c == U'\t'; }

}  // namespace

std::string normalize_text(std::string_view text) {
  const std::vector<char32_t> in = utf8::decode(text);

  // Dash followed by a line break joins the two halves of a split word.
  std::vector<char32_t> joined;
  joined.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == U'-') {
      if (i + 1 < in.size() && in[i + 1] == U'\n') {
        ++i;
        continue;
      }
      if (i + 2 < in.size() && in[i + 1] == U'\r' && in[i + 2] == U'\n') {
        i += 2;
        continue;
      }
    }
    joined.push_back(in[i]);
  }

  std::vector<char32_t> mapped;
  mapped.reserve(joined.size());
  for (char32_t c : joined) {
    switch (c) {
      case U'#':
        continue;
      case U'-':
        c = U',';
        break;
      case U';':
        c = U':';
        break;
      case U'!':
        c = U'.';
        break;
      case U'"':
        c = U',';
        break;
      default:
        c = utf8::to_lower(c);
    }
    if (c == U',') {
      while (!mapped.empty() && is_horizontal_space(mapped.back())) {
        mapped.pop_back();
      }
    }
    mapped.push_back(c);
  }
  return utf8::encode(mapped);
}

CleanDocument normalize(const RawDocument& doc) {
  return CleanDocument{doc.id, normalize_text(doc.text)};
}

Extraction extract_labels(std::string_view clean_text) {
  Extraction out;
  Sentence sentence;
  std::string word;
  bool in_mark_run = false;

  auto flush_word = [&](PunctClass label) {
    sentence.words.push_back(LabeledWord{std::move(word), label});
    word.clear();
  };
  auto close_sentence = [&]() {
    out.sentences.push_back(std::move(sentence));
    sentence = Sentence{};
  };

  std::size_t offset = 0;
  for (char32_t c : utf8::decode(clean_text)) {
    const std::size_t here = offset;
    offset += utf8::sequence_length(
        static_cast<unsigned char>(clean_text[here]));

    std::optional<PunctClass> mark;
    if (c < 0x80) mark = class_from_mark(static_cast<char>(c));

    if (mark) {
      if (!word.empty()) {
        flush_word(*mark);
      } else if (in_mark_run) {
        continue;  // "?!" and "..." keep the first mark
      } else if (!sentence.words.empty() &&
                 sentence.words.back().label == PunctClass::kEmpty) {
        sentence.words.back().label = *mark;
      } else {
        out.warnings.push_back(
            {Diagnostic::Kind::kDroppedMark, here,
             std::string("mark '") + static_cast<char>(c) +
                 "' has no preceding word in its sentence; dropped"});
        in_mark_run = true;
        continue;
      }
      in_mark_run = true;
      if (*mark != PunctClass::kComma) close_sentence();
      continue;
    }

    in_mark_run = false;
    if (is_space(c) || c == U':') {
      if (!word.empty()) flush_word(PunctClass::kEmpty);
      continue;
    }
    utf8::append(word, c);
  }
  if (!word.empty()) flush_word(PunctClass::kEmpty);
  if (!sentence.words.empty()) {
    sentence.unterminated = true;
    out.warnings.push_back({Diagnostic::Kind::kUnterminatedSentence,
                            clean_text.size(),
                            "text ends inside an unterminated sentence"});
    close_sentence();
  }
  return out;
}

Extraction extract_labels(const CleanDocument& doc) {
  return extract_labels(std::string_view(doc.text));
}

LabeledDocument label_document(const RawDocument& doc,
                               std::vector<Diagnostic>* warnings) {
  Extraction ex = extract_labels(normalize(doc));
  if (warnings != nullptr) {
    warnings->insert(warnings->end(), ex.warnings.begin(), ex.warnings.end());
  }
  return LabeledDocument{doc.id, std::move(ex.sentences)};
}

ClassCounts sentence_stats(const std::vector<Sentence>& sentences) {
  ClassCounts c;
  for (const auto& s : sentences) {
    for (const auto& w : s.words) c.add(w.label);
  }
  return c;
}

ClassCounts dataset_stats(const Dataset& ds) {
  ClassCounts c;
  for (const auto& d : ds.documents) c += sentence_stats(d.sentences);
  return c;
}

Split split_dataset(const Dataset& ds, const SplitConfig& cfg) {
  cfg.validate();
  if (ds.documents.empty()) throw ArgumentError("cannot split an empty dataset");

  const std::size_t n = ds.documents.size();
  const auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * cfg.train_fraction));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Generator gen(cfg.seed);
  seeded_shuffle(order.begin(), order.end(), gen);

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  Split out;
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? out.train : out.test).documents.push_back(ds.documents[i]);
  }
  if (out.test.documents.empty()) {
    out.warnings.push_back("test set is empty (" + std::to_string(n) +
                           " document(s) at train_fraction " +
                           std::to_string(cfg.train_fraction) + ")");
  }
  if (out.train.documents.empty()) {
    out.warnings.push_back("training set is empty");
  }
  return out;
}

std::vector<LabeledWord> flatten(const std::vector<Sentence>& sentences) {
  std::vector<LabeledWord> out;
  for (const auto& s : sentences) {
    out.insert(out.end(), s.words.begin(), s.words.end());
  }
  return out;
}

std::vector<LabeledWord> flatten(const Dataset& ds) {
  std::vector<LabeledWord> out;
  for (const auto& d : ds.documents) {
    for (const auto& s : d.sentences) {
      out.insert(out.end(), s.words.begin(), s.words.end());
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RawDocument> load_corpus_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  for (const auto& f : files) {
    RawDocument doc{f.stem().string(), read_file(f)};
    try {
      utf8::validate(doc.text);
    } catch (const IngestError& e) {
      throw IngestError(f.filename().string() + ": invalid UTF-8",
                        e.byte_offset());
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void write_labels_tsv(std::ostream& out, const Dataset& ds) {
  for (const auto& d : ds.documents) {
    out << "# doc " << d.id << '\n';
    for (const auto& s : d.sentences) {
      for (const auto& w : s.words) {
        out << w.word << '\t' << class_name(w.label) << '\n';
      }
      out << '\n';
    }
  }
}

Dataset read_labels_tsv(std::istream& in) {
  Dataset ds;
  Sentence sentence;
  std::string line;
  std::size_t line_no = 0;

  auto close_sentence = [&]() {
    if (sentence.words.empty()) return;
    if (ds.documents.empty()) ds.documents.push_back({"", {}});
    const PunctClass last = sentence.words.back().label;
    sentence.unterminated =
        last != PunctClass::kPeriod && last != PunctClass::kQuestion;
    ds.documents.back().sentences.push_back(std::move(sentence));
    sentence = Sentence{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      close_sentence();
      continue;
    }
    if (line.rfind("# doc ", 0) == 0) {
      close_sentence();
      ds.documents.push_back({line.substr(6), {}});
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("labels line " + std::to_string(line_no) +
                        ": expected word<TAB>LABEL");
    }
    const auto label = parse_class_name(std::string_view(line).substr(tab + 1));
    if (!label) {
      throw FormatError("labels line " + std::to_string(line_no) +
                        ": unknown label '" + line.substr(tab + 1) + "'");
    }
    sentence.words.push_back({line.substr(0, tab), *label});
  }
  close_sentence();
  return ds;
}

std::string format_stats_table(const std::vector<StatsColumn>& columns) {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  auto add_row = [&](std::string name, auto value_of) {
    std::vector<std::string> cells;
    for (const auto& c : columns) cells.push_back(value_of(c));
    rows.emplace_back(std::move(name), std::move(cells));
  };
  auto num = [](std::uint64_t v) {
    // Thousands separators.
    std::string digits = std::to_string(v);
    std::string out;
    const int n = static_cast<int>(digits.size());
    for (int i = 0; i < n; ++i) {
      if (i > 0 && (n - i) % 3 == 0) out.push_back(',');
      out.push_back(digits[i]);
    }
    return out;
  };
  add_row("Data set", [](const StatsColumn& c) { return c.name; });
  add_row("# of documents",
          [&](const StatsColumn& c) { return num(c.documents); });
  add_row("# words", [&](const StatsColumn& c) { return num(c.counts.words); });
  add_row("# PERIOD",
          [&](const StatsColumn& c) { return num(c.counts.period); });
  add_row("# COMMA", [&](const StatsColumn& c) { return num(c.counts.comma); });
  add_row("# QUESTION",
          [&](const StatsColumn& c) { return num(c.counts.question); });
  add_row("# EMPTY", [&](const StatsColumn& c) { return num(c.counts.empty); });

  std::size_t first_width = 0;
  std::vector<std::size_t> widths(columns.size(), 0);
  for (const auto& [name, cells] : rows) {
    first_width = std::max(first_width, name.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      widths[i] = std::max(widths[i], cells[i].size());
    }
  }
  std::ostringstream out;
  for (const auto& [name, cells] : rows) {
    out << std::left << std::setw(static_cast<int>(first_width)) << name;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << "  " << std::right << std::setw(static_cast<int>(widths[i]))
          << cells[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string stats_json(const ClassCounts& c) {
  nlohmann::ordered_json j;
  j["words"] = c.words;
  j["period"] = c.period;
  j["comma"] = c.comma;
  j["question"] = c.question;
  j["empty"] = c.empty;
  return j.dump(2) + "\n";
}

}  // namespace punct

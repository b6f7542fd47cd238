#ifndef PUNCT_CORPUS_H_
#define PUNCT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "punct/labels.h"

namespace punct {

struct RawDocument {
  std::string id;
  std::string text;
};

// Lowercase text with '#', ';', '!', '"' and dash-linebreak pairs removed.
struct CleanDocument {
  std::string id;
  std::string text;
};

struct LabeledWord {
  std::string word;
  PunctClass label = PunctClass::kEmpty;

  friend bool operator==(const LabeledWord&, const LabeledWord&) = default;
};

struct Sentence {
  std::vector<LabeledWord> words;
  // Set when the text ran out before a PERIOD or QUESTION.
  bool unterminated = false;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Diagnostic {
  enum class Kind { kUnterminatedSentence, kDroppedMark };
  Kind kind;
  std::size_t byte_offset = 0;
  std::string message;
};

struct Extraction {
  std::vector<Sentence> sentences;
  std::vector<Diagnostic> warnings;
};

struct LabeledDocument {
  std::string id;
  std::vector<Sentence> sentences;

  friend bool operator==(const LabeledDocument&,
                         const LabeledDocument&) = default;
};

struct Dataset {
  std::vector<LabeledDocument> documents;

  std::size_t sentence_count() const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ClassCounts {
  std::uint64_t words = 0;
  std::uint64_t period = 0;
  std::uint64_t comma = 0;
  std::uint64_t question = 0;
  std::uint64_t empty = 0;

  std::uint64_t of(PunctClass c) const;
  void add(PunctClass c);
  ClassCounts& operator+=(const ClassCounts& o);
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;

  // Throws ConfigError unless 0 < train_fraction < 1.
  void validate() const;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

// Applies the character rules in order: dash+linebreak removal, '#' removal,
// '-' -> ',', ';' -> ':', '!' -> '.', '"' -> ',', lowercasing. Horizontal
// whitespace directly before a comma is then dropped ("word ," -> "word,").
// Idempotent.
CleanDocument normalize(const RawDocument& doc);
std::string normalize_text(std::string_view text);

// Splits normalized text into sentences of labeled words. Each word takes the
// label of the mark right after it. ':' separates words without a label.
// Runs of adjacent marks keep the first one.
Extraction extract_labels(const CleanDocument& doc);
Extraction extract_labels(std::string_view clean_text);

LabeledDocument label_document(const RawDocument& doc,
                               std::vector<Diagnostic>* warnings = nullptr);

ClassCounts dataset_stats(const Dataset& ds);
ClassCounts sentence_stats(const std::vector<Sentence>& sentences);

// Whole-document split. |train| = round(n * train_fraction), chosen by a
// seeded shuffle; both halves keep corpus order.
Split split_dataset(const Dataset& ds, const SplitConfig& cfg);

// Flattened word stream in corpus order.
std::vector<LabeledWord> flatten(const Dataset& ds);
std::vector<LabeledWord> flatten(const std::vector<Sentence>& sentences);

// Reads every *.txt under `dir` (non-recursive), sorted by filename.
std::vector<RawDocument> load_corpus_dir(const std::filesystem::path& dir);
std::string read_file(const std::filesystem::path& path);

// Labeled TSV: "word<TAB>LABEL" rows, a blank line after each sentence, and a
// "# doc <id>" line opening each document.
void write_labels_tsv(std::ostream& out, const Dataset& ds);
Dataset read_labels_tsv(std::istream& in);

// Text table in the layout of the data-set breakdown, one column per entry.
struct StatsColumn {
  std::string name;
  std::size_t documents = 0;
  ClassCounts counts;
};
std::string format_stats_table(const std::vector<StatsColumn>& columns);
std::string stats_json(const ClassCounts& counts);

}  // namespace punct

#endif  // PUNCT_CORPUS_H_

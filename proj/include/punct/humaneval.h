#ifndef PUNCT_HUMANEVAL_H_
#define PUNCT_HUMANEVAL_H_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "punct/corpus.h"
#include "punct/eval.h"

namespace punct {

inline constexpr std::size_t kWordsPerTest = 650;

struct Provenance {
  std::string doc_id;
  std::size_t word_offset = 0;  // within the document
  std::size_t word_count = 0;
};

struct HumanTest {
  std::string id;
  std::vector<std::string> words;
  std::vector<PunctClass> gold;  // withheld from participants
  std::vector<Provenance> provenance;
};

// Cuts the test-set word stream, in corpus order, every `words_per_test`
// words regardless of sentence boundaries. The last test may be shorter.
std::vector<HumanTest> generate_tests(const Dataset& test_set,
                                      std::size_t words_per_test = kWordsPerTest);

// Participant-facing text: words separated by single spaces.
std::string test_text(const HumanTest& t);
std::string test_metadata_json(const HumanTest& t);
std::string instruction_sheet(const HumanTest& t);

// On-disk layout of one test inside a directory:
//   <id>.txt        participant text
//   <id>.gold.tsv   word<TAB>LABEL
//   <id>.meta.json  id, word count, provenance
void write_test(const std::filesystem::path& dir, const HumanTest& t);
HumanTest read_test(const std::filesystem::path& dir, const std::string& id);

struct AnnotatedReturn {
  std::string test_id;
  std::string text;
};

struct ParticipantReport {
  std::string test_id;
  ConfusionMatrix4 matrix;
  EvalReport<double> report;
  ClassCounts gold_counts;
};

// Labels the return with the same extraction as the source text and scores it
// against the gold labels. The word sequence must match the test exactly;
// otherwise AlignmentError names the first differing word index.
ParticipantReport score_annotation(const HumanTest& test,
                                   const AnnotatedReturn& ret);

struct CohortStats {
  std::size_t participants = 0;
  // Per class in kMatrixOrder, F1 on the [0, 1] scale.
  std::array<double, 4> mean_f1{};
  std::array<double, 4> stddev_f1{};  // population standard deviation
  ConfusionMatrix4 pooled;
  EvalReport<double> pooled_report;
};

CohortStats cohort_stats(std::span<const ParticipantReport> reports);

std::string format_participant(const ParticipantReport& r);
std::string participant_json(const ParticipantReport& r);
ParticipantReport parse_participant_json(const std::string& text);
std::string format_cohort(const CohortStats& s,
                          std::span<const ParticipantReport> reports);
std::string cohort_json(const CohortStats& s,
                        std::span<const ParticipantReport> reports);

}  // namespace punct

#endif  // PUNCT_HUMANEVAL_H_

#ifndef PUNCT_BATCHER_H_
#define PUNCT_BATCHER_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "punct/corpus.h"
#include "punct/random.h"

namespace punct {

inline constexpr std::size_t kMinGroupSize = 3;
inline constexpr std::size_t kMaxGroupSize = 7;

struct CompoundSentence {
  std::string doc_id;
  // Index of the first sentence within its document.
  std::size_t start_sentence = 0;
  // Position within the plan.
  std::size_t index = 0;
  std::vector<Sentence> sentences;
  // Trailing group of fewer than kMinGroupSize sentences.
  bool final_group_short = false;

  std::vector<LabeledWord> words() const { return flatten(sentences); }
  std::size_t word_count() const;
};

struct BatchPlan {
  std::uint64_t seed = 0;
  std::vector<CompoundSentence> groups;

  std::size_t word_count() const;
};

// Draws group sizes uniformly from [3, 7] while at least three sentences
// remain; a group takes min(draw, remaining). One or two leftover sentences
// form a short final group without a draw.
BatchPlan group_sentences(std::span<const Sentence> sentences,
                          std::uint64_t seed, const std::string& doc_id = "");

// Groups every document in order with one generator seeded once; groups never
// cross document boundaries.
BatchPlan plan_dataset(const Dataset& ds, std::uint64_t seed);

struct TrivialFinal {
  std::size_t group = 0;
  // Index of the group's last word in the plan's flattened word stream.
  std::size_t word_position = 0;

  friend bool operator==(const TrivialFinal&, const TrivialFinal&) = default;
};

// The last word of each group, whose label sits right before [SEP].
std::vector<TrivialFinal> mark_trivial_finals(const BatchPlan& plan);

// "doc_id<TAB>start_sentence_index<TAB>size" per group after a
// "# seed <n>" header.
void write_plan(std::ostream& out, const BatchPlan& plan);

struct PlanEntry {
  std::string doc_id;
  std::size_t start_sentence = 0;
  std::size_t size = 0;
};
struct PlanFile {
  std::uint64_t seed = 0;
  std::vector<PlanEntry> entries;
};
PlanFile read_plan(std::istream& in);

// Rebuilds a plan from a plan file against the dataset it was made from.
BatchPlan apply_plan(const Dataset& ds, const PlanFile& file);

}  // namespace punct

#endif  // PUNCT_BATCHER_H_

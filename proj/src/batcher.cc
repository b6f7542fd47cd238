#include "punct/batcher.h"

#include <istream>
#include <map>
#include <ostream>

#include "punct/error.h"

namespace punct {

std::size_t CompoundSentence::word_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.words.size();
  return n;
}

std::size_t BatchPlan::word_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.word_count();
  return n;
}

namespace {

void group_into(BatchPlan& plan, std::span<const Sentence> sentences,
                const std::string& doc_id, Generator& gen) {
  std::size_t pos = 0;
  while (pos < sentences.size()) {
    const std::size_t remaining = sentences.size() - pos;
    std::size_t take;
    bool short_group = false;
    if (remaining < kMinGroupSize) {
      take = remaining;
      short_group = true;
    } else {
      const std::size_t k =
          kMinGroupSize +
          uniform_below(gen, kMaxGroupSize - kMinGroupSize + 1);
      take = std::min(k, remaining);
    }
    CompoundSentence g;
    g.doc_id = doc_id;
    g.start_sentence = pos;
    g.index = plan.groups.size();
    g.sentences.assign(sentences.begin() + pos,
                       sentences.begin() + pos + take);
    g.final_group_short = short_group;
    plan.groups.push_back(std::move(g));
    pos += take;
  }
}

}  // namespace

BatchPlan group_sentences(std::span<const Sentence> sentences,
                          std::uint64_t seed, const std::string& doc_id) {
  BatchPlan plan;
  plan.seed = seed;
  Generator gen(seed);
  group_into(plan, sentences, doc_id, gen);
  return plan;
}

BatchPlan plan_dataset(const Dataset& ds, std::uint64_t seed) {
  BatchPlan plan;
  plan.seed = seed;
  Generator gen(seed);
  for (const auto& d : ds.documents) group_into(plan, d.sentences, d.id, gen);
  return plan;
}

std::vector<TrivialFinal> mark_trivial_finals(const BatchPlan& plan) {
  std::vector<TrivialFinal> out;
  std::size_t offset = 0;
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    const std::size_t n = plan.groups[g].word_count();
    if (n > 0) out.push_back({g, offset + n - 1});
    offset += n;
  }
  return out;
}

void write_plan(std::ostream& out, const BatchPlan& plan) {
  out << "# seed " << plan.seed << '\n';
  for (const auto& g : plan.groups) {
    out << g.doc_id << '\t' << g.start_sentence << '\t' << g.sentences.size()
        << '\n';
  }
}

PlanFile read_plan(std::istream& in) {
  PlanFile file;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# seed ", 0) == 0) {
      file.seed = std::stoull(line.substr(7));
      seen_header = true;
      continue;
    }
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw FormatError("plan line " + std::to_string(line_no) +
                        ": expected doc_id<TAB>start<TAB>size");
    }
    try {
      file.entries.push_back({line.substr(0, t1),
                              std::stoull(line.substr(t1 + 1, t2 - t1 - 1)),
                              std::stoull(line.substr(t2 + 1))});
    } catch (const std::exception&) {
      throw FormatError("plan line " + std::to_string(line_no) +
                        ": bad number");
    }
  }
  if (!seen_header) throw FormatError("plan file has no '# seed' header");
  return file;
}

BatchPlan apply_plan(const Dataset& ds, const PlanFile& file) {
  std::map<std::string, const LabeledDocument*> by_id;
  for (const auto& d : ds.documents) by_id[d.id] = &d;

  BatchPlan plan;
  plan.seed = file.seed;
  for (const auto& e : file.entries) {
    auto it = by_id.find(e.doc_id);
    if (it == by_id.end()) {
      throw FormatError("plan refers to unknown document '" + e.doc_id + "'");
    }
    const auto& sentences = it->second->sentences;
    if (e.size == 0 || e.start_sentence + e.size > sentences.size()) {
      throw FormatError("plan group out of range for document '" + e.doc_id +
                        "'");
    }
    CompoundSentence g;
    g.doc_id = e.doc_id;
    g.start_sentence = e.start_sentence;
    g.index = plan.groups.size();
    g.sentences.assign(sentences.begin() + e.start_sentence,
                       sentences.begin() + e.start_sentence + e.size);
    g.final_group_short = e.size < kMinGroupSize;
    plan.groups.push_back(std::move(g));
  }
  return plan;
}

}  // namespace punct

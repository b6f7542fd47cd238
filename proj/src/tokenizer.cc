#include "punct/tokenizer.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "punct/error.h"
#include "punct/utf8.h"

namespace punct {

Vocab Vocab::from_pieces(std::vector<std::string> pieces) {
  Vocab v;
  v.pieces_ = std::move(pieces);
  for (std::size_t i = 0; i < v.pieces_.size(); ++i) {
    const std::string& p = v.pieces_[i];
    if (p.empty()) {
      throw FormatError("vocab entry " + std::to_string(i) + " is empty");
    }
    if (!v.index_.emplace(p, static_cast<int>(i)).second) {
      throw FormatError("vocab entry " + std::to_string(i) + " duplicates '" +
                        p + "'");
    }
  }
  auto reserved = [&](std::string_view tok) {
    auto id = v.find(tok);
    if (!id) {
      throw FormatError("vocab is missing reserved token " + std::string(tok));
    }
    return *id;
  };
  v.unk_id_ = reserved(SpecialTokens::kUnk);
  v.cls_id_ = reserved(SpecialTokens::kCls);
  v.sep_id_ = reserved(SpecialTokens::kSep);
  v.pad_id_ = reserved(SpecialTokens::kPad);
  return v;
}

Vocab Vocab::read(std::istream& in) {
  std::vector<std::string> pieces;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pieces.push_back(line);
  }
  return from_pieces(std::move(pieces));
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocab " + path.string());
  return read(in);
}

std::optional<int> Vocab::find(std::string_view piece) const {
  auto it = index_.find(piece);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EncodedSequence::active_length() const {
  std::size_t n = 0;
  while (n < attention_mask.size() && attention_mask[n] == 1) ++n;
  return n;
}

std::vector<TokenPiece> wordpiece_tokenize(std::string_view word,
                                           const Vocab& vocab) {
  std::vector<TokenPiece> out;
  std::size_t start = 0;
  std::string candidate;
  while (start < word.size()) {
    std::size_t end = word.size();
    std::optional<int> hit;
    while (end > start) {
      candidate.clear();
      if (start > 0) candidate.append(kContinuationPrefix);
      candidate.append(word.substr(start, end - start));
      hit = vocab.find(candidate);
      if (hit) break;
      // Step back one code point.
      do {
        --end;
      } while (end > start &&
               (static_cast<unsigned char>(word[end]) & 0xC0) == 0x80);
    }
    if (!hit) {
      return {TokenPiece{std::string(SpecialTokens::kUnk), vocab.unk_id(),
                         false}};
    }
    out.push_back(TokenPiece{candidate, *hit, start > 0});
    start = end;
  }
  return out;
}

std::optional<EncodedSequence> encode_compound(
    std::span<const LabeledWord> words, const Vocab& vocab,
    std::size_t max_len) {
  if (words.empty()) throw ArgumentError("encode_compound: empty word list");

  EncodedSequence seq;
  auto push = [&](int id, std::string text, int label, int mask) {
    seq.ids.push_back(id);
    seq.tokens.push_back(std::move(text));
    seq.labels.push_back(label);
    seq.attention_mask.push_back(mask);
  };

  push(vocab.cls_id(), std::string(SpecialTokens::kCls), kIgnoreLabel, 1);
  for (const auto& w : words) {
    auto pieces = wordpiece_tokenize(w.word, vocab);
    if (seq.ids.size() + pieces.size() + 1 > max_len) return std::nullopt;
    seq.word_starts.push_back(seq.ids.size());
    bool root = true;
    for (auto& p : pieces) {
      push(p.id, std::move(p.text), root ? label_id(w.label) : kIgnoreLabel,
           1);
      root = false;
    }
  }
  push(vocab.sep_id(), std::string(SpecialTokens::kSep), kIgnoreLabel, 1);
  while (seq.ids.size() < max_len) {
    push(vocab.pad_id(), std::string(SpecialTokens::kPad), kIgnoreLabel, 0);
  }
  return seq;
}

std::string apply_tags(std::span<const std::string> words,
                       std::span<const PunctClass> tags) {
  if (words.size() != tags.size()) {
    throw ArgumentError("apply_tags: " + std::to_string(words.size()) +
                        " words but " + std::to_string(tags.size()) + " tags");
  }
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out.append(words[i]);
    if (const char m = class_mark(tags[i])) out.push_back(m);
  }
  return out;
}

std::string apply_tags(std::span<const LabeledWord> words) {
  std::vector<std::string> w;
  std::vector<PunctClass> t;
  w.reserve(words.size());
  t.reserve(words.size());
  for (const auto& lw : words) {
    w.push_back(lw.word);
    t.push_back(lw.label);
  }
  return apply_tags(w, t);
}

void write_encoded_dump(std::ostream& out, const EncodedSequence& seq) {
  out << "piece\tid\tlabel\tmask\n";
  const std::size_t n = seq.active_length();
  for (std::size_t i = 0; i < n; ++i) {
    out << seq.tokens[i] << '\t' << seq.ids[i] << '\t' << seq.labels[i] << '\t'
        << seq.attention_mask[i] << '\n';
  }
}

}  // namespace punct

#ifndef PUNCT_TOKENIZER_H_
#define PUNCT_TOKENIZER_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "punct/corpus.h"
#include "punct/labels.h"

namespace punct {

struct SpecialTokens {
  static constexpr std::string_view kCls = "[CLS]";
  static constexpr std::string_view kSep = "[SEP]";
  static constexpr std::string_view kPad = "[PAD]";
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr int kMaskLabel = kIgnoreLabel;
};

inline constexpr std::string_view kContinuationPrefix = "##";
inline constexpr std::size_t kDefaultMaxLen = 512;

// Immutable piece <-> id table. Continuation pieces are stored with "##".
class Vocab {
 public:
  // Ids are positions in `pieces`. The four reserved tokens must be present.
  static Vocab from_pieces(std::vector<std::string> pieces);
  // One piece per line; line number (from 0) is the id.
  static Vocab read(std::istream& in);
  static Vocab load(const std::filesystem::path& path);

  std::optional<int> find(std::string_view piece) const;
  const std::string& piece(int id) const { return pieces_.at(id); }
  std::size_t size() const { return pieces_.size(); }

  int unk_id() const { return unk_id_; }
  int cls_id() const { return cls_id_; }
  int sep_id() const { return sep_id_; }
  int pad_id() const { return pad_id_; }

 private:
  std::vector<std::string> pieces_;
  std::map<std::string, int, std::less<>> index_;
  int unk_id_ = -1;
  int cls_id_ = -1;
  int sep_id_ = -1;
  int pad_id_ = -1;
};

struct TokenPiece {
  std::string text;
  int id = 0;
  bool is_continuation = false;

  friend bool operator==(const TokenPiece&, const TokenPiece&) = default;
};

// One model input: [CLS] pieces [SEP] [PAD]...
struct EncodedSequence {
  std::vector<int> ids;
  std::vector<std::string> tokens;
  std::vector<int> labels;
  std::vector<int> attention_mask;
  // Position of each word's root piece.
  std::vector<std::size_t> word_starts;

  std::size_t size() const { return ids.size(); }
  // Number of positions up to and including [SEP].
  std::size_t active_length() const;
};

// Greedy longest-match-first. A word with any unmatched remainder becomes a
// single [UNK] piece.
std::vector<TokenPiece> wordpiece_tokenize(std::string_view word,
                                           const Vocab& vocab);

// Returns nullopt (dropped) when the pieces plus [CLS]/[SEP] exceed max_len.
// Only the root piece of each word carries the label; all other positions
// carry kIgnoreLabel. Throws ArgumentError on an empty word list.
std::optional<EncodedSequence> encode_compound(
    std::span<const LabeledWord> words, const Vocab& vocab,
    std::size_t max_len = kDefaultMaxLen);

// Words joined by single spaces with '.', ',' or '?' appended per tag.
std::string apply_tags(std::span<const std::string> words,
                       std::span<const PunctClass> tags);
std::string apply_tags(std::span<const LabeledWord> words);

// Debug dump: "piece<TAB>id<TAB>label<TAB>mask" for the active positions.
void write_encoded_dump(std::ostream& out, const EncodedSequence& seq);

}  // namespace punct

#endif  // PUNCT_TOKENIZER_H_

#ifndef PUNCT_LABELS_H_
#define PUNCT_LABELS_H_

#include <array>
#include <optional>
#include <string_view>

namespace punct {

// Label ids used by the encoder and the tagger. QUESTION must stay 3.
enum class PunctClass : int {
  kEmpty = 0,
  kPeriod = 1,
  kComma = 2,
  kQuestion = 3,
};

inline constexpr int kNumClasses = 4;

// Label value for positions excluded from loss and scoring.
inline constexpr int kIgnoreLabel = -100;

inline constexpr int label_id(PunctClass c) { return static_cast<int>(c); }
inline constexpr PunctClass class_from_id(int id) {
  return static_cast<PunctClass>(id);
}

// Upper-case names: EMPTY, PERIOD, COMMA, QUESTION.
std::string_view class_name(PunctClass c);
std::optional<PunctClass> parse_class_name(std::string_view name);

// The mark rendered after a word, or '\0' for EMPTY.
char class_mark(PunctClass c);
std::optional<PunctClass> class_from_mark(char mark);

// Row/column order of confusion matrices and result tables.
inline constexpr std::array<PunctClass, 4> kMatrixOrder = {
    PunctClass::kPeriod, PunctClass::kComma, PunctClass::kQuestion,
    PunctClass::kEmpty};

// Column order of logit files.
inline constexpr std::array<PunctClass, 4> kLogitFileOrder = {
    PunctClass::kPeriod, PunctClass::kEmpty, PunctClass::kComma,
    PunctClass::kQuestion};

inline constexpr std::array<PunctClass, 3> kPunctuationClasses = {
    PunctClass::kPeriod, PunctClass::kComma, PunctClass::kQuestion};

// Position of `c` in kMatrixOrder.
int matrix_index(PunctClass c);

}  // namespace punct

#endif  // PUNCT_LABELS_H_

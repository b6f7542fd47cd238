#include "punct/labels.h"

namespace punct {

std::string_view class_name(PunctClass c) {
  switch (c) {
    case PunctClass::kEmpty:
      return "EMPTY";
    case PunctClass::kPeriod:
      return "PERIOD";
    case PunctClass::kComma:
      return "COMMA";
    case PunctClass::kQuestion:
      return "QUESTION";
  }
  return "EMPTY";
}

std::optional<PunctClass> parse_class_name(std::string_view name) {
  if (name == "EMPTY") return PunctClass::kEmpty;
  if (name == "PERIOD") return PunctClass::kPeriod;
  if (name == "COMMA") return PunctClass::kComma;
  if (name == "QUESTION") return PunctClass::kQuestion;
  return std::nullopt;
}

char class_mark(PunctClass c) {
  switch (c) {
    case PunctClass::kPeriod:
      return '.';
    case PunctClass::kComma:
      return ',';
    case PunctClass::kQuestion:
      return '?';
    case PunctClass::kEmpty:
      break;
  }
  return '\0';
}

std::optional<PunctClass> class_from_mark(char mark) {
  switch (mark) {
    case '.':
      return PunctClass::kPeriod;
    case ',':
      return PunctClass::kComma;
    case '?':
      return PunctClass::kQuestion;
    default:
      return std::nullopt;
  }
}

int matrix_index(PunctClass c) {
  for (int i = 0; i < 4; ++i) {
    if (kMatrixOrder[i] == c) return i;
  }
  return 3;
}

}  // namespace punct

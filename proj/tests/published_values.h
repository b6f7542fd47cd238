// Printed reference values shared by the unit and acceptance tests.
#ifndef PUNCT_TESTS_PUBLISHED_VALUES_H_
#define PUNCT_TESTS_PUBLISHED_VALUES_H_

#include <array>
#include <cstdint>

namespace punct::testdata {

struct Triple {
  double p, r, f1;
};

// Classes in column order Comma, Period, Question, then Overall.
struct ResultsRow {
  const char* name;
  Triple comma, period, question, overall;
};

inline constexpr std::array<ResultsRow, 5> kResultsTable = {{
    {"Human evaluation", {59.8, 63.3, 61.5}, {87.2, 80.4, 83.6},
     {100.0, 100.0, 100.0}, {82.3, 81.2, 81.7}},
    {"Swedish BERT (cased)", {79.2, 64.2, 70.9}, {90.2, 89.3, 89.7},
     {72.4, 79.0, 76.0}, {80.6, 77.5, 78.9}},
    {"Multilingual BERT", {81.3, 79.3, 80.3}, {82.4, 83.2, 82.8},
     {51.6, 21.3, 30.2}, {71.8, 61.3, 64.4}},
    {"Hungarian BERT", {84.4, 87.3, 85.8}, {89.0, 93.1, 91.0},
     {73.5, 66.7, 69.9}, {82.3, 82.4, 82.2}},
    {"Chinese BERT-BLSTM-CRF", {74.2, 69.7, 71.9}, {84.6, 79.2, 81.8},
     {76.0, 70.4, 73.1}, {78.3, 73.1, 75.6}},
}};

// Human confusion matrix, rows predicted, columns true, both in the order
// PERIOD, COMMA, QUESTION, EMPTY.
inline constexpr std::array<std::array<std::int64_t, 4>, 4> kHumanMatrix = {{
    {524, 11, 0, 66},
    {52, 198, 0, 81},
    {0, 0, 1, 0},
    {76, 104, 0, 9937},
}};

inline constexpr std::int64_t kEmptyRowOff[3] = {75, 455, 2};
inline constexpr std::int64_t kEmptyColOff[3] = {119, 362, 1};
inline constexpr std::int64_t kPeriodTpBefore = 3772;
inline constexpr std::int64_t kPeriodTpAfter = 2978;

}  // namespace punct::testdata

#endif  // PUNCT_TESTS_PUBLISHED_VALUES_H_

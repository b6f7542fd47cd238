// One line per primary acceptance criterion. Exit status is non-zero when any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "published_values.h"
#include "punct/batcher.h"
#include "punct/cli.h"
#include "punct/corpus.h"
#include "punct/eval.h"
#include "punct/humaneval.h"
#include "punct/tagger.h"
#include "punct/tokenizer.h"

namespace fs = std::filesystem;
using namespace punct;

namespace {

const fs::path kData = PUNCT_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int cli(std::vector<std::string> args, std::string* err_out = nullptr) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  if (err_out) *err_out = err.str();
  return code;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("punct_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// ---------------------------------------------------------------------------

Outcome results_table() {
  Outcome o;
  int f1_ok = 0, overall_ok = 0;
  for (const auto& row : testdata::kResultsTable) {
    const testdata::Triple* cls[3] = {&row.comma, &row.period, &row.question};
    const char* cls_name[3] = {"Comma", "Period", "Question"};
    for (int c = 0; c < 3; ++c) {
      const double f1 = f1_score(cls[c]->p, cls[c]->r);
      const bool ok = std::abs(f1 - cls[c]->f1) <= 0.1 + 1e-9;
      f1_ok += ok;
      o.require(ok, std::string(row.name) + " " + cls_name[c] + " F1 from P=" +
                        fmt("%.1f", cls[c]->p) + ", R=" + fmt("%.1f", cls[c]->r) +
                        " is " + fmt("%.3f", f1) + ", printed " +
                        fmt("%.1f", cls[c]->f1));
    }
    const double mean[3] = {
        (row.comma.p + row.period.p + row.question.p) / 3,
        (row.comma.r + row.period.r + row.question.r) / 3,
        (row.comma.f1 + row.period.f1 + row.question.f1) / 3};
    const double printed[3] = {row.overall.p, row.overall.r, row.overall.f1};
    const char* part[3] = {"P", "R", "F1"};
    for (int k = 0; k < 3; ++k) {
      const bool ok = std::abs(mean[k] - printed[k]) <= 0.1 + 1e-9;
      overall_ok += ok;
      o.require(ok, std::string(row.name) + " Overall " + part[k] + " mean " +
                        fmt("%.3f", mean[k]) + ", printed " +
                        fmt("%.1f", printed[k]));
    }
  }
  o.detail = std::to_string(f1_ok) + "/15 F1 cells, " +
             std::to_string(overall_ok) + "/15 overall cells" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome human_baseline() {
  Outcome o;
  const auto r = metrics(ConfusionMatrix4::from_rows(testdata::kHumanMatrix));
  auto check = [&](const std::string& what, double got, double want) {
    o.require(round_percent(got) == want,
              what + " " + fmt("%.1f", round_percent(got)) + " != " +
                  fmt("%.1f", want));
  };
  const auto& p = r.of(PunctClass::kPeriod);
  const auto& c = r.of(PunctClass::kComma);
  const auto& q = r.of(PunctClass::kQuestion);
  check("PERIOD P", p.precision, 87.2);
  check("PERIOD R", p.recall, 80.4);
  check("PERIOD F1", p.f1, 83.6);
  check("COMMA P", c.precision, 59.8);
  check("COMMA R", c.recall, 63.3);
  check("COMMA F1", c.f1, 61.5);
  check("QUESTION P", q.precision, 100.0);
  check("QUESTION R", q.recall, 100.0);
  check("QUESTION F1", q.f1, 100.0);
  check("macro P", r.macro_punct.precision, 82.3);
  check("macro R", r.macro_punct.recall, 81.2);
  check("macro F1", r.macro_punct.f1, 81.7);
  if (o.pass) o.detail = "12/12 values exact at one decimal";
  return o;
}

Outcome empty_balance_check() {
  Outcome o;
  const auto* row = testdata::kEmptyRowOff;
  const auto* col = testdata::kEmptyColOff;
  const auto m = ConfusionMatrix4::from_rows({{
      {3772, 40, 3, col[0]},
      {20, 2100, 1, col[1]},
      {2, 4, 60, col[2]},
      {row[0], row[1], row[2], 70000},
  }});
  const auto b = empty_balance(m);
  o.require(b.fp_empty == 532, "fp_empty " + std::to_string(b.fp_empty));
  o.require(b.fn_empty == 482, "fn_empty " + std::to_string(b.fn_empty));
  if (o.pass) o.detail = "(532, 482)";
  return o;
}

Outcome debias() {
  Outcome o;
  const auto before = testdata::kPeriodTpBefore;
  const auto after = testdata::kPeriodTpAfter;
  std::vector<PunctClass> gold, pred;
  std::vector<std::size_t> finals;
  for (std::int64_t i = 0; i < before; ++i) {
    if (i < before - after) finals.push_back(gold.size());
    gold.push_back(PunctClass::kPeriod);
    pred.push_back(PunctClass::kPeriod);
    gold.push_back(PunctClass::kEmpty);
    pred.push_back(PunctClass::kEmpty);
  }
  const auto raw = confusion(gold, pred);
  const auto fixed = debias_batch_final(gold, pred, finals);
  o.require(raw.true_positives(PunctClass::kPeriod) == before, "raw TP");
  o.require(fixed.true_positives(PunctClass::kPeriod) == after,
            "debiased TP " +
                std::to_string(fixed.true_positives(PunctClass::kPeriod)));
  if (o.pass) {
    o.detail = std::to_string(before) + " - " + std::to_string(finals.size()) +
               " = " + std::to_string(after);
  }
  return o;
}

Outcome preprocessing_golden() {
  Outcome o;
  const Vocab v = Vocab::from_pieces({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "mör",
                                      "##lunda", "stationer", "samt", "de",
                                      "icke", "aldrig", "oavsett", "vad", "igen"});
  struct Row {
    std::string original, preprocessed;
    std::vector<std::string> tokens;
    std::vector<int> labels;  // per token, -100 for continuations
  };
  const std::vector<Row> rows = {
      {"Mörlunda stationer, samt de icke!", "mörlunda stationer, samt de icke.",
       {"mör", "##lunda", "stationer", "samt", "de", "icke"},
       {0, -100, 2, 0, 0, 1}},
      {"aldrig - oavsett vad - igen.", "aldrig, oavsett vad, igen.",
       {"aldrig", "oavsett", "vad", "igen"},
       {2, 0, 2, 1}},
  };
  for (const auto& row : rows) {
    const std::string clean = normalize_text(row.original);
    o.require(clean == row.preprocessed, "normalize gave '" + clean + "'");
    const auto ex = extract_labels(std::string_view(clean));
    std::vector<LabeledWord> words;
    for (const auto& s : ex.sentences) {
      words.insert(words.end(), s.words.begin(), s.words.end());
    }
    const auto seq = encode_compound(words, v, kDefaultMaxLen);
    if (!seq) {
      o.require(false, "sequence dropped");
      continue;
    }
    const std::size_t n = seq->active_length();
    const std::vector<std::string> toks(seq->tokens.begin() + 1,
                                        seq->tokens.begin() + n - 1);
    const std::vector<int> labels(seq->labels.begin() + 1,
                                  seq->labels.begin() + n - 1);
    o.require(toks == row.tokens, "tokens differ for '" + clean + "'");
    o.require(labels == row.labels, "labels differ for '" + clean + "'");
    o.require(seq->labels[0] == kIgnoreLabel && seq->labels[n - 1] == kIgnoreLabel,
              "CLS/SEP not masked");
  }
  const auto one = encode_compound(
      std::vector<LabeledWord>{{"mörlunda", PunctClass::kQuestion}}, v);
  o.require(one && std::vector<int>(one->labels.begin(), one->labels.begin() + 5) ==
                       std::vector<int>{-100, 3, -100, -100, -100},
            "mörlunda label/mask vector");
  if (o.pass) o.detail = "2/2 rows and the mörlunda mask vector";
  return o;
}

// ---- pipeline properties ---------------------------------------------------

void tokenizer_properties(Outcome& o, std::size_t* words_checked) {
  std::vector<std::string> pieces = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  const std::vector<std::string> syll = {"ka", "lo", "mör", "st", "å", "en",
                                         "ni", "ä", "ru", "bo"};
  for (const auto& s : syll) {
    pieces.push_back(s);
    pieces.push_back("##" + s);
  }
  pieces.push_back("kalo");
  const Vocab v = Vocab::from_pieces(pieces);
  std::mt19937_64 gen(101);
  std::size_t checked = 0;
  while (checked < 12000) {
    std::vector<LabeledWord> words;
    const std::size_t n = 1 + gen() % 20;
    for (std::size_t i = 0; i < n; ++i) {
      std::string w;
      const std::size_t k = 1 + gen() % 4;
      for (std::size_t j = 0; j < k; ++j) w += syll[gen() % syll.size()];
      if (gen() % 25 == 0) w += "x";  // forces [UNK]
      words.push_back({w, class_from_id(static_cast<int>(gen() % 4))});
    }
    const auto seq = encode_compound(words, v, 64);
    if (!seq) continue;
    std::size_t labeled = 0;
    ClassCounts from_seq;
    for (std::size_t p = 0; p < seq->size(); ++p) {
      if (seq->labels[p] == kIgnoreLabel) continue;
      ++labeled;
      from_seq.add(class_from_id(seq->labels[p]));
    }
    ClassCounts from_words;
    for (const auto& w : words) from_words.add(w.label);
    o.require(labeled == words.size(), "labeled positions != words");
    o.require(from_seq == from_words, "label counts differ");
    // Pieces rebuild each word unless it became [UNK].
    for (std::size_t i = 0; i < words.size(); ++i) {
      const std::size_t start = seq->word_starts[i];
      const std::size_t end = i + 1 < words.size() ? seq->word_starts[i + 1]
                                                   : seq->active_length() - 1;
      std::string rebuilt;
      for (std::size_t p = start; p < end; ++p) {
        const std::string& t = seq->tokens[p];
        rebuilt += p == start ? t : t.substr(2);
      }
      const bool unk = seq->tokens[start] == "[UNK]";
      o.require(unk ? end == start + 1 : rebuilt == words[i].word,
                "pieces do not rebuild '" + words[i].word + "'");
      o.require(seq->labels[start] == label_id(words[i].label), "root label");
    }
    std::vector<PunctClass> tags;
    for (const auto& w : words) tags.push_back(w.label);
    std::vector<std::string> plain;
    for (const auto& w : words) plain.push_back(w.word);
    const auto back = extract_labels(std::string_view(apply_tags(plain, tags)));
    std::vector<LabeledWord> again;
    for (const auto& s : back.sentences) {
      again.insert(again.end(), s.words.begin(), s.words.end());
    }
    o.require(again == words, "apply_tags/extract_labels round trip");
    checked += words.size();
    if (!o.pass) break;
  }
  *words_checked = checked;
}

void batcher_properties(Outcome& o, std::size_t* plans) {
  std::mt19937_64 gen(202);
  std::size_t count = 0;
  for (int t = 0; t < 300 && o.pass; ++t) {
    Dataset ds;
    const std::size_t docs = 1 + gen() % 4;
    for (std::size_t d = 0; d < docs; ++d) {
      LabeledDocument doc{"d" + std::to_string(d), {}};
      const std::size_t n = gen() % 40;
      for (std::size_t s = 0; s < n; ++s) {
        doc.sentences.push_back(
            {{{"w" + std::to_string(s), PunctClass::kPeriod}}, false});
      }
      ds.documents.push_back(doc);
    }
    const std::uint64_t seed = gen();
    const auto plan = plan_dataset(ds, seed);
    std::vector<LabeledWord> stream;
    std::map<std::string, std::size_t> next;
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
      const auto& grp = plan.groups[g];
      const bool last_in_doc =
          g + 1 == plan.groups.size() || plan.groups[g + 1].doc_id != grp.doc_id;
      o.require(grp.sentences.size() <= kMaxGroupSize, "group too large");
      o.require(last_in_doc || grp.sentences.size() >= kMinGroupSize,
                "short group before document end");
      o.require(grp.start_sentence == next[grp.doc_id], "gap or overlap");
      next[grp.doc_id] += grp.sentences.size();
      const auto w = grp.words();
      stream.insert(stream.end(), w.begin(), w.end());
    }
    o.require(stream == flatten(ds), "plan does not partition the corpus");
    std::ostringstream a, b;
    write_plan(a, plan);
    write_plan(b, plan_dataset(ds, seed));
    o.require(a.str() == b.str(), "plan not deterministic");
    ++count;
  }
  *plans = count;
}

void gradient_check(Outcome& o, std::size_t* coords, double* worst_out) {
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> u(-1, 1);
  std::size_t checked = 0;
  double worst = 0;
  for (int model_no = 0; model_no < 5; ++model_no) {
    const std::uint32_t dim = 64;
    auto m = ContextWindowModel<double>::zeros(2, dim);
    m.weights = Eigen::MatrixXd::NullaryExpr(4, dim, [&] { return u(gen); });
    m.bias = Eigen::Vector4d::NullaryExpr([&] { return u(gen); });
    std::vector<FeaturizedSequence> batch(4);
    for (auto& s : batch) {
      for (int i = 0; i < 6; ++i) {
        std::vector<std::uint32_t> f;
        for (int k = 0; k < 6; ++k) f.push_back(gen() % dim);
        s.features.push_back(f);
        s.labels.push_back(static_cast<int>(gen() % 4));
      }
    }
    const std::span<const FeaturizedSequence> span(batch);
    const auto lg = loss_and_grad(m, span);
    for (int k = 0; k < 50; ++k) {
      const int row = static_cast<int>(gen() % 4);
      const int col = static_cast<int>(gen() % dim);
      const bool bias = k % 10 == 0;
      double& theta = bias ? m.bias(row) : m.weights(row, col);
      const double saved = theta, eps = 1e-5;
      theta = saved + eps;
      const double up = loss_and_grad(m, span).loss;
      theta = saved - eps;
      const double down = loss_and_grad(m, span).loss;
      theta = saved;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = bias ? lg.grad.bias(row) : lg.grad.weights(row, col);
      const double rel = std::abs(numeric - analytic) /
                         std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      worst = std::max(worst, rel);
      ++checked;
    }
  }
  o.require(worst < 1e-4, "gradient relative error " + fmt("%.2e", worst));
  o.require(checked >= 200, "too few coordinates");
  *coords = checked;
  *worst_out = worst;
}

// Runs preprocess -> split -> plan -> train -> predict -> eval into `dir`.
bool run_pipeline(const fs::path& dir, std::string* err) {
  const std::string o = dir.string();
  const std::string vocab = (kData / "toy" / "vocab.txt").string();
  const std::vector<std::vector<std::string>> steps = {
      {"-o", o, "preprocess", "--corpus", (kData / "toy" / "corpus").string()},
      {"-o", o, "split", "--labels", o + "/labels.tsv"},
      {"-o", o, "plan", "--labels", o + "/train.tsv"},
      {"-o", o, "train", "--labels", o + "/train.tsv", "--vocab", vocab,
       "--plan", o + "/train.plan.tsv", "--epochs", "10"},
      {"-o", o, "predict", "--input", o + "/train.tsv", "--vocab", vocab,
       "--plan", o + "/train.plan.tsv", "--model", o + "/model.txt"},
      {"-o", o + "/eval", "eval", "--pred", o + "/train.pred.tsv"},
      {"-o", o, "predict", "--input", o + "/test.tsv", "--vocab", vocab,
       "--model", o + "/model.txt"},
      {"-o", o + "/eval_test", "eval", "--pred", o + "/test.pred.tsv"},
  };
  for (const auto& s : steps) {
    if (cli(s, err) != 0) {
      *err = s[2] + ": " + *err;
      return false;
    }
  }
  return true;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      files[fs::relative(e.path(), dir).string()] = read_file(e.path());
    }
  }
  return files;
}

Outcome pipeline_properties() {
  Outcome o;
  std::size_t words = 0, plans = 0, coords = 0;
  double worst = 0;
  tokenizer_properties(o, &words);
  batcher_properties(o, &plans);
  gradient_check(o, &coords, &worst);

  const fs::path a = fresh_dir("run_a"), b = fresh_dir("run_b");
  std::string err;
  double acc = -1, held_out = -1;
  bool identical = false;
  if (!run_pipeline(a, &err) || !run_pipeline(b, &err)) {
    o.require(false, "pipeline failed: " + err);
  } else {
    const auto sa = snapshot(a), sb = snapshot(b);
    identical = sa == sb && !sa.empty();
    o.require(identical, "runs differ");
    const auto report = nlohmann::json::parse(read_file(a / "eval" / "report.json"));
    acc = report["raw"]["accuracy"].get<double>();
    o.require(acc >= 0.99, "toy accuracy " + fmt("%.4f", acc));
    held_out = nlohmann::json::parse(read_file(a / "eval_test" / "report.json"))
        ["raw"]["accuracy"].get<double>();
  }
  std::string d = std::to_string(words) + " words, " + std::to_string(plans) +
                  " plans, " + std::to_string(coords) +
                  " gradient coords (worst rel " + fmt("%.1e", worst) +
                  "), toy accuracy " + fmt("%.4f", acc) + " (held out " +
                  fmt("%.4f", held_out) + ")" +
                  (identical ? ", identical reruns" : "");
  o.detail = o.detail.empty() ? d : d + "; " + o.detail;
  return o;
}

Outcome human_generation() {
  Outcome o;
  const fs::path dir = fresh_dir("human");
  // 73,101 words over several documents and sentences of mixed length.
  std::mt19937_64 gen(404);
  Dataset ds;
  std::vector<std::string> stream;
  std::size_t made = 0;
  while (made < 73101) {
    LabeledDocument doc{"doc" + std::to_string(ds.documents.size()), {}};
    const std::size_t target = std::min<std::size_t>(73101 - made, 9000);
    std::size_t in_doc = 0;
    while (in_doc < target) {
      Sentence s;
      const std::size_t len = std::min<std::size_t>(target - in_doc, 2 + gen() % 14);
      for (std::size_t i = 0; i < len; ++i) {
        s.words.push_back({"w" + std::to_string(made + in_doc + i),
                           gen() % 6 == 0 ? PunctClass::kComma : PunctClass::kEmpty});
        stream.push_back(s.words.back().word);
      }
      s.words.back().label = PunctClass::kPeriod;
      in_doc += len;
      doc.sentences.push_back(std::move(s));
    }
    made += in_doc;
    ds.documents.push_back(std::move(doc));
  }
  {
    std::ofstream out(dir / "test.tsv", std::ios::binary);
    write_labels_tsv(out, ds);
  }
  std::string err;
  if (cli({"-o", dir.string(), "human", "gen", "--labels",
           (dir / "test.tsv").string()},
          &err) != 0) {
    o.require(false, "human gen failed: " + err);
    return o;
  }
  std::size_t full = 0, tests = 0, last = 0, pos = 0;
  bool order_ok = true;
  for (std::size_t i = 1;; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "test_%03zu", i);
    const fs::path p = dir / "tests" / (std::string(id) + ".txt");
    if (!fs::exists(p)) break;
    ++tests;
    std::istringstream in(read_file(p));
    std::string w;
    std::size_t n = 0;
    while (in >> w) {
      order_ok = order_ok && pos < stream.size() && stream[pos] == w;
      ++pos;
      ++n;
    }
    full += n == kWordsPerTest;
    last = n;
  }
  o.require(tests == 113, std::to_string(tests) + " tests");
  o.require(full == 112, std::to_string(full) + " full tests");
  o.require(last == 301, "last test has " + std::to_string(last) + " words");
  o.require(order_ok && pos == stream.size(), "tests are not the ordered stream");
  if (o.pass) o.detail = "112 x 650 + 301, disjoint and in order";
  return o;
}

Outcome replay_fidelity() {
  Outcome o;
  const Vocab v = Vocab::load(kData / "replay" / "vocab.txt");
  auto predict_file = [&](const std::string& stem) {
    auto replay = LogitReplay::load(kData / "replay" / (stem + ".jsonl"));
    const std::string text = read_file(kData / "replay" / (stem + ".txt"));
    std::vector<LabeledWord> words;
    for (const auto& s : extract_labels(std::string_view(text)).sentences) {
      words.insert(words.end(), s.words.begin(), s.words.end());
    }
    const auto seq = encode_compound(words, v);
    std::map<std::string, PunctClass> out;
    const auto pred = predict(replay, *seq);
    for (std::size_t i = 0; i < words.size(); ++i) {
      out.emplace(words[i].word, pred[i]);
    }
    return out;
  };
  const auto news = predict_file("recent_news");
  const auto fiction = predict_file("old_fiction");
  auto expect = [&](const std::map<std::string, PunctClass>& m,
                    const std::string& w, PunctClass c) {
    const auto it = m.find(w);
    o.require(it != m.end() && it->second == c,
              w + " predicted " +
                  (it == m.end() ? "nothing" : std::string(class_name(it->second))));
  };
  expect(news, "grader", PunctClass::kPeriod);
  expect(news, "från", PunctClass::kEmpty);
  expect(fiction, "himmelen", PunctClass::kPeriod);
  if (o.pass) o.detail = "grader PERIOD, från EMPTY, himmel(en) PERIOD";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"results-table cross-check", results_table},
      {"human-baseline reproduction", human_baseline},
      {"EMPTY balance", empty_balance_check},
      {"debias arithmetic", debias},
      {"preprocessing golden rows", preprocessing_golden},
      {"pipeline properties", pipeline_properties},
      {"human-test generation", human_generation},
      {"replay-backend fidelity", replay_fidelity},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    failed += !o.pass;
    std::printf("%s  %-28s %s (%.0f ms)\n", o.pass ? "PASS" : "FAIL",
                name.c_str(), o.detail.c_str(), ms);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

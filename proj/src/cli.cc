#include "punct/cli.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "punct/batcher.h"
#include "punct/corpus.h"
#include "punct/error.h"
#include "punct/eval.h"
#include "punct/humaneval.h"
#include "punct/tagger.h"
#include "punct/tokenizer.h"
#include "punct/utf8.h"

namespace punct::cli {

namespace fs = std::filesystem;

namespace {

struct TrainOptions {
  fs::path labels;
  fs::path plan;
  int epochs = 10;
  double learning_rate = 0.5;
  std::size_t batch_size = 4;
  double momentum = 0.9;
  int radius = 2;
  std::uint32_t dim = 1u << 16;
  std::vector<double> class_weights;
};

struct Options {
  RunConfig run;
  std::vector<fs::path> stats_labels;
  fs::path labels;
  fs::path input;
  fs::path plan;
  TrainOptions train;
  fs::path pred;
  fs::path matrix;
  std::string system_name = "system";
  std::size_t words_per_test = kWordsPerTest;
  fs::path tests_dir;
  std::vector<fs::path> annotations;
  fs::path scores_dir;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

Dataset load_labels(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_labels_tsv(in);
}

// Labeled TSV as-is; any other file is read as raw text and labeled.
Dataset load_input(const fs::path& path, std::ostream& err) {
  if (path.extension() == ".tsv") return load_labels(path);
  RawDocument doc{path.stem().string(), read_file(path)};
  utf8::validate(doc.text);
  std::vector<Diagnostic> warnings;
  Dataset ds;
  ds.documents.push_back(label_document(doc, &warnings));
  for (const auto& w : warnings) {
    if (w.kind == Diagnostic::Kind::kDroppedMark) {
      err << "warning: " << path.filename().string() << ": " << w.message
          << "\n";
    }
  }
  return ds;
}

BatchPlan load_or_make_plan(const Dataset& ds, const fs::path& plan_path,
                            std::uint64_t seed) {
  if (plan_path.empty()) return plan_dataset(ds, seed);
  std::ifstream in(plan_path);
  if (!in) throw Error("cannot open plan " + plan_path.string());
  return apply_plan(ds, read_plan(in));
}

fs::path prepare_out(const RunConfig& run) {
  fs::create_directories(run.out_dir);
  return run.out_dir;
}

// ---------------------------------------------------------------------------

int run_preprocess(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.run.corpus_dir.empty()) throw ConfigError("preprocess needs --corpus");
  const auto docs = load_corpus_dir(o.run.corpus_dir);
  const fs::path dir = prepare_out(o.run);
  fs::create_directories(dir / "clean");
  Dataset ds;
  std::size_t n_warn = 0;
  for (const auto& raw : docs) {
    const CleanDocument clean = normalize(raw);
    write_file(dir / "clean" / (clean.id + ".txt"), clean.text);
    Extraction ex = extract_labels(clean);
    for (const auto& w : ex.warnings) {
      err << "warning: " << raw.id << ": " << w.message << " (byte "
          << w.byte_offset << ")\n";
      ++n_warn;
    }
    ds.documents.push_back({clean.id, std::move(ex.sentences)});
  }
  std::ostringstream tsv;
  write_labels_tsv(tsv, ds);
  write_file(dir / "labels.tsv", tsv.str());
  const auto c = dataset_stats(ds);
  out << "preprocessed " << docs.size() << " documents, " << c.words
      << " words, " << ds.sentence_count() << " sentences, " << n_warn
      << " warnings\n";
  return kExitOk;
}

int run_stats(const Options& o, std::ostream& out, std::ostream&) {
  std::vector<StatsColumn> cols;
  if (!o.run.corpus_dir.empty()) {
    Dataset ds;
    for (const auto& raw : load_corpus_dir(o.run.corpus_dir)) {
      ds.documents.push_back(label_document(raw));
    }
    cols.push_back({"Full set", ds.documents.size(), dataset_stats(ds)});
  }
  for (const auto& p : o.stats_labels) {
    const Dataset ds = load_labels(p);
    cols.push_back({p.stem().string(), ds.documents.size(), dataset_stats(ds)});
  }
  if (cols.empty()) throw ConfigError("stats needs --labels or --corpus");
  const fs::path dir = prepare_out(o.run);
  const std::string table = format_stats_table(cols);
  write_file(dir / "stats.txt", table);
  write_file(dir / "stats.json", stats_json(cols.front().counts));
  for (std::size_t i = 1; i < cols.size(); ++i) {
    write_file(dir / (cols[i].name + ".stats.json"),
               stats_json(cols[i].counts));
  }
  out << table;
  return kExitOk;
}

int run_split(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.labels.empty()) throw ConfigError("split needs --labels");
  const Dataset ds = load_labels(o.labels);
  SplitConfig cfg{o.run.train_fraction, o.run.seed};
  const Split s = split_dataset(ds, cfg);
  for (const auto& w : s.warnings) err << "warning: " << w << "\n";
  const fs::path dir = prepare_out(o.run);
  std::ostringstream train, test;
  write_labels_tsv(train, s.train);
  write_labels_tsv(test, s.test);
  write_file(dir / "train.tsv", train.str());
  write_file(dir / "test.tsv", test.str());
  out << "train: " << s.train.documents.size() << " documents, "
      << dataset_stats(s.train).words << " words; test: "
      << s.test.documents.size() << " documents, "
      << dataset_stats(s.test).words << " words\n";
  return kExitOk;
}

int run_plan(const Options& o, std::ostream& out, std::ostream&) {
  if (o.labels.empty()) throw ConfigError("plan needs --labels");
  const Dataset ds = load_labels(o.labels);
  const BatchPlan plan = plan_dataset(ds, o.run.seed);
  const fs::path dir = prepare_out(o.run);
  std::ostringstream ss;
  write_plan(ss, plan);
  const fs::path path = dir / (o.labels.stem().string() + ".plan.tsv");
  write_file(path, ss.str());
  std::size_t short_groups = 0;
  for (const auto& g : plan.groups) short_groups += g.final_group_short;
  out << "planned " << plan.groups.size() << " compound sentences ("
      << short_groups << " short) -> " << path.filename().string() << "\n";
  return kExitOk;
}

struct EncodedPlan {
  std::vector<EncodedSequence> sequences;
  std::vector<std::size_t> group_of;  // plan group index per sequence
  std::size_t dropped = 0;
};

EncodedPlan encode_plan(const BatchPlan& plan, const Vocab& vocab,
                        std::size_t max_len) {
  EncodedPlan ep;
  for (const auto& g : plan.groups) {
    const auto words = g.words();
    if (words.empty()) continue;
    auto seq = encode_compound(words, vocab, max_len);
    if (!seq) {
      ++ep.dropped;
      continue;
    }
    ep.sequences.push_back(std::move(*seq));
    ep.group_of.push_back(g.index);
  }
  return ep;
}

int run_train(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.train.labels.empty()) throw ConfigError("train needs --labels");
  if (o.run.vocab_path.empty()) throw ConfigError("train needs --vocab");
  const Dataset ds = load_labels(o.train.labels);
  const Vocab vocab = Vocab::load(o.run.vocab_path);
  const BatchPlan plan = load_or_make_plan(ds, o.train.plan, o.run.seed);
  const EncodedPlan ep = encode_plan(plan, vocab, o.run.max_len);
  if (ep.dropped > 0) {
    err << "warning: dropped " << ep.dropped
        << " compound sentence(s) longer than " << o.run.max_len
        << " tokens\n";
  }

  TrainingConfig cfg;
  cfg.learning_rate = o.train.learning_rate;
  cfg.epochs = o.train.epochs;
  cfg.batch_size = o.train.batch_size;
  cfg.seed = o.run.seed;
  cfg.momentum = o.train.momentum;
  if (!o.train.class_weights.empty()) {
    if (o.train.class_weights.size() != 4) {
      throw ConfigError("--class-weights takes 4 values (EMPTY PERIOD COMMA QUESTION)");
    }
    for (int c = 0; c < 4; ++c) cfg.class_weights[c] = o.train.class_weights[c];
  }

  auto model = ContextWindowModel<double>::zeros(o.train.radius, o.train.dim,
                                                 o.run.seed);
  const auto result = train(std::move(model), ep.sequences, cfg);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  const fs::path dir = prepare_out(o.run);
  const fs::path model_path =
      o.run.model_path.empty() ? dir / "model.txt" : dir / o.run.model_path.filename();
  save_model(model_path, result.model);
  std::ostringstream curve;
  char buf[64];
  curve << "epoch\tloss\n";
  std::snprintf(buf, sizeof buf, "%.17g", result.initial_loss);
  curve << "0\t" << buf << "\n";
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", result.epoch_loss[e]);
    curve << e + 1 << '\t' << buf << "\n";
  }
  write_file(dir / "train_loss.tsv", curve.str());
  out << "trained on " << ep.sequences.size() << " sequences for "
      << cfg.epochs << " epochs; loss " << result.initial_loss << " -> "
      << (result.epoch_loss.empty() ? result.initial_loss
                                    : result.epoch_loss.back())
      << "\n";
  return kExitOk;
}

int run_predict(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw ConfigError("predict needs --input");
  if (o.run.vocab_path.empty()) throw ConfigError("predict needs --vocab");
  const Dataset ds = load_input(o.input, err);
  const Vocab vocab = Vocab::load(o.run.vocab_path);
  const BatchPlan plan = load_or_make_plan(ds, o.plan, o.run.seed);
  const EncodedPlan ep = encode_plan(plan, vocab, o.run.max_len);
  if (ep.dropped > 0) {
    err << "warning: dropped " << ep.dropped
        << " compound sentence(s) longer than " << o.run.max_len
        << " tokens\n";
  }

  std::unique_ptr<TaggerBackend> backend;
  std::optional<ContextWindowModel<double>> model;
  const std::string& sel = o.run.backend;
  if (sel == "trainable") {
    if (o.run.model_path.empty()) {
      throw ConfigError("the trainable backend needs --model");
    }
    model = load_model(o.run.model_path);
    backend = std::make_unique<ContextWindowBackend<double>>(*model);
  } else if (sel.rfind("replay:", 0) == 0) {
    backend = std::make_unique<LogitReplay>(LogitReplay::load(sel.substr(7)));
  } else {
    throw ConfigError("unknown backend '" + sel +
                      "' (expected trainable or replay:<file>)");
  }

  std::ostringstream text, tsv, logit_file;
  write_logit_header(logit_file);
  tsv << "# word\tgold\tpred\tbatch_final\n";
  std::size_t words = 0;
  for (std::size_t i = 0; i < ep.sequences.size(); ++i) {
    const EncodedSequence& seq = ep.sequences[i];
    const auto z = backend->logits(seq);
    const auto pred = predict_from_logits(seq, z);
    export_logits(logit_file, seq, z);
    const auto gold = plan.groups[ep.group_of[i]].words();
    std::vector<std::string> w;
    for (std::size_t k = 0; k < gold.size(); ++k) {
      w.push_back(gold[k].word);
      tsv << gold[k].word << '\t' << class_name(gold[k].label) << '\t'
          << class_name(pred[k]) << '\t' << (k + 1 == gold.size() ? 1 : 0)
          << '\n';
    }
    words += gold.size();
    text << apply_tags(w, pred) << '\n';
  }
  if (auto* replay = dynamic_cast<LogitReplay*>(backend.get());
      replay != nullptr && replay->remaining() > 0) {
    err << "warning: " << replay->remaining()
        << " logit record(s) left unused\n";
  }

  const fs::path dir = prepare_out(o.run);
  const std::string stem = o.input.stem().string();
  write_file(dir / (stem + ".punct.txt"), text.str());
  write_file(dir / (stem + ".pred.tsv"), tsv.str());
  write_file(dir / (stem + ".logits.jsonl"), logit_file.str());
  out << "predicted " << words << " words in " << ep.sequences.size()
      << " sequences -> " << stem << ".punct.txt\n";
  return kExitOk;
}

struct PredRows {
  std::vector<PunctClass> gold;
  std::vector<PunctClass> pred;
  std::vector<std::size_t> finals;
};

PredRows read_pred(const fs::path& path) {
  std::istringstream in(read_file(path));
  PredRows rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const auto g = cols.size() >= 3 ? parse_class_name(cols[1]) : std::nullopt;
    const auto p = cols.size() >= 3 ? parse_class_name(cols[2]) : std::nullopt;
    if (!g || !p) {
      throw FormatError(path.filename().string() + " line " +
                        std::to_string(line_no) +
                        ": expected word<TAB>gold<TAB>pred[<TAB>final]");
    }
    if (cols.size() >= 4 && cols[3] == "1") rows.finals.push_back(rows.gold.size());
    rows.gold.push_back(*g);
    rows.pred.push_back(*p);
  }
  return rows;
}

int run_eval(const Options& o, std::ostream& out, std::ostream&) {
  EvalSummary s;
  if (!o.matrix.empty()) {
    std::istringstream in(read_file(o.matrix));
    s.matrix = parse_matrix(in);
    s.report = metrics<double>(s.matrix);
  } else if (!o.pred.empty()) {
    const PredRows rows = read_pred(o.pred);
    s.matrix = confusion(rows.gold, rows.pred);
    s.report = metrics<double>(s.matrix);
    s.debiased_matrix = debias_batch_final(rows.gold, rows.pred,
                                           std::span<const std::size_t>(rows.finals));
    s.debiased = metrics<double>(*s.debiased_matrix);
  } else {
    throw ConfigError("eval needs --pred or --matrix");
  }
  const fs::path dir = prepare_out(o.run);
  std::string text = format_results_table({{o.system_name, s.report}});
  text += "\n" + format_report(s);
  write_file(dir / "report.txt", text);
  write_file(dir / "report.json", report_json(s));
  write_file(dir / "confusion.txt", format_matrix(s.matrix));
  if (s.debiased_matrix) {
    write_file(dir / "confusion_debiased.txt", format_matrix(*s.debiased_matrix));
  }
  out << format_results_table({{o.system_name, s.report}});
  return kExitOk;
}

int run_human_gen(const Options& o, std::ostream& out, std::ostream&) {
  if (o.labels.empty()) throw ConfigError("human gen needs --labels");
  const Dataset ds = load_labels(o.labels);
  if (ds.documents.empty()) throw ArgumentError("test set is empty");
  const auto tests = generate_tests(ds, o.words_per_test);
  const fs::path dir = prepare_out(o.run) / "tests";
  fs::create_directories(dir);
  std::ostringstream index;
  index << "# id\twords\n";
  std::size_t full = 0;
  for (const auto& t : tests) {
    write_test(dir, t);
    write_file(dir / (t.id + ".instructions.txt"), instruction_sheet(t));
    index << t.id << '\t' << t.words.size() << '\n';
    full += t.words.size() == o.words_per_test;
  }
  write_file(dir / "index.tsv", index.str());
  out << "generated " << tests.size() << " tests (" << full << " full";
  if (!tests.empty() && tests.back().words.size() != o.words_per_test) {
    out << ", last has " << tests.back().words.size() << " words";
  }
  out << ")\n";
  return kExitOk;
}

int run_human_score(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.tests_dir.empty()) throw ConfigError("human score needs --tests");
  if (o.annotations.empty()) throw ConfigError("human score needs --annotation");
  const fs::path dir = prepare_out(o.run) / "scores";
  fs::create_directories(dir);
  std::vector<ParticipantReport> reports;
  for (const auto& a : o.annotations) {
    const std::string id = a.stem().string();
    const HumanTest t = read_test(o.tests_dir, id);
    try {
      reports.push_back(score_annotation(t, {id, read_file(a)}));
    } catch (const AlignmentError&) {
      err << a.filename().string() << ": ";
      throw;
    }
    write_file(dir / (id + ".json"), participant_json(reports.back()));
    write_file(dir / (id + ".txt"), format_participant(reports.back()));
    out << id << ": F1 PERIOD "
        << format_percent(reports.back().report.of(PunctClass::kPeriod).f1)
        << ", COMMA "
        << format_percent(reports.back().report.of(PunctClass::kComma).f1)
        << "\n";
  }
  return kExitOk;
}

int run_human_report(const Options& o, std::ostream& out, std::ostream&) {
  if (o.scores_dir.empty()) throw ConfigError("human report needs --scores");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(o.scores_dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ParticipantReport> reports;
  for (const auto& f : files) {
    reports.push_back(parse_participant_json(read_file(f)));
  }
  const auto stats = cohort_stats(reports);
  const fs::path dir = prepare_out(o.run);
  write_file(dir / "cohort.txt", format_cohort(stats, reports));
  write_file(dir / "cohort.json", cohort_json(stats, reports));
  out << format_cohort(stats, reports);
  return kExitOk;
}

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env) {
    return env;
  }
  return "out";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  Options o;
  o.run.out_dir = default_out_dir();
  std::string out_dir = o.run.out_dir.string();
  std::string corpus, vocab, model;

  CLI::App app{"Punctuation restoration toolkit", "punct"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", o.run.seed, "Seed for every random draw");
  app.add_option("-o,--out", out_dir,
                 std::string("Output directory (default $") + kOutDirEnv +
                     " or ./out)");
  app.add_option("--max-len", o.run.max_len, "Encoded sequence budget");

  auto* pre = app.add_subcommand("preprocess", "Normalize a corpus and extract labels");
  pre->add_option("--corpus", corpus, "Directory of .txt documents")->required();

  auto* stats = app.add_subcommand("stats", "Per-class label counts");
  stats->add_option("--labels", o.stats_labels, "Labeled TSV file(s)");
  stats->add_option("--corpus", corpus, "Directory of .txt documents");

  auto* split = app.add_subcommand("split", "Document-level train/test split");
  split->add_option("--labels", o.labels, "Labeled TSV")->required();
  split->add_option("--train-fraction", o.run.train_fraction);

  auto* plan = app.add_subcommand("plan", "Group sentences into 3-7 sentence compounds");
  plan->add_option("--labels", o.labels, "Labeled TSV")->required();

  auto* tr = app.add_subcommand("train", "Train the context-window tagger");
  tr->add_option("--labels", o.train.labels, "Labeled training TSV")->required();
  tr->add_option("--vocab", vocab, "WordPiece vocabulary")->required();
  tr->add_option("--plan", o.train.plan, "Plan file (default: fresh plan)");
  tr->add_option("--model", model, "Model file name inside the output directory");
  tr->add_option("--epochs", o.train.epochs);
  tr->add_option("--lr", o.train.learning_rate, "Learning rate");
  tr->add_option("--batch-size", o.train.batch_size);
  tr->add_option("--momentum", o.train.momentum);
  tr->add_option("--radius", o.train.radius, "Context window radius");
  tr->add_option("--dim", o.train.dim, "Hashed feature dimension (power of two)");
  tr->add_option("--class-weights", o.train.class_weights,
                 "Loss weights for EMPTY PERIOD COMMA QUESTION")
      ->expected(4);

  auto* pr = app.add_subcommand("predict", "Punctuate text with a tagger backend");
  pr->add_option("--input", o.input, "Labeled .tsv or raw text file")->required();
  pr->add_option("--vocab", vocab, "WordPiece vocabulary")->required();
  pr->add_option("--backend", o.run.backend, "trainable | replay:<logit file>");
  pr->add_option("--model", model, "Model file for the trainable backend");
  pr->add_option("--plan", o.plan, "Plan file (default: fresh plan)");

  auto* ev = app.add_subcommand("eval", "Score predictions");
  auto* ev_pred = ev->add_option("--pred", o.pred, "Prediction TSV from predict");
  auto* ev_matrix = ev->add_option("--matrix", o.matrix, "4x4 count file");
  ev_pred->excludes(ev_matrix);
  ev->add_option("--name", o.system_name, "System name in the results table");

  auto* human = app.add_subcommand("human", "Human-evaluation tests");
  human->require_subcommand(1);
  auto* hgen = human->add_subcommand("gen", "Cut the test set into 650-word tests");
  hgen->add_option("--labels", o.labels, "Labeled test-set TSV")->required();
  hgen->add_option("--words-per-test", o.words_per_test);
  auto* hscore = human->add_subcommand("score", "Score annotated returns");
  hscore->add_option("--tests", o.tests_dir, "Directory written by human gen")->required();
  hscore->add_option("--annotation", o.annotations,
                     "Annotated return(s); file stem is the test id")
      ->required();
  auto* hrep = human->add_subcommand("report", "Cohort statistics");
  hrep->add_option("--scores", o.scores_dir, "Directory written by human score")
      ->required();

  std::vector<std::string> argv_store;
  argv_store.push_back("punct");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  o.run.out_dir = out_dir;
  o.run.corpus_dir = corpus;
  o.run.vocab_path = vocab;
  o.run.model_path = model;

  try {
    if (*pre) return run_preprocess(o, out, err);
    if (*stats) return run_stats(o, out, err);
    if (*split) return run_split(o, out, err);
    if (*plan) return run_plan(o, out, err);
    if (*tr) return run_train(o, out, err);
    if (*pr) return run_predict(o, out, err);
    if (*ev) return run_eval(o, out, err);
    if (*hgen) return run_human_gen(o, out, err);
    if (*hscore) return run_human_score(o, out, err);
    if (*hrep) return run_human_report(o, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace punct::cli

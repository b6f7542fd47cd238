#include "punct/tagger.h"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace punct {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

std::uint32_t feature_id(int offset, std::string_view piece,
                         std::uint32_t dim) {
  std::uint64_t h = kFnvOffset;
  const char tag[2] = {static_cast<char>(offset + 128), '\x1f'};
  h = fnv1a(h, std::string_view(tag, 2));
  h = fnv1a(h, piece);
  return static_cast<std::uint32_t>(h & (dim - 1));
}

// Control bytes keep these out of reach of real pieces.
constexpr std::string_view kBeforeStart = "\x01<";
constexpr std::string_view kAfterEnd = "\x01>";
constexpr std::string_view kBias = "\x01" "bias";

}  // namespace

void validate_window(int radius, std::uint32_t dim) {
  if (radius < 1 || radius > 64) {
    throw ConfigError("window radius must be in [1, 64], got " +
                      std::to_string(radius));
  }
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw ConfigError("feature dimension must be a power of two >= 2, got " +
                      std::to_string(dim));
  }
}

std::vector<std::uint32_t> featurize(std::span<const std::string> tokens,
                                     std::size_t position, int radius,
                                     std::uint32_t dim) {
  validate_window(radius, dim);
  if (position >= tokens.size()) {
    throw ArgumentError("featurize: position " + std::to_string(position) +
                        " outside a sequence of " +
                        std::to_string(tokens.size()));
  }
  std::vector<std::uint32_t> out;
  out.reserve(2 * radius + 2);
  const auto pos = static_cast<std::ptrdiff_t>(position);
  const auto n = static_cast<std::ptrdiff_t>(tokens.size());
  for (int off = -radius; off <= radius; ++off) {
    const std::ptrdiff_t i = pos + off;
    std::string_view piece;
    if (i < 0) {
      piece = kBeforeStart;
    } else if (i >= n) {
      piece = kAfterEnd;
    } else {
      piece = tokens[i];
    }
    out.push_back(feature_id(off, piece, dim));
  }
  out.push_back(feature_id(0, kBias, dim));
  return out;
}

FeaturizedSequence featurize_sequence(const EncodedSequence& seq, int radius,
                                      std::uint32_t dim) {
  FeaturizedSequence out;
  const std::size_t n = seq.active_length();
  const std::span<const std::string> active(seq.tokens.data(), n);
  for (std::size_t p = 0; p < n; ++p) {
    if (seq.labels[p] == kIgnoreLabel) continue;
    out.features.push_back(featurize(active, p, radius, dim));
    out.labels.push_back(seq.labels[p]);
  }
  return out;
}

void TrainingConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (momentum < 0 || momentum >= 1) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  for (double w : class_weights) {
    if (!(w > 0) || !std::isfinite(w)) {
      throw ConfigError("class weights must be positive");
    }
  }
}

std::vector<PunctClass> predict(TaggerBackend& backend,
                                const EncodedSequence& seq) {
  return predict_from_logits(seq, backend.logits(seq));
}

std::vector<PunctClass> predict_from_logits(const EncodedSequence& seq,
                                            const std::vector<Logits>& z) {
  if (z.size() != seq.size()) {
    throw ProtocolError("backend returned " + std::to_string(z.size()) +
                        " logit vectors for a sequence of " +
                        std::to_string(seq.size()));
  }
  std::vector<PunctClass> out;
  out.reserve(seq.word_starts.size());
  for (std::size_t p : seq.word_starts) {
    if (!z[p].allFinite()) {
      throw ProtocolError("non-finite logits at position " +
                          std::to_string(p));
    }
    out.push_back(argmax_class(z[p]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model file

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw FormatError("model file: bad real '" + s + "'");
  }
  return v;
}

void expect_key(std::istream& in, const std::string& key) {
  std::string got;
  if (!(in >> got) || got != key) {
    throw FormatError("model file: expected '" + key + "', found '" + got +
                      "'");
  }
}

}  // namespace

void write_model(std::ostream& out, const ContextWindowModel<double>& model) {
  out << "punct-context-window-model 1\n";
  out << "radius " << model.radius << '\n';
  out << "dim " << model.dim << '\n';
  out << "seed " << model.seed << '\n';
  out << "bias";
  for (int c = 0; c < 4; ++c) out << ' ' << hex(model.bias(c));
  out << '\n';
  std::vector<std::uint32_t> nonzero;
  for (std::uint32_t f = 0; f < model.dim; ++f) {
    if (!model.weights.col(f).isZero(0.0)) nonzero.push_back(f);
  }
  out << "columns " << nonzero.size() << '\n';
  for (std::uint32_t f : nonzero) {
    out << f;
    for (int c = 0; c < 4; ++c) out << ' ' << hex(model.weights(c, f));
    out << '\n';
  }
}

ContextWindowModel<double> read_model(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "punct-context-window-model") {
    throw FormatError("not a context-window model file");
  }
  if (version != 1) {
    throw FormatError("unsupported model file version " +
                      std::to_string(version));
  }
  int radius = 0;
  std::uint32_t dim = 0;
  std::uint64_t seed = 0;
  expect_key(in, "radius");
  in >> radius;
  expect_key(in, "dim");
  in >> dim;
  expect_key(in, "seed");
  in >> seed;
  if (!in) throw FormatError("model file: truncated header");
  auto model = ContextWindowModel<double>::zeros(radius, dim, seed);
  expect_key(in, "bias");
  std::string tok;
  for (int c = 0; c < 4; ++c) {
    in >> tok;
    model.bias(c) = parse_real(tok);
  }
  expect_key(in, "columns");
  std::size_t n = 0;
  in >> n;
  for (std::size_t k = 0; k < n; ++k) {
    std::uint32_t f = 0;
    if (!(in >> f) || f >= dim) {
      throw FormatError("model file: bad feature id in column " +
                        std::to_string(k));
    }
    for (int c = 0; c < 4; ++c) {
      in >> tok;
      model.weights(c, f) = parse_real(tok);
    }
  }
  if (!in) throw FormatError("model file: truncated weights");
  if (!model.all_finite()) throw FormatError("model file: non-finite weights");
  return model;
}

void save_model(const std::filesystem::path& path,
                const ContextWindowModel<double>& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_model(out, model);
}

ContextWindowModel<double> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path.string());
  return read_model(in);
}

// ---------------------------------------------------------------------------
// Logit replay

LogitReplay LogitReplay::read(std::istream& in) {
  using nlohmann::json;
  std::vector<LogitRecord> records;
  std::array<int, 4> column_to_label{};
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("logit file line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    const std::string where = "logit file line " + std::to_string(line_no);
    if (!have_header) {
      if (!j.is_object() || !j.contains("order") || !j["order"].is_array() ||
          j["order"].size() != 4) {
        throw FormatError(where + ": expected header {\"order\": [4 names]}");
      }
      std::array<bool, 4> seen{};
      for (int k = 0; k < 4; ++k) {
        const auto& name = j["order"][k];
        auto c = name.is_string() ? parse_class_name(name.get<std::string>())
                                  : std::nullopt;
        if (!c || seen[label_id(*c)]) {
          throw FormatError(where + ": header order must name each class once");
        }
        seen[label_id(*c)] = true;
        column_to_label[k] = label_id(*c);
      }
      have_header = true;
      continue;
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_string() ||
        !j.contains("l") || !j["l"].is_array() || j["l"].size() != 4) {
      throw FormatError(where + ": expected {\"t\": token, \"l\": [4 reals]}");
    }
    LogitRecord r;
    r.token = j["t"].get<std::string>();
    for (int k = 0; k < 4; ++k) {
      if (!j["l"][k].is_number()) {
        throw FormatError(where + ": logits must be numbers");
      }
      r.logits(column_to_label[k]) = j["l"][k].get<double>();
    }
    if (!r.logits.allFinite()) {
      throw FormatError(where + ": logits must be finite");
    }
    records.push_back(std::move(r));
  }
  return LogitReplay(std::move(records));
}

LogitReplay LogitReplay::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open logit file " + path.string());
  return read(in);
}

std::vector<Logits> LogitReplay::logits(const EncodedSequence& seq) {
  std::vector<Logits> out(seq.size(), Logits::Zero());
  const std::size_t n = seq.active_length();
  // Positions 0 and n - 1 are [CLS] and [SEP].
  for (std::size_t p = 1; p + 1 < n; ++p) {
    if (cursor_ >= records_.size()) {
      throw AlignmentError(p, seq.tokens[p], "<end of logit file>");
    }
    const LogitRecord& r = records_[cursor_];
    if (r.token != seq.tokens[p]) {
      throw AlignmentError(p, seq.tokens[p], r.token);
    }
    out[p] = r.logits;
    ++cursor_;
  }
  return out;
}

void write_logit_header(std::ostream& out) {
  nlohmann::json order = nlohmann::json::array();
  for (PunctClass c : kLogitFileOrder) order.push_back(class_name(c));
  out << nlohmann::json{{"order", order}}.dump() << '\n';
}

void export_logits(std::ostream& out, const EncodedSequence& seq,
                   const std::vector<Logits>& logits) {
  const std::size_t n = seq.active_length();
  for (std::size_t p = 1; p + 1 < n; ++p) {
    nlohmann::ordered_json j;
    j["t"] = seq.tokens[p];
    nlohmann::json l = nlohmann::json::array();
    for (PunctClass c : kLogitFileOrder) l.push_back(logits[p](label_id(c)));
    j["l"] = l;
    out << j.dump() << '\n';
  }
}

}  // namespace punct

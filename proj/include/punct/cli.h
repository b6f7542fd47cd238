#ifndef PUNCT_CLI_H_
#define PUNCT_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace punct::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline constexpr std::uint64_t kDefaultSeed = 42;
// Overrides the default output directory ("out") when set.
inline constexpr const char* kOutDirEnv = "PUNCT_OUT_DIR";

// Settings shared by the subcommands. Flags override the --config file.
struct RunConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path vocab_path;
  std::uint64_t seed = kDefaultSeed;
  double train_fraction = 0.8;
  std::size_t max_len = 512;
  std::filesystem::path model_path;
  std::filesystem::path out_dir = "out";
  // "trainable" or "replay:<logit file>".
  std::string backend = "trainable";
};

// Runs one command line (args exclude the program name).
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace punct::cli

#endif  // PUNCT_CLI_H_

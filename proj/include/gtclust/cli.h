#ifndef GTCLUST_CLI_H_
#define GTCLUST_CLI_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtclust/datagen.h"
#include "gtclust/drivers.h"

namespace gtclust::cli {

enum class Subcommand { kRun, kBench, kGen };
enum class OutputFormat { kJson, kCsv };

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDatasetLoad = 2,
  kExitInternal = 3,
};

inline constexpr int kSchemaVersion = 1;
// Consulted for the output location when --out is absent.
inline constexpr const char* kOutputDirEnv = "GTCLUST_OUTPUT_DIR";

struct CliInvocation {
  Subcommand subcommand = Subcommand::kRun;

  // Data source: DS1 generation or a CSV file.
  bool use_ds1 = false;
  std::optional<std::filesystem::path> data_path;
  std::optional<std::size_t> expected_dim;
  Ds1Config ds1;  // its seed is the data seed

  std::size_t k_lo = 2;
  std::size_t k_hi = 2;
  std::vector<Algorithm> algorithms;
  std::vector<std::optional<std::int64_t>> ns_values;  // nullopt: disabled
  std::uint64_t seed = 0;  // repetition r uses seed + r
  std::size_t reps = 1;
  std::size_t max_iterations = 100;
  std::optional<std::filesystem::path> out;
  OutputFormat format = OutputFormat::kJson;
  bool timed_serial = false;
  std::size_t jobs = 1;
};

// Bad command line. `flag` names the offending option when there is one.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string flag, const std::string& what)
      : std::runtime_error(what), flag_(std::move(flag)) {}
  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

// Arguments after the program name. Throws UsageError.
CliInvocation parse_invocation(const std::vector<std::string>& args);

// Runs the invocation and writes its result to --out, to the directory in
// GTCLUST_OUTPUT_DIR, or to `out`, in that order of preference. Nothing is
// written when the run fails. Diagnostics go to `err`.
int execute(const CliInvocation& invocation, std::ostream& out,
            std::ostream& err);

// parse_invocation followed by execute, mapping every failure to its exit
// code.
int main_entry(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err);

}  // namespace gtclust::cli

#endif  // GTCLUST_CLI_H_

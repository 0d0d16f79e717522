#pragma once

// Command-line front end: argv -> CommandPlan -> exit code.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include "expdiv/arith.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace expdiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

enum class OutputFormat { Json, Csv, Text };

std::string to_string(OutputFormat f);

class UsageError : public DomainError {
public:
  using DomainError::DomainError;
};

struct CommandPlan {
  /// "series factor", "pair search", ...
  std::string command;
  /// Validated parameters in canonical string form; flags map to "true".
  std::map<std::string, std::string> params;
  /// Positional argument (the word for "pair eval").
  std::string positional;
  OutputFormat format = OutputFormat::Json;
  /// Empty for standard output.
  std::string output_path;

  std::string to_json() const;
  static CommandPlan from_json(const std::string& text);
  friend bool operator==(const CommandPlan&, const CommandPlan&) = default;
};

struct ParseOutcome {
  std::optional<CommandPlan> plan;
  /// Meaningful when plan is empty: 0 after --help, 2 on usage errors.
  int exit_code = kExitOk;
};

/// Parses and validates; messages (help, errors) go to the given streams.
ParseOutcome parse(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Throws UsageError on invalid parameters.
void validate(const CommandPlan& plan);

int execute(const CommandPlan& plan, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Function names: one, tau, tau3, tau(1,2), mu_scaled2, mu_power2, gauss,
/// E<m><name> (E2tau, Etau3, Egauss) and (f *e g).
MultiplicativeSpec parse_function(const std::string& text);

}  // namespace expdiv::cli

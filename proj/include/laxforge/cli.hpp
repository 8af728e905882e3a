#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "laxforge/matrix.hpp"
#include "laxforge/spectral.hpp"
#include "laxforge/system.hpp"

namespace laxforge::cli {

enum class Command { Analyze, Integrals, Verify, Simulate, GroebnerCheck };
enum class Format { Json, Csv, Text };

std::string_view to_string(Command c);

struct RunConfig {
    Command command = Command::Analyze;
    std::string input;
    std::optional<double> tol;  // replaces every upper-bound tolerance when set
    double t0 = 0.0;
    double t1 = 10.0;
    std::size_t count = 101;
    std::uint64_t seed = 42;
    Format format = Format::Json;
    bool force = false;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;

/// Exit code for a library error: 2 for parse errors, 3 for rejected input.
int exit_code_for(ErrorKind kind);

/// {"rows", "cols", "entries"} with entries [re, im] or bare numbers. Throws
/// ParseError on a malformed object or a nonzero imaginary part.
RealMatrix parse_real_matrix(const std::string& json_text);
ComplexMatrix parse_complex_matrix(const std::string& json_text);

struct SystemInput {
    ValidatedSystem system;
    std::vector<AdmissiblePair> pairs;  // explicit pairs, validated, possibly empty
};

/// Parses {"gamma", "p", "pairs"?} and validates the system and each pair.
SystemInput parse_system_input(const std::string& json_text);

/// One checked quantity. `upper` means value < tol passes, otherwise value > tol.
struct Check {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool upper = true;
    bool pass = false;
};

using Cell = std::variant<std::string, double, long long>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

/// Everything a command produces. `body` is a JSON document kept as text so
/// the header stays free of the JSON library.
struct Report {
    Command command = Command::Analyze;
    std::string body;
    std::vector<Check> checks;
    Table table;
    bool all_pass() const;
};

Report cmd_analyze(const RunConfig& config, const std::string& input_text);
Report cmd_integrals(const RunConfig& config, const std::string& input_text);
Report cmd_verify(const RunConfig& config, const std::string& input_text);
Report cmd_simulate(const RunConfig& config, const std::string& input_text);
/// Input is optional; a 2×2 "p" in it replaces the default (1, 2, 3, 5).
Report cmd_groebner_check(const RunConfig& config, const std::string& input_text);

std::string render(const Report& report, Format format);

/// Full front end: parses args (without the program name), reads the input
/// file, writes the report to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace laxforge::cli

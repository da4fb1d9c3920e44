#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brenv/distributions.hpp"
#include "brenv/estimators.hpp"

namespace brenv::cli {

/// Bad command line; exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Classify, Simulate, Rc, Sweep };
enum class Format { Csv, Json };
enum class RegimeName { Fixed, Global, Local, All };

/// lo:hi:steps with both endpoints included.
struct Grid {
    double lo;
    double hi;
    std::uint64_t steps;

    static Grid parse(const std::string& text);
    std::vector<double> points() const;
};

struct RunSpec {
    Command command = Command::Classify;
    std::optional<MeanLaw> law;
    OffspringFamily family = OffspringFamily::Poisson;
    RegimeName regime = RegimeName::Local;
    std::optional<double> r;
    std::optional<double> a;
    double tol = 1e-9;
    std::optional<Grid> a_grid;
    std::optional<Grid> r_grid;
    std::uint64_t trials = 1000;
    std::uint64_t max_generations = 200;
    Count population_cap = 1'000'000;
    Count aggregation_threshold = kDefaultAggregationThreshold;
    std::uint64_t seed = 0;
    std::uint64_t skip_rows = 0;
    unsigned threads = 0;
    std::string output;  // empty: standard output
    Format format = Format::Csv;
};

inline constexpr std::array<const char*, 15> kRowHeader{
    "a",     "r",            "e_mean",       "e_log_mean", "e_x",      "local_class",
    "global_class", "fixed_class", "regime", "trials",     "survivals", "p_hat",
    "ci_lo", "ci_hi",        "status"};

inline constexpr std::array<const char*, 6> kRcHeader{"a",        "r_c",      "bracket_lo",
                                                      "bracket_hi", "residual", "iterations"};

using Row = std::array<std::string, kRowHeader.size()>;

MeanLaw parse_law(const std::string& text);

/// Parses arguments (without the program name). Default seed comes from
/// BRENV_SEED when --seed is absent. Throws UsageError.
RunSpec parse_args(const std::vector<std::string>& args);

std::string usage();

/// 12 significant digits; infinities as `inf`.
std::string format_number(double x);

Row to_row(const SweepRow& row);

/// Runs a parsed command, writing rows to `out` and diagnostics to `err`.
/// Returns 0 on success, 1 on a computational error.
int execute(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// parse_args + execute, honoring --output. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brenv::cli

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brenv/analytics.hpp"
#include "brenv/simulator.hpp"

namespace brenv {

struct WilsonInterval {
    double lo;
    double hi;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials`.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

struct SurvivalEstimate {
    std::uint64_t trials;
    std::uint64_t survivals;
    double p_hat;
    double ci_lo;
    double ci_hi;
    std::uint64_t max_generations;
    Count population_cap;
};

/// Fraction of trials 0..trials-1 meeting the survival proxy.
///
/// `threads` = 0 uses the hardware concurrency. The result does not depend
/// on the thread count.
SurvivalEstimate estimate_survival(const Regime& regime, const MeanLaw& law, OffspringFamily family,
                                   const SimConfig& cfg, std::uint64_t trials, unsigned threads = 0);

class InvalidTreeParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TreeOffspringEstimate {
    std::uint64_t trials;
    std::uint64_t censored;
    double mean_x;   // mutant births from type-1 parents
    double mean_x1;  // type-1 births
    double mutant_ratio;    // mean_x / mean_x1
    double expected_ratio;  // r / (1 - r)
    double se_x;
    double se_x1;
    double se_ratio;  // delta method
    double mean_subtree;  // X + X_1
};

/// Simulates the type-1 subtree of many independent founders.
///
/// Requires 0 < r < 1 and m(1 - r) < 1 mu-almost surely.
TreeOffspringEstimate estimate_tree_offspring(const MeanLaw& law, OffspringFamily family, double r,
                                              Count subtree_cap, std::uint64_t trials,
                                              const SimConfig& cfg);

enum class SweepRegime { Fixed, Global, Local };

const char* to_string(SweepRegime r);

struct SweepRow {
    double a;
    double r;
    std::optional<double> e_mean;
    std::optional<double> e_log_mean;
    std::optional<double> e_x;
    std::optional<LocalRegime> local_class;
    std::optional<GlobalVerdict> global_class;
    std::optional<FixedVerdict> fixed_class;
    std::optional<SweepRegime> regime;
    std::optional<SurvivalEstimate> estimate;
    std::string status;  // "ok" or the analytic error
};

struct SweepOptions {
    OffspringFamily family = OffspringFamily::Poisson;
    SimConfig cfg;
    std::uint64_t trials = 0;  // 0: analytic columns only
    std::vector<SweepRegime> regimes{SweepRegime::Local};
    unsigned threads = 0;
};

/// Analytic and Monte Carlo columns for mu = U[0, a] at one (a, r) point.
///
/// One row per requested regime. The fixed regime simulates mean E(M).
std::vector<SweepRow> sweep_cell(double a, double r, const SweepOptions& opts);

/// Rows for every grid point in order, passed to `emit` as soon as each cell
/// is done.
template <class Emit>
void sweep(const std::vector<std::pair<double, double>>& grid, const SweepOptions& opts, Emit&& emit)
{
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    for (const auto& [a, r] : grid)
        for (const SweepRow& row : sweep_cell(a, r, opts)) emit(row);
}

}  // namespace brenv

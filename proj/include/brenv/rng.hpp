#pragma once

#include <cstdint>
#include <random>

namespace brenv {

using Rng = std::mt19937_64;

/// Independent stream for one Monte Carlo trial.
///
/// The stream depends only on (seed, trial_index), so a trial produces the
/// same draws no matter which worker runs it or in which order.
Rng make_stream(std::uint64_t seed, std::uint64_t trial_index);

}  // namespace brenv

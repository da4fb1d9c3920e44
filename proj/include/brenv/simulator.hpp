#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "brenv/distributions.hpp"

namespace brenv {

using TypeId = std::uint64_t;

struct SimConfig {
    std::uint64_t max_generations = 200;
    Count population_cap = 1'000'000;
    Count per_type_individual_threshold = kDefaultAggregationThreshold;
    std::uint64_t seed = 0;
    std::uint64_t trial_index = 0;

    void validate() const;
};

struct GlobalState {
    std::uint64_t generation = 0;
    Count z = 1;
};

/// Genealogy of types: one vertex per type ever born, root 1.
class TreeOfTypes {
public:
    TreeOfTypes() = default;

    /// Adds type `child` (must equal vertex_count() + 1) under `parent`.
    void add(TypeId child, TypeId parent);

    std::uint64_t vertex_count() const { return parents_.size() + 1; }

    /// Parent of type k > 1; 0 for the root.
    TypeId parent(TypeId k) const { return k <= 1 ? 0 : parents_[k - 2]; }

    /// Number of child types of vertex k.
    std::uint64_t child_count(TypeId k) const;

    /// Root 1, parent(k) < k, every vertex reaches the root.
    bool valid() const;

private:
    std::vector<TypeId> parents_;  // parents_[k - 2] = parent(k)
};

struct Cohort {
    TypeId type;
    double mean;
    Count count;
};

/// Aggregated state of the locally changing environment.
///
/// Cohorts are kept in ascending type id; zero-count cohorts are dropped
/// but their vertices stay in the tree.
class LocalPopulation {
public:
    /// Single type-1 individual with the given offspring mean.
    explicit LocalPopulation(double founder_mean);

    std::uint64_t generation() const { return generation_; }
    const std::vector<Cohort>& cohorts() const { return cohorts_; }
    const TreeOfTypes& tree() const { return tree_; }
    TypeId next_type_id() const { return next_type_id_; }
    Count total() const;
    Count largest_cohort() const;
    bool extinct() const { return cohorts_.empty(); }

    /// Per-step bookkeeping of the last call to step_local.
    struct StepTally {
        Count children = 0;
        Count mutants = 0;
    };
    const StepTally& last_step() const { return tally_; }

    /// Consistency of cohort order, counts, and the tree.
    bool valid() const;

private:
    friend void step_local(LocalPopulation&, const MeanLaw&, OffspringFamily, double, Rng&, Count);

    std::uint64_t generation_ = 0;
    std::vector<Cohort> cohorts_;
    std::vector<Cohort> scratch_;
    std::vector<Cohort> founders_;
    TypeId next_type_id_ = 2;
    TreeOfTypes tree_;
    StepTally tally_;
};

GlobalState step_fixed(GlobalState state, OffspringFamily family, double m, Rng& rng,
                       Count threshold = kDefaultAggregationThreshold);

/// One environment draw shared by the whole generation.
GlobalState step_global(GlobalState state, const MeanLaw& law, OffspringFamily family, Rng& rng,
                        Count threshold = kDefaultAggregationThreshold);

/// One synchronous generation with per-birth mutation probability r.
///
/// Cohorts are processed in ascending type id; new types get consecutive ids
/// in that order, then by draw order within the parent.
void step_local(LocalPopulation& pop, const MeanLaw& law, OffspringFamily family, double r, Rng& rng,
                Count threshold = kDefaultAggregationThreshold);

struct FixedRegime {
    double m;
};
struct GlobalRegime {};
struct LocalRegimeSpec {
    double r;
};
using Regime = std::variant<FixedRegime, GlobalRegime, LocalRegimeSpec>;

enum class TrialStatus { Extinct, SurvivedToCap, PopulationCapHit };

const char* to_string(TrialStatus s);

struct TrialOutcome {
    TrialStatus status;
    std::uint64_t at_generation;  // generation of extinction, cap hit, or horizon
    Count final_population;
    std::uint64_t tree_vertex_count;  // 1 outside the local regime
    Count peak_population;
    Count peak_cohort;  // largest single-type cohort seen (local); equals peak_population otherwise

    /// Survival proxy: reached the cap or alive at the horizon.
    bool survived() const { return status != TrialStatus::Extinct; }
};

/// Runs one trial from a single individual using the stream for
/// (cfg.seed, cfg.trial_index).
TrialOutcome run_trial(const Regime& regime, const MeanLaw& law, OffspringFamily family,
                       const SimConfig& cfg);

}  // namespace brenv

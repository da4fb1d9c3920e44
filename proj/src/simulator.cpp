#include "brenv/simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace brenv {

void SimConfig::validate() const
{
    if (max_generations < 1) throw std::invalid_argument("max_generations must be >= 1");
    if (population_cap < 1) throw std::invalid_argument("population_cap must be >= 1");
    if (per_type_individual_threshold < 1)
        throw std::invalid_argument("per_type_individual_threshold must be >= 1");
}

void TreeOfTypes::add(TypeId child, TypeId parent)
{
    if (child != vertex_count() + 1 || parent < 1 || parent >= child)
        throw std::logic_error("tree of types: vertices must be added in order of appearance");
    parents_.push_back(parent);
}

std::uint64_t TreeOfTypes::child_count(TypeId k) const
{
    return static_cast<std::uint64_t>(std::count(parents_.begin(), parents_.end(), k));
}

bool TreeOfTypes::valid() const
{
    // parent(k) < k makes every chain strictly decreasing, so it ends at 1.
    for (std::size_t i = 0; i < parents_.size(); ++i) {
        const TypeId k = i + 2;
        if (parents_[i] < 1 || parents_[i] >= k) return false;
    }
    return true;
}

LocalPopulation::LocalPopulation(double founder_mean) : cohorts_{{1, founder_mean, 1}} {}

Count LocalPopulation::total() const
{
    Count n = 0;
    for (const Cohort& c : cohorts_) n += c.count;
    return n;
}

Count LocalPopulation::largest_cohort() const
{
    Count n = 0;
    for (const Cohort& c : cohorts_) n = std::max(n, c.count);
    return n;
}

bool LocalPopulation::valid() const
{
    if (!tree_.valid() || next_type_id_ != tree_.vertex_count() + 1) return false;
    TypeId prev = 0;
    for (const Cohort& c : cohorts_) {
        if (c.count == 0 || c.type <= prev || c.type >= next_type_id_) return false;
        prev = c.type;
    }
    return true;
}

GlobalState step_fixed(GlobalState state, OffspringFamily family, double m, Rng& rng, Count threshold)
{
    state.z = aggregate_offspring(family, m, state.z, rng, threshold);
    ++state.generation;
    return state;
}

GlobalState step_global(GlobalState state, const MeanLaw& law, OffspringFamily family, Rng& rng,
                        Count threshold)
{
    if (state.z != 0) {
        const EnvironmentSample env = sample_environment(law, family, rng);
        state.z = aggregate_offspring(env.family, env.mean, state.z, rng, threshold);
    }
    ++state.generation;
    return state;
}

void step_local(LocalPopulation& pop, const MeanLaw& law, OffspringFamily family, double r, Rng& rng,
                Count threshold)
{
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("mutation probability must lie in [0, 1]");

    std::vector<Cohort>& next = pop.scratch_;
    next.clear();
    std::vector<Cohort>& founders = pop.founders_;
    founders.clear();
    LocalPopulation::StepTally tally;

    for (const Cohort& cohort : pop.cohorts_) {
        const Count children = aggregate_offspring(family, cohort.mean, cohort.count, rng, threshold);
        const Count mutants = binomial_split(children, r, rng);
        tally.children += children;
        tally.mutants += mutants;
        if (children > mutants) next.push_back({cohort.type, cohort.mean, children - mutants});
        for (Count i = 0; i < mutants; ++i) {
            const TypeId id = pop.next_type_id_++;
            pop.tree_.add(id, cohort.type);
            founders.push_back({id, law.sample(rng), 1});
        }
    }
    // Founder ids exceed every surviving id, so appending keeps the order.
    next.insert(next.end(), founders.begin(), founders.end());
    pop.cohorts_.swap(next);
    pop.tally_ = tally;
    ++pop.generation_;
}

const char* to_string(TrialStatus s)
{
    switch (s) {
    case TrialStatus::Extinct: return "Extinct";
    case TrialStatus::SurvivedToCap: return "SurvivedToCap";
    case TrialStatus::PopulationCapHit: return "PopulationCapHit";
    }
    return "";
}

namespace {

template <class Step>
TrialOutcome run_counts(const SimConfig& cfg, Step&& step)
{
    GlobalState state;
    Count peak = state.z;
    for (;;) {
        if (state.z == 0) return {TrialStatus::Extinct, state.generation, 0, 1, peak, peak};
        if (state.z >= cfg.population_cap)
            return {TrialStatus::PopulationCapHit, state.generation, state.z, 1, peak, peak};
        if (state.generation >= cfg.max_generations)
            return {TrialStatus::SurvivedToCap, state.generation, state.z, 1, peak, peak};
        state = step(state);
        peak = std::max(peak, state.z);
    }
}

TrialOutcome run_local(double r, const MeanLaw& law, OffspringFamily family, const SimConfig& cfg,
                       Rng& rng)
{
    LocalPopulation pop(law.sample(rng));
    Count peak = 1;
    Count peak_cohort = 1;
    for (;;) {
        const Count total = pop.total();
        peak = std::max(peak, total);
        peak_cohort = std::max(peak_cohort, pop.largest_cohort());
        const auto outcome = [&](TrialStatus s) {
            return TrialOutcome{s, pop.generation(), total, pop.tree().vertex_count(), peak, peak_cohort};
        };
        if (total == 0) return outcome(TrialStatus::Extinct);
        if (total >= cfg.population_cap) return outcome(TrialStatus::PopulationCapHit);
        if (pop.generation() >= cfg.max_generations) return outcome(TrialStatus::SurvivedToCap);
        step_local(pop, law, family, r, rng, cfg.per_type_individual_threshold);
    }
}

}  // namespace

TrialOutcome run_trial(const Regime& regime, const MeanLaw& law, OffspringFamily family,
                       const SimConfig& cfg)
{
    cfg.validate();
    Rng rng = make_stream(cfg.seed, cfg.trial_index);
    const Count threshold = cfg.per_type_individual_threshold;
    if (const auto* fixed = std::get_if<FixedRegime>(&regime)) {
        const double m = fixed->m;
        return run_counts(cfg, [&](GlobalState s) { return step_fixed(s, family, m, rng, threshold); });
    }
    if (std::holds_alternative<GlobalRegime>(regime))
        return run_counts(cfg, [&](GlobalState s) { return step_global(s, law, family, rng, threshold); });
    return run_local(std::get<LocalRegimeSpec>(regime).r, law, family, cfg, rng);
}

}  // namespace brenv

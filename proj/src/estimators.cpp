#include "brenv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace brenv {

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z)
{
    if (trials == 0) throw std::invalid_argument("Wilson interval needs at least one trial");
    if (successes > trials) throw std::invalid_argument("successes exceed trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::clamp(center - half, 0.0, p), std::clamp(center + half, p, 1.0)};
}

SurvivalEstimate estimate_survival(const Regime& regime, const MeanLaw& law, OffspringFamily family,
                                   const SimConfig& cfg, std::uint64_t trials, unsigned threads)
{
    if (trials == 0) throw std::invalid_argument("estimate_survival needs trials >= 1");
    cfg.validate();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

    std::vector<std::uint64_t> survivals(threads, 0);
    const auto work = [&](unsigned worker) {
        const std::uint64_t begin = trials * worker / threads;
        const std::uint64_t end = trials * (worker + 1) / threads;
        SimConfig local = cfg;
        for (std::uint64_t i = begin; i < end; ++i) {
            local.trial_index = i;
            if (run_trial(regime, law, family, local).survived()) ++survivals[worker];
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }

    std::uint64_t total = 0;
    for (std::uint64_t s : survivals) total += s;
    const WilsonInterval ci = wilson_interval(total, trials);
    return {trials,
            total,
            static_cast<double>(total) / static_cast<double>(trials),
            ci.lo,
            ci.hi,
            cfg.max_generations,
            cfg.population_cap};
}

TreeOffspringEstimate estimate_tree_offspring(const MeanLaw& law, OffspringFamily family, double r,
                                              Count subtree_cap, std::uint64_t trials,
                                              const SimConfig& cfg)
{
    if (!(r > 0.0 && r < 1.0)) throw InvalidTreeParameters("tree offspring estimate needs 0 < r < 1");
    if (tree_offspring_diverges(law, r))
        throw InvalidTreeParameters("mean law puts mass on m(1 - r) >= 1; type-1 subtree is not a.s. finite");
    if (trials == 0) throw InvalidTreeParameters("tree offspring estimate needs trials >= 1");

    std::uint64_t censored = 0;
    double sx = 0.0, sx1 = 0.0, sxx = 0.0, sx1x1 = 0.0, sxx1 = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng rng = make_stream(cfg.seed, i);
        const double m1 = law.sample(rng);
        Count alive = 1;
        Count x = 0;
        Count x1 = 0;
        bool cut = false;
        while (alive > 0) {
            const Count children = aggregate_offspring(family, m1, alive, rng, cfg.per_type_individual_threshold);
            const Count mutants = binomial_split(children, r, rng);
            x += mutants;
            x1 += children - mutants;
            alive = children - mutants;
            if (x + x1 > subtree_cap) {
                cut = true;
                break;
            }
        }
        if (cut) {
            ++censored;
            continue;
        }
        const double dx = static_cast<double>(x);
        const double dx1 = static_cast<double>(x1);
        sx += dx;
        sx1 += dx1;
        sxx += dx * dx;
        sx1x1 += dx1 * dx1;
        sxx1 += dx * dx1;
    }

    TreeOffspringEstimate est{};
    est.trials = trials;
    est.censored = censored;
    est.expected_ratio = r / (1.0 - r);
    const double n = static_cast<double>(trials - censored);
    if (n == 0.0) return est;

    est.mean_x = sx / n;
    est.mean_x1 = sx1 / n;
    est.mean_subtree = est.mean_x + est.mean_x1;
    const double dof = std::max(1.0, n - 1.0);
    const double var_x = std::max(0.0, (sxx - n * est.mean_x * est.mean_x) / dof);
    const double var_x1 = std::max(0.0, (sx1x1 - n * est.mean_x1 * est.mean_x1) / dof);
    const double cov = (sxx1 - n * est.mean_x * est.mean_x1) / dof;
    est.se_x = std::sqrt(var_x / n);
    est.se_x1 = std::sqrt(var_x1 / n);
    if (est.mean_x1 > 0.0) {
        const double ratio = est.mean_x / est.mean_x1;
        est.mutant_ratio = ratio;
        const double var_ratio = (var_x - 2.0 * ratio * cov + ratio * ratio * var_x1) /
                                 (n * est.mean_x1 * est.mean_x1);
        est.se_ratio = std::sqrt(std::max(0.0, var_ratio));
    }
    return est;
}

const char* to_string(SweepRegime r)
{
    switch (r) {
    case SweepRegime::Fixed: return "fixed";
    case SweepRegime::Global: return "global";
    case SweepRegime::Local: return "local";
    }
    return "";
}

std::vector<SweepRow> sweep_cell(double a, double r, const SweepOptions& opts)
{
    SweepRow base{};
    base.a = a;
    base.r = r;
    base.status = "ok";

    std::optional<MeanLaw> law;
    try {
        law = MeanLaw::uniform(a);
        base.e_mean = expect_mean(*law);
        base.e_log_mean = expect_log_mean(*law);
        base.global_class = classify_global(*law, opts.family).verdict;
        base.fixed_class = classify_fixed(*law);
        const RegimeClass local = classify_local(*law, r);
        base.e_x = local.expected_x;
        base.local_class = local.label;
    } catch (const std::exception& e) {
        base.status = e.what();
    }

    std::vector<SweepRow> rows;
    if (opts.trials == 0 || !law) {
        rows.push_back(base);
        return rows;
    }
    for (SweepRegime regime : opts.regimes) {
        SweepRow row = base;
        row.regime = regime;
        try {
            Regime spec;
            switch (regime) {
            case SweepRegime::Fixed: spec = FixedRegime{expect_mean(*law)}; break;
            case SweepRegime::Global: spec = GlobalRegime{}; break;
            case SweepRegime::Local:
                if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r outside [0, 1]");
                spec = LocalRegimeSpec{r};
                break;
            }
            row.estimate = estimate_survival(spec, *law, opts.family, opts.cfg, opts.trials, opts.threads);
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace brenv

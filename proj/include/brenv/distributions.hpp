#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "brenv/rng.hpp"

namespace brenv {

using Count = std::uint64_t;

class InvalidLaw : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Law of the random mean offspring M.
class MeanLaw {
public:
    struct Uniform {
        double a;  // M ~ U[0, a]
    };
    struct Constant {
        double m;
    };
    struct TwoPoint {
        double m1;
        double m2;
        double p;  // P(M = m1)
    };
    using Variant = std::variant<Uniform, Constant, TwoPoint>;

    static MeanLaw uniform(double a);
    static MeanLaw constant(double m);
    static MeanLaw two_point(double m1, double m2, double p);

    const Variant& variant() const { return law_; }

    /// One draw of M. Constant laws consume no randomness.
    double sample(Rng& rng) const;

    /// mu({m : m > threshold}).
    double mass_above(double threshold) const;

    /// mu({x}); zero for the continuous part.
    double atom_mass_at(double x) const;

    bool is_point_mass() const;

    std::string describe() const;

private:
    explicit MeanLaw(Variant v) : law_(v) {}
    Variant law_;
};

enum class OffspringFamily { Poisson, Geometric };

const char* to_string(OffspringFamily family);

/// P(k children) for the count law with mean m.
double offspring_pmf(OffspringFamily family, double m, Count k);

/// P(no children); equals 1 at m = 0 and decreases strictly in m.
double offspring_p0(OffspringFamily family, double m);

/// Fresh offspring law drawn once per environment.
struct EnvironmentSample {
    double mean;
    OffspringFamily family;
};

EnvironmentSample sample_environment(const MeanLaw& law, OffspringFamily family, Rng& rng);

double sample_mean(const MeanLaw& law, Rng& rng);

Count sample_offspring(OffspringFamily family, double m, Rng& rng);

/// Geometric parent counts at or above this use one negative-binomial draw.
inline constexpr Count kDefaultAggregationThreshold = 64;

/// Total children of `parents` i.i.d. parents with mean m.
///
/// Poisson: a single draw with mean parents * m. Geometric: per-parent draws
/// below `threshold` parents, a negative-binomial draw otherwise.
Count aggregate_offspring(OffspringFamily family, double m, Count parents, Rng& rng,
                          Count threshold = kDefaultAggregationThreshold);

/// Number of marked items among n when each is marked with probability p.
Count binomial_split(Count n, double p, Rng& rng);

}  // namespace brenv

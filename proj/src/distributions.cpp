#include "brenv/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace brenv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool nonnegative_finite(double x) { return std::isfinite(x) && x >= 0.0; }

std::string format_param(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

MeanLaw MeanLaw::uniform(double a)
{
    if (!std::isfinite(a) || a <= 0.0) throw InvalidLaw("uniform law needs a > 0");
    return MeanLaw(Uniform{a});
}

MeanLaw MeanLaw::constant(double m)
{
    if (!nonnegative_finite(m)) throw InvalidLaw("constant law needs m >= 0");
    return MeanLaw(Constant{m});
}

MeanLaw MeanLaw::two_point(double m1, double m2, double p)
{
    if (!nonnegative_finite(m1) || !nonnegative_finite(m2))
        throw InvalidLaw("two-point law needs nonnegative atoms");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidLaw("two-point law needs 0 <= p <= 1");
    return MeanLaw(TwoPoint{m1, m2, p});
}

double MeanLaw::sample(Rng& rng) const
{
    return std::visit(Overloaded{
                          [&](const Uniform& u) {
                              return std::uniform_real_distribution<double>(0.0, u.a)(rng);
                          },
                          [](const Constant& c) { return c.m; },
                          [&](const TwoPoint& t) {
                              const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                              return u < t.p ? t.m1 : t.m2;
                          },
                      },
                      law_);
}

double MeanLaw::mass_above(double threshold) const
{
    return std::visit(Overloaded{
                          [&](const Uniform& u) {
                              return std::clamp((u.a - threshold) / u.a, 0.0, 1.0);
                          },
                          [&](const Constant& c) { return c.m > threshold ? 1.0 : 0.0; },
                          [&](const TwoPoint& t) {
                              return (t.m1 > threshold ? t.p : 0.0) +
                                     (t.m2 > threshold ? 1.0 - t.p : 0.0);
                          },
                      },
                      law_);
}

double MeanLaw::atom_mass_at(double x) const
{
    return std::visit(Overloaded{
                          [](const Uniform&) { return 0.0; },
                          [&](const Constant& c) { return c.m == x ? 1.0 : 0.0; },
                          [&](const TwoPoint& t) {
                              return (t.m1 == x ? t.p : 0.0) + (t.m2 == x ? 1.0 - t.p : 0.0);
                          },
                      },
                      law_);
}

bool MeanLaw::is_point_mass() const
{
    return std::visit(Overloaded{
                          [](const Uniform&) { return false; },
                          [](const Constant&) { return true; },
                          [](const TwoPoint& t) {
                              return t.m1 == t.m2 || t.p == 0.0 || t.p == 1.0;
                          },
                      },
                      law_);
}

std::string MeanLaw::describe() const
{
    return std::visit(Overloaded{
                          [](const Uniform& u) { return "uniform:" + format_param(u.a); },
                          [](const Constant& c) { return "constant:" + format_param(c.m); },
                          [](const TwoPoint& t) {
                              return "twopoint:" + format_param(t.m1) + ":" + format_param(t.m2) +
                                     ":" + format_param(t.p);
                          },
                      },
                      law_);
}

const char* to_string(OffspringFamily family)
{
    switch (family) {
    case OffspringFamily::Poisson: return "poisson";
    case OffspringFamily::Geometric: return "geometric";
    }
    return "unknown";
}

double offspring_pmf(OffspringFamily family, double m, Count k)
{
    const double kd = static_cast<double>(k);
    if (m == 0.0) return k == 0 ? 1.0 : 0.0;
    switch (family) {
    case OffspringFamily::Poisson:
        return std::exp(kd * std::log(m) - m - std::lgamma(kd + 1.0));
    case OffspringFamily::Geometric:
        return std::exp(kd * std::log(m / (1.0 + m)) - std::log1p(m));
    }
    return 0.0;
}

double offspring_p0(OffspringFamily family, double m)
{
    switch (family) {
    case OffspringFamily::Poisson: return std::exp(-m);
    case OffspringFamily::Geometric: return 1.0 / (1.0 + m);
    }
    return 1.0;
}

EnvironmentSample sample_environment(const MeanLaw& law, OffspringFamily family, Rng& rng)
{
    return {law.sample(rng), family};
}

double sample_mean(const MeanLaw& law, Rng& rng) { return law.sample(rng); }

Count sample_offspring(OffspringFamily family, double m, Rng& rng)
{
    if (m <= 0.0) return 0;
    switch (family) {
    case OffspringFamily::Poisson:
        return static_cast<Count>(std::poisson_distribution<long long>(m)(rng));
    case OffspringFamily::Geometric:
        return static_cast<Count>(std::geometric_distribution<long long>(1.0 / (1.0 + m))(rng));
    }
    return 0;
}

Count aggregate_offspring(OffspringFamily family, double m, Count parents, Rng& rng,
                          Count threshold)
{
    if (parents == 0 || m <= 0.0) return 0;
    switch (family) {
    case OffspringFamily::Poisson:
        return static_cast<Count>(
            std::poisson_distribution<long long>(m * static_cast<double>(parents))(rng));
    case OffspringFamily::Geometric:
        if (parents < threshold) {
            std::geometric_distribution<long long> geo(1.0 / (1.0 + m));
            Count total = 0;
            for (Count i = 0; i < parents; ++i) total += static_cast<Count>(geo(rng));
            return total;
        }
        return static_cast<Count>(std::negative_binomial_distribution<long long>(
            static_cast<long long>(parents), 1.0 / (1.0 + m))(rng));
    }
    return 0;
}

Count binomial_split(Count n, double p, Rng& rng)
{
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return static_cast<Count>(
        std::binomial_distribution<long long>(static_cast<long long>(n), p)(rng));
}

}  // namespace brenv

#include "brenv/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brenv/quadrature.hpp"

namespace brenv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Expectation of g over the atoms of a discrete law, skipping zero weights.
template <class G>
double atom_expectation(const MeanLaw::TwoPoint& t, const G& g)
{
    double total = 0.0;
    if (t.p > 0.0) total += t.p * g(t.m1);
    if (t.p < 1.0) total += (1.0 - t.p) * g(t.m2);
    return total;
}

// ln((1 - p0(m)) / m), finite and smooth on [0, inf).
double log_one_minus_p0_regular(OffspringFamily family, double m)
{
    if (m == 0.0) return 0.0;
    switch (family) {
    case OffspringFamily::Poisson: return std::log(-std::expm1(-m) / m);
    case OffspringFamily::Geometric: return -std::log1p(m);
    }
    return 0.0;
}

double abs_log_one_minus_p0(OffspringFamily family, double m)
{
    if (m == 0.0) return kInfinity;
    return -(std::log(m) + log_one_minus_p0_regular(family, m));
}

double abs_log(double m) { return m == 0.0 ? kInfinity : std::abs(std::log(m)); }

// (-x - ln(1 - x)) / x^2 for 0 <= x < 1.
double tree_series(double x)
{
    if (x < 1e-3) {
        double sum = 0.0;
        double power = 1.0;
        for (int k = 2; k < 14; ++k) {
            sum += power / k;
            power *= x;
        }
        return sum;
    }
    return (-x - std::log1p(-x)) / (x * x);
}

void check_r(double r)
{
    if (!(r > 0.0 && r <= 1.0)) throw InvalidMutationProbability(r);
}

double uniform_abs_log_m(double a)
{
    const double head = quad::log_head_width(a);
    double total = quad::integrate_log_endpoint([](double) { return 0.0; }, -1.0, head).value;
    const double split = std::min(a, 1.0);
    total += quad::adaptive_simpson([](double m) { return -std::log(m); }, head, split).value;
    if (a > 1.0) total += quad::adaptive_simpson([](double m) { return std::log(m); }, 1.0, a).value;
    return total / a;
}

double uniform_abs_log_one_minus_p0(double a, OffspringFamily family)
{
    const double head = quad::log_head_width(a);
    double total = quad::integrate_log_endpoint(
                       [family](double m) { return -log_one_minus_p0_regular(family, m); }, -1.0, head)
                       .value;
    total += quad::adaptive_simpson([family](double m) { return abs_log_one_minus_p0(family, m); },
                                    head, a)
                 .value;
    return total / a;
}

}  // namespace

InvalidMutationProbability::InvalidMutationProbability(double r)
    : std::invalid_argument("mutation probability must satisfy 0 < r <= 1, got " + std::to_string(r))
{
}

BracketFailure::BracketFailure(double lo, double hi, double vlo, double vhi)
    : std::runtime_error("no sign change of E(X) - 1 on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]: values " + std::to_string(vlo) + ", " +
                         std::to_string(vhi)),
      value_lo(vlo),
      value_hi(vhi)
{
}

const char* to_string(GlobalVerdict v)
{
    switch (v) {
    case GlobalVerdict::DiesOut: return "DiesOut";
    case GlobalVerdict::Survives: return "Survives";
    case GlobalVerdict::IndeterminateMomentCondition: return "IndeterminateMomentCondition";
    }
    return "";
}

const char* to_string(LocalRegime v)
{
    switch (v) {
    case LocalRegime::DiesOut: return "DiesOut";
    case LocalRegime::SurvivesTypesTransient: return "SurvivesTypesTransient";
    case LocalRegime::FixedTypeSurvives: return "FixedTypeSurvives";
    }
    return "";
}

const char* to_string(FixedVerdict v)
{
    switch (v) {
    case FixedVerdict::DiesOut: return "DiesOut";
    case FixedVerdict::Survives: return "Survives";
    }
    return "";
}

double expect_mean(const MeanLaw& law)
{
    return std::visit(Overloaded{
                          [](const MeanLaw::Uniform& u) { return 0.5 * u.a; },
                          [](const MeanLaw::Constant& c) { return c.m; },
                          [](const MeanLaw::TwoPoint& t) {
                              return atom_expectation(t, [](double m) { return m; });
                          },
                      },
                      law.variant());
}

double expect_log_mean(const MeanLaw& law)
{
    return std::visit(Overloaded{
                          [](const MeanLaw::Uniform& u) { return std::log(u.a) - 1.0; },
                          [](const MeanLaw::Constant& c) { return std::log(c.m); },
                          [](const MeanLaw::TwoPoint& t) {
                              return atom_expectation(t, [](double m) { return std::log(m); });
                          },
                      },
                      law.variant());
}

LogMomentTerms expect_abs_log_survival_terms(const MeanLaw& law, OffspringFamily family)
{
    return std::visit(
        Overloaded{
            [&](const MeanLaw::Uniform& u) {
                return LogMomentTerms{uniform_abs_log_m(u.a), uniform_abs_log_one_minus_p0(u.a, family)};
            },
            [&](const MeanLaw::Constant& c) {
                return LogMomentTerms{abs_log(c.m), abs_log_one_minus_p0(family, c.m)};
            },
            [&](const MeanLaw::TwoPoint& t) {
                return LogMomentTerms{
                    atom_expectation(t, abs_log),
                    atom_expectation(t, [family](double m) { return abs_log_one_minus_p0(family, m); })};
            },
        },
        law.variant());
}

GlobalClass classify_global(const MeanLaw& law, OffspringFamily family)
{
    const double e_log = expect_log_mean(law);
    const LogMomentTerms terms = expect_abs_log_survival_terms(law, family);
    GlobalVerdict verdict = GlobalVerdict::IndeterminateMomentCondition;
    if (std::isfinite(terms.e_abs_log_m)) {
        if (e_log <= 0.0)
            verdict = GlobalVerdict::DiesOut;
        else if (std::isfinite(terms.e_abs_log_one_minus_p0))
            verdict = GlobalVerdict::Survives;
    }
    return {verdict, e_log, terms.e_abs_log_m, terms.e_abs_log_one_minus_p0};
}

FixedVerdict classify_fixed(const MeanLaw& law)
{
    return expect_mean(law) > 1.0 ? FixedVerdict::Survives : FixedVerdict::DiesOut;
}

double jensen_gap(const MeanLaw& law)
{
    const double mean = expect_mean(law);
    if (mean == 0.0) throw UndefinedJensenGap();
    return std::log(mean) - expect_log_mean(law);
}

bool tree_offspring_diverges(const MeanLaw& law, double r)
{
    const double keep = 1.0 - r;
    if (keep <= 0.0) return false;
    // m(1 - r) >= 1 on a set of positive mass; for U[0,a] equality already
    // gives a logarithmically divergent integral.
    return std::visit(Overloaded{
                          [&](const MeanLaw::Uniform& u) { return u.a * keep >= 1.0; },
                          [&](const MeanLaw::Constant& c) { return c.m * keep >= 1.0; },
                          [&](const MeanLaw::TwoPoint& t) {
                              return (t.p > 0.0 && t.m1 * keep >= 1.0) ||
                                     (t.p < 1.0 && t.m2 * keep >= 1.0);
                          },
                      },
                      law.variant());
}

double expected_tree_offspring(const MeanLaw& law, double r)
{
    check_r(r);
    if (tree_offspring_diverges(law, r)) return kInfinity;
    const double keep = 1.0 - r;
    const auto per_type = [&](double m) { return r * m / (1.0 - m * keep); };
    return std::visit(Overloaded{
                          [&](const MeanLaw::Uniform& u) { return r * u.a * tree_series(u.a * keep); },
                          [&](const MeanLaw::Constant& c) { return per_type(c.m); },
                          [&](const MeanLaw::TwoPoint& t) { return atom_expectation(t, per_type); },
                      },
                      law.variant());
}

double expected_tree_offspring_quadrature(const MeanLaw& law, double r)
{
    check_r(r);
    if (tree_offspring_diverges(law, r)) return kInfinity;
    const double keep = 1.0 - r;
    const auto per_type = [&](double m) { return r * m / (1.0 - m * keep); };
    return std::visit(
        Overloaded{
            [&](const MeanLaw::Uniform& u) {
                // Never looser than 1e-12 absolute; tighter for small integrals.
                const double coarse = u.a * per_type(0.5 * u.a);
                quad::Options opts;
                opts.abs_tol = 1e-12 * std::clamp(coarse, 1e-6, 1.0);
                return quad::adaptive_simpson(per_type, 0.0, u.a, opts).value / u.a;
            },
            [&](const MeanLaw::Constant& c) { return per_type(c.m); },
            [&](const MeanLaw::TwoPoint& t) { return atom_expectation(t, per_type); },
        },
        law.variant());
}

RegimeClass classify_local(const MeanLaw& law, double r)
{
    const double ex = expected_tree_offspring(law, r);
    LocalRegime label = LocalRegime::DiesOut;
    if (std::isinf(ex))
        label = LocalRegime::FixedTypeSurvives;
    else if (ex > 1.0)
        label = LocalRegime::SurvivesTypesTransient;
    return {label, ex};
}

CriticalThreshold critical_r_uniform(double a, double tol)
{
    if (!(a > 1.0 && a < 2.0))
        throw std::invalid_argument("critical_r_uniform needs 1 < a < 2, got " + std::to_string(a));
    const MeanLaw law = MeanLaw::uniform(a);
    const auto excess = [&](double r) { return expected_tree_offspring(law, r) - 1.0; };

    const double bracket_lo = 1.0 - 1.0 / a;
    const double bracket_hi = 1.0;
    const double v_lo = excess(bracket_lo);
    const double v_hi = excess(bracket_hi);
    if (!(v_lo > 0.0 && v_hi < 0.0)) throw BracketFailure(bracket_lo, bracket_hi, v_lo, v_hi);

    double lo = bracket_lo;
    double hi = bracket_hi;
    double mid = 0.5 * (lo + hi);
    double v_mid = excess(mid);
    int iterations = 1;
    while (iterations < 200) {
        if (v_mid > 0.0)
            lo = mid;
        else
            hi = mid;
        const double next = 0.5 * (lo + hi);
        if (next <= lo || next >= hi) break;
        mid = next;
        v_mid = excess(mid);
        ++iterations;
        if (std::abs(v_mid) <= 1e-3 * tol && hi - lo <= 1e-14) break;
    }
    const double residual = std::abs(v_mid);
    if (!(residual <= tol)) throw BracketFailure(lo, hi, excess(lo), excess(hi));
    return {mid, bracket_lo, bracket_hi, residual, iterations};
}

}  // namespace brenv

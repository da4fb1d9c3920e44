#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include "brenv/distributions.hpp"

namespace brenv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class InvalidMutationProbability : public std::invalid_argument {
public:
    explicit InvalidMutationProbability(double r);
};

class UndefinedJensenGap : public std::domain_error {
public:
    UndefinedJensenGap() : std::domain_error("Jensen gap undefined: E(M) = 0") {}
};

class BracketFailure : public std::runtime_error {
public:
    BracketFailure(double lo, double hi, double value_lo, double value_hi);
    double value_lo;
    double value_hi;
};

enum class GlobalVerdict { DiesOut, Survives, IndeterminateMomentCondition };
enum class LocalRegime { DiesOut, SurvivesTypesTransient, FixedTypeSurvives };
enum class FixedVerdict { DiesOut, Survives };

const char* to_string(GlobalVerdict v);
const char* to_string(LocalRegime v);
const char* to_string(FixedVerdict v);

/// Smith-Wilkinson classification of the globally changing environment.
struct GlobalClass {
    GlobalVerdict verdict;
    double e_log_m;                 // may be -inf
    double e_abs_log_m;             // may be +inf
    double e_abs_log_one_minus_p0;  // may be +inf
};

/// Behavior of the locally changing environment read off the tree of types.
struct RegimeClass {
    LocalRegime label;
    double expected_x;  // mean child types per type; may be +inf
};

struct CriticalThreshold {
    double r_c;
    double bracket_lo;
    double bracket_hi;
    double residual;  // |E(X)(r_c) - 1|
    int iterations;
};

struct LogMomentTerms {
    double e_abs_log_m;
    double e_abs_log_one_minus_p0;
};

double expect_mean(const MeanLaw& law);

/// E(ln M); closed form, -inf when mu has an atom at 0.
double expect_log_mean(const MeanLaw& law);

/// E|ln M| and E|ln(1 - P0)| by quadrature; +inf for an atom at 0.
LogMomentTerms expect_abs_log_survival_terms(const MeanLaw& law, OffspringFamily family);

GlobalClass classify_global(const MeanLaw& law, OffspringFamily family);

/// A fixed environment with mean E(M) survives iff E(M) > 1.
FixedVerdict classify_fixed(const MeanLaw& law);

/// ln E(M) - E(ln M). Throws UndefinedJensenGap when E(M) = 0.
double jensen_gap(const MeanLaw& law);

/// True when E(X) diverges: mu puts mass on {m : m(1 - r) >= 1}.
bool tree_offspring_diverges(const MeanLaw& law, double r);

/// r E[M / (1 - M(1 - r))], closed form per law variant; +inf when divergent.
/// Throws InvalidMutationProbability unless 0 < r <= 1.
double expected_tree_offspring(const MeanLaw& law, double r);

/// Same quantity by adaptive quadrature over mu (sums over atoms).
double expected_tree_offspring_quadrature(const MeanLaw& law, double r);

RegimeClass classify_local(const MeanLaw& law, double r);

/// Bisection for E(X)(r) = 1 on (1 - 1/a, 1) with mu = U[0, a], 1 < a < 2.
CriticalThreshold critical_r_uniform(double a, double tol = 1e-9);

}  // namespace brenv

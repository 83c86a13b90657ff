#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "charmat/fredholm.hpp"

namespace charmat::paramlab {

using fredholm::ProblemSpec;
using funcspace::SampledFunction;

/// Problem family indexed by eps in [0, eps0); generator(0) is the limit
/// problem. All generated problems must share (a, b, m, n, p).
struct Family {
    double eps0 = 1.0;
    std::function<ProblemSpec(double)> generator;

    ProblemSpec at(double eps) const;
};

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdict_name(Verdict v);

struct EvidencePoint {
    double eps = 0.0;
    double value = 0.0;
};

struct ConditionReport {
    std::string id;  // "0", "I", "II", "alpha", "beta", "gamma", "gamma_p", "gamma_prime", "delta"
    Verdict verdict = Verdict::Inconclusive;
    std::vector<EvidencePoint> evidence;
    std::string note;
};

struct ConvergenceRecord {
    double eps = 0.0;
    bool solvable = false;
    double error = 0.0;        // ||y(;eps) - y(;0)||_{n,p}
    double discrepancy = 0.0;  // residual of the limit solution in the eps-problem
    double ratio = 0.0;        // error / discrepancy where defined
};

struct RatioEstimate {
    bool conclusive = false;
    double eps_1 = 0.0;    // largest sampled eps with unique solvability
    double eps_2 = 0.0;    // largest eps entering the ratio band
    double gamma_1 = 0.0;  // smallest sampled error/discrepancy ratio
    double gamma_2 = 0.0;  // largest sampled error/discrepancy ratio
};

/// 12 geometric points from 1e-1 down to 1e-6.
std::vector<double> default_eps_grid();

/// Decay-to-zero trend over a decreasing eps grid: pass iff the final value
/// drops below max(abs_tol, rel_tol * peak) and the last three values are
/// non-increasing; small-but-bumpy data is inconclusive.
struct TrendTolerances {
    double abs_tol = 1e-8;
    double rel_tol = 1e-2;
    double zero_floor = 1e-11;
};
Verdict decay_verdict(const std::vector<EvidencePoint>& evidence,
                      const TrendTolerances& tol = {});

/// Unique solvability of the limit homogeneous problem.
ConditionReport check_condition_0(const Family& fam);

/// Coefficient convergence A(.,eps) -> A(.,0) in the W^{n-1}_p norm.
ConditionReport check_condition_I(const Family& fam, const std::vector<double>& eps_grid);

/// Strong convergence B(eps)y -> B(0)y sampled on the given probe functions.
/// A pass means no counterexample among the probes, not an exhaustive proof.
ConditionReport check_condition_II(const Family& fam, const std::vector<double>& eps_grid,
                                   const std::vector<SampledFunction>& probes);

/// Monomial probes t^k e_i, k <= n+2, plus 10 seeded random smooth functions.
std::vector<SampledFunction> default_probes(const ProblemSpec& limit, std::uint64_t seed);

/// Point-collision and coefficient-growth assumptions for multipoint
/// operators: alpha, beta and delta always; gamma for p = inf; gamma_p and
/// gamma_prime for finite p.
std::vector<ConditionReport> check_multipoint_assumptions(const Family& fam,
                                                          const std::vector<double>& eps_grid);

/// Solves the family across the eps grid and measures error and discrepancy
/// of the limit solution against every eps-problem. Unsolvable members are
/// recorded, not thrown.
std::vector<ConvergenceRecord> sweep(const Family& fam, const std::vector<double>& eps_grid);

/// Empirical two-sided ratio band from sweep records with discrepancy above
/// the noise floor (at least 3 required).
RatioEstimate estimate_gamma_bounds(const std::vector<ConvergenceRecord>& records);

/// Least-squares slope of log(value) against log(eps); NaN when fewer than
/// two usable points.
double log_log_slope(const std::vector<EvidencePoint>& points);

}  // namespace charmat::paramlab

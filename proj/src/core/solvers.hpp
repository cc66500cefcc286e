#pragma once

#include <vector>

namespace cranhet {

struct Scenario;
struct Deployment;
class ChannelRealization;
struct Assignment;
struct PowerProfile;

struct SolverOptions {
    double tol_kkt = 1e-8;       // scale-free stationarity residual
    double tol_step = 1e-10;     // iterate-change stop, relative to budget
    int max_iters = 10000;
    double p_floor_rel = 1e-12;  // singularity guard, relative to budget
    double armijo_c = 1e-4;
    double backtrack_beta = 0.5;

    void validate() const;
};

// Normalized truncated-Poisson level proportions g_m(0..m).
struct LevelWeights {
    int m = 0;
    std::vector<double> g; // size m + 1, sums to 1

    double at(int h) const { return g[static_cast<size_t>(h)]; }
};

LevelWeights poisson_level_weights(double tau, int m);

// Classic water-filling: p_k = (nu - 1/c_k)^+ with the water level nu found by
// bisection so the powers sum to p_max, then fixed exactly on the resulting
// active set. Maximizes sum_k (W/L) log2(1 + c_k p_k) over the scaled simplex.
std::vector<double> waterfill(const std::vector<double>& c, double p_max, double w_over_l,
                              const SolverOptions& opts = {});

// Euclidean projection onto {x >= 0, sum x = budget}.
std::vector<double> simplex_project(const std::vector<double>& v, double budget);

// The CU's concave program: maximize
//   sum_k (W/L) log2(1 + (sum_i c[i][k] sqrt(p[i][k]))^2 / e[k])
// subject to sum_k p[i][k] = budget[i], p >= 0, per RRH row i. The e[k] are the
// frozen interference-plus-noise denominators.
struct CuProblem {
    int n_rrh = 0;
    int n_sub = 0;
    std::vector<double> c;      // [i][k], |h| sqrt(d^-alpha) amplitude coefficients
    std::vector<double> e;      // [k], >= noise power
    std::vector<double> budget; // [i]
    double w_over_l = 1.0;

    double coef(int i, int k) const { return c[static_cast<size_t>(i) * n_sub + k]; }
    void validate() const;
};

struct CuSolution {
    std::vector<double> p; // [i][k]
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    std::vector<double> objective_trace; // accepted-iterate objectives, nondecreasing
};

double cu_objective(const CuProblem& prob, const std::vector<double>& p);

// Analytic gradient of the CU objective. The 1/sqrt(p) factor is capped at the
// interior floor so boundary iterates stay evaluable; exact above the floor.
std::vector<double> cu_gradient(const CuProblem& prob, const std::vector<double>& p,
                                const SolverOptions& opts = {});

// Projected gradient ascent with Armijo backtracking from the equal-power
// point. Powers below the floor are snapped to exact zero with the budget
// restored onto the remaining coordinates. Throws SolverError (carrying the
// best iterate and residual) when max_iters is exhausted.
CuSolution cu_best_response(const CuProblem& prob, const SolverOptions& opts = {});

// A BS's cognitive-hierarchy best response: maximize
//   sum_k (W/L) log2(1 + c[k] p_k / (I[k] + D[k] p_k))
// over the scaled simplex. Per-subcarrier stationarity is strictly decreasing
// in p_k and admits a closed quadratic root for a fixed multiplier, so the
// multiplier is found by bisection.
struct BsChProblem {
    std::vector<double> c; // own power gain per k
    std::vector<double> D; // same-level belief coefficient per k, >= 0
    std::vector<double> I; // lower-level interference plus noise per k, > 0
    double p_max = 0.0;
    double w_over_l = 1.0;

    void validate() const;
};

struct BsChSolution {
    std::vector<double> p;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

double bs_ch_objective(const BsChProblem& prob, const std::vector<double>& p);

BsChSolution bs_ch_best_response(const BsChProblem& prob, const SolverOptions& opts = {});

// Nash best response of BS tx: effective gains from the others' current powers
// (own gain over interference plus noise), then water-filling.
std::vector<double> nash_bs_best_response(const Scenario& s, const ChannelRealization& c,
                                          const Deployment& d, const Assignment& a,
                                          const PowerProfile& others, int tx,
                                          const SolverOptions& opts = {});

} // namespace cranhet

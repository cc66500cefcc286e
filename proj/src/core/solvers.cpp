#include "core/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"
#include "core/rates.hpp"

namespace cranhet {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Rescales nonnegative powers to hit the budget exactly.
void restore_budget(std::vector<double>& p, double budget) {
    const double s = sum(p);
    if (s <= 0.0) {
        // flat fallback, only reachable for degenerate all-zero gains
        std::fill(p.begin(), p.end(), budget / static_cast<double>(p.size()));
        return;
    }
    const double scale = budget / s;
    for (double& v : p) v *= scale;
}

// Snaps entries below the floor to exact zero, restoring the budget onto the
// remaining coordinates. Keeps regression fixtures clean.
void snap_floor(std::vector<double>& p, double budget, double floor) {
    bool any_positive = false;
    for (double& v : p) {
        if (v < floor) v = 0.0;
        else any_positive = true;
    }
    if (!any_positive) {
        std::fill(p.begin(), p.end(), budget / static_cast<double>(p.size()));
        return;
    }
    restore_budget(p, budget);
}

} // namespace

void SolverOptions::validate() const {
    if (!(tol_kkt > 0 && tol_kkt < 1) || !(tol_step > 0 && tol_step < 1))
        throw InvalidArgError("solver options: tolerances must lie in (0, 1)");
    if (max_iters < 1) throw InvalidArgError("solver options: max_iters must be >= 1");
    if (!(p_floor_rel > 0) || !(armijo_c > 0) || !(backtrack_beta > 0 && backtrack_beta < 1))
        throw InvalidArgError("solver options: invalid line-search constants");
}

LevelWeights poisson_level_weights(double tau, int m) {
    if (!(tau > 0)) throw InvalidArgError("poisson_level_weights: tau must be > 0");
    if (m < 0) throw InvalidArgError("poisson_level_weights: level must be >= 0");
    LevelWeights w;
    w.m = m;
    w.g.resize(m + 1);
    double f = std::exp(-tau); // f(0)
    double total = 0.0;
    for (int h = 0; h <= m; ++h) {
        if (h > 0) f *= tau / h;
        w.g[h] = f;
        total += f;
    }
    for (double& g : w.g) g /= total;
    return w;
}

std::vector<double> waterfill(const std::vector<double>& c, double p_max, double w_over_l,
                              const SolverOptions& opts) {
    (void)w_over_l; // positive scaling of the objective; the argmax is invariant
    opts.validate();
    if (c.empty()) throw InvalidArgError("waterfill: empty gain vector");
    if (!(p_max > 0)) throw InvalidArgError("waterfill: p_max must be > 0");
    for (double g : c)
        if (!(g > 0)) throw InvalidArgError("waterfill: gains must be > 0");

    const size_t L = c.size();
    if (L == 1) return {p_max};

    std::vector<double> inv(L);
    for (size_t k = 0; k < L; ++k) inv[k] = 1.0 / c[k];

    const auto filled = [&](double nu) {
        double s = 0.0;
        for (double i : inv) s += std::max(nu - i, 0.0);
        return s;
    };

    // water level nu: sum_k (nu - 1/c_k)^+ is continuous increasing
    double lo = *std::min_element(inv.begin(), inv.end());
    double hi = lo + p_max;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (filled(mid) < p_max) lo = mid;
        else hi = mid;
        if (hi - lo <= opts.tol_step * p_max) break;
    }
    const double nu_bisect = 0.5 * (lo + hi);

    // exact level on the active set the bisection settled on
    double inv_sum = 0.0;
    int active = 0;
    for (double i : inv)
        if (nu_bisect > i) {
            inv_sum += i;
            ++active;
        }
    const double nu = (p_max + inv_sum) / active;

    std::vector<double> p(L);
    for (size_t k = 0; k < L; ++k) p[k] = std::max(nu - inv[k], 0.0);
    return p;
}

std::vector<double> simplex_project(const std::vector<double>& v, double budget) {
    if (!(budget > 0)) throw InvalidArgError("simplex_project: budget must be > 0");
    if (v.empty()) throw InvalidArgError("simplex_project: empty vector");
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (size_t j = 0; j < u.size(); ++j) {
        css += u[j];
        const double t = (css - budget) / static_cast<double>(j + 1);
        if (u[j] - t > 0) theta = t;
    }
    std::vector<double> x(v.size());
    for (size_t i = 0; i < v.size(); ++i) x[i] = std::max(v[i] - theta, 0.0);
    return x;
}

void CuProblem::validate() const {
    if (n_rrh < 1 || n_sub < 1) throw InvalidArgError("cu problem: empty dimensions");
    if (c.size() != static_cast<size_t>(n_rrh) * n_sub || e.size() != static_cast<size_t>(n_sub) ||
        budget.size() != static_cast<size_t>(n_rrh))
        throw InvalidArgError("cu problem: shape mismatch");
    for (double v : c)
        if (!(v >= 0)) throw InvalidArgError("cu problem: coefficients must be >= 0");
    for (double v : e)
        if (!(v > 0)) throw InvalidArgError("cu problem: denominators must be > 0");
    for (double v : budget)
        if (!(v > 0)) throw InvalidArgError("cu problem: budgets must be > 0");
    if (!(w_over_l > 0)) throw InvalidArgError("cu problem: W/L must be > 0");
}

double cu_objective(const CuProblem& prob, const std::vector<double>& p) {
    double obj = 0.0;
    for (int k = 0; k < prob.n_sub; ++k) {
        double amp = 0.0;
        for (int i = 0; i < prob.n_rrh; ++i)
            amp += prob.coef(i, k) * std::sqrt(p[static_cast<size_t>(i) * prob.n_sub + k]);
        obj += prob.w_over_l * std::log2(1.0 + amp * amp / prob.e[k]);
    }
    return obj;
}

std::vector<double> cu_gradient(const CuProblem& prob, const std::vector<double>& p,
                                const SolverOptions& opts) {
    std::vector<double> g(p.size());
    for (int k = 0; k < prob.n_sub; ++k) {
        double amp = 0.0;
        for (int i = 0; i < prob.n_rrh; ++i)
            amp += prob.coef(i, k) * std::sqrt(p[static_cast<size_t>(i) * prob.n_sub + k]);
        for (int i = 0; i < prob.n_rrh; ++i) {
            const size_t idx = static_cast<size_t>(i) * prob.n_sub + k;
            const double cik = prob.coef(i, k);
            const double sqrtp = std::sqrt(p[idx]);
            const double rest = amp - cik * sqrtp; // contribution of the other RRHs
            const double sqrt_floor = std::sqrt(opts.p_floor_rel * prob.budget[i]);
            // d/dp of amp^2 is c * amp / sqrt(p); the 1/sqrt(p) factor is capped
            // at the interior floor so boundary points stay finite
            const double ratio = cik + rest / std::max(sqrtp, sqrt_floor);
            g[idx] = prob.w_over_l / kLn2 * cik * ratio / (prob.e[k] + amp * amp);
        }
    }
    return g;
}

namespace {

// Scale-free stationarity residual for the CU program: within each RRH row,
// the gradient must be constant over coordinates above the floor. Coordinates
// at or below the floor are exempt (the marginal utility diverges like
// 1/sqrt(p) there, so sub-floor optima are legitimate and snapped to zero).
// An all-zero column is tested against coordinated reentry: moving mass
// d_i onto it gains (W/(L ln2 e_k)) (sum_i c_ik sqrt(d_i))^2 to first order
// at cost sum_i mu_i d_i, and maximizing the ratio gives the corner condition
// (W/(L ln2)) sum_i c_ik^2 / mu_i <= e_k.
double cu_kkt_residual(const CuProblem& prob, const std::vector<double>& p,
                       const std::vector<double>& g, const SolverOptions& opts) {
    std::vector<double> mu(prob.n_rrh, 0.0);
    double worst = 0.0;
    for (int i = 0; i < prob.n_rrh; ++i) {
        const double floor = opts.p_floor_rel * prob.budget[i];
        int active = 0;
        for (int k = 0; k < prob.n_sub; ++k) {
            const size_t idx = static_cast<size_t>(i) * prob.n_sub + k;
            if (p[idx] > floor) {
                mu[i] += g[idx];
                ++active;
            }
        }
        if (active == 0) continue;
        mu[i] /= active;
        double r = 0.0;
        for (int k = 0; k < prob.n_sub; ++k) {
            const size_t idx = static_cast<size_t>(i) * prob.n_sub + k;
            if (p[idx] > floor) r = std::max(r, std::abs(g[idx] - mu[i]));
        }
        worst = std::max(worst, r / std::max(std::abs(mu[i]), 1e-300));
    }
    for (int k = 0; k < prob.n_sub; ++k) {
        double amp = 0.0;
        for (int i = 0; i < prob.n_rrh; ++i)
            amp += prob.coef(i, k) * std::sqrt(p[static_cast<size_t>(i) * prob.n_sub + k]);
        if (amp > 0.0) continue;
        double gain = 0.0;
        for (int i = 0; i < prob.n_rrh; ++i)
            if (mu[i] > 0.0)
                gain += prob.coef(i, k) * prob.coef(i, k) / mu[i];
        gain *= prob.w_over_l / kLn2;
        worst = std::max(worst, std::max(gain / prob.e[k] - 1.0, 0.0));
    }
    return worst;
}

// True when column k is held up only by floor-scale mass: some rows are at
// exact zero while every positive entry sits within a hair of its floor.
// Such columns are artifacts of the sqrt singularity (mutually supported
// near-zero powers), not genuine allocations.
bool cu_straggler_column(const CuProblem& prob, const std::vector<double>& p, int k) {
    bool any_zero = false, any_positive = false;
    for (int i = 0; i < prob.n_rrh; ++i) {
        const double v = p[static_cast<size_t>(i) * prob.n_sub + k];
        if (v <= 0.0) any_zero = true;
        else if (v <= 1e-6 * prob.budget[i]) any_positive = true;
        else return false; // real mass present
    }
    return any_zero && any_positive;
}

void project_rows(const CuProblem& prob, std::vector<double>& p) {
    for (int i = 0; i < prob.n_rrh; ++i) {
        std::vector<double> row(p.begin() + static_cast<size_t>(i) * prob.n_sub,
                                p.begin() + static_cast<size_t>(i + 1) * prob.n_sub);
        row = simplex_project(row, prob.budget[i]);
        std::copy(row.begin(), row.end(), p.begin() + static_cast<size_t>(i) * prob.n_sub);
    }
}

void snap_floor_rows(const CuProblem& prob, std::vector<double>& p, const SolverOptions& opts) {
    for (int i = 0; i < prob.n_rrh; ++i) {
        std::vector<double> row(p.begin() + static_cast<size_t>(i) * prob.n_sub,
                                p.begin() + static_cast<size_t>(i + 1) * prob.n_sub);
        snap_floor(row, prob.budget[i], opts.p_floor_rel * prob.budget[i]);
        std::copy(row.begin(), row.end(), p.begin() + static_cast<size_t>(i) * prob.n_sub);
    }
}

// Marginal utility of RRH i on subcarrier k given the other RRHs' amplitude
// contribution b_k: (W/(L ln2)) c (c sqrt(p) + b) / (sqrt(p) (e + (c sqrt(p) + b)^2)),
// strictly decreasing in p.
double cu_row_marginal(double w_over_l, double c, double b, double e, double p) {
    const double sp = std::sqrt(p);
    const double amp = c * sp + b;
    return w_over_l / kLn2 * c * amp / (sp * (e + amp * amp));
}

// Root of the per-subcarrier stationarity cu_row_marginal(p) = mu.
double cu_row_root(double w_over_l, double c, double b, double e, double mu, double p_hi_seed) {
    if (c <= 0.0) return 0.0;
    if (b <= 0.0) {
        // SISO-like bin: marginal at 0+ is finite, w c^2 / (L ln2 e)
        if (w_over_l / kLn2 * c * c / e <= mu) return 0.0;
    }
    double hi = p_hi_seed;
    for (int it = 0; it < 4000 && cu_row_marginal(w_over_l, c, b, e, hi) > mu; ++it) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (cu_row_marginal(w_over_l, c, b, e, mid) > mu) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Exact maximization of one RRH row holding the other rows fixed: bisection on
// the row multiplier with per-subcarrier stationarity roots.
void cu_row_solve(const CuProblem& prob, int i, std::vector<double>& p) {
    const int L = prob.n_sub;
    const double B = prob.budget[i];
    std::vector<double> b(L, 0.0);
    for (int k = 0; k < L; ++k)
        for (int l = 0; l < prob.n_rrh; ++l)
            if (l != i) b[k] += prob.coef(l, k) * std::sqrt(p[static_cast<size_t>(l) * L + k]);

    const auto allocated = [&](double mu) {
        double s = 0.0;
        for (int k = 0; k < L; ++k)
            s += cu_row_root(prob.w_over_l, prob.coef(i, k), b[k], prob.e[k], mu, B);
        return s;
    };

    double mu_hi = 0.0;
    for (int k = 0; k < L; ++k)
        mu_hi = std::max(mu_hi,
                         cu_row_marginal(prob.w_over_l, prob.coef(i, k), b[k], prob.e[k], B));
    if (mu_hi <= 0.0) {
        // row has no usable gains; keep it flat
        std::fill(p.begin() + static_cast<size_t>(i) * L,
                  p.begin() + static_cast<size_t>(i + 1) * L, B / L);
        return;
    }
    for (int it = 0; it < 4000 && allocated(mu_hi) > B; ++it) mu_hi *= 2.0;
    double mu_lo = mu_hi;
    for (int it = 0; it < 4000 && allocated(mu_lo) < B; ++it) mu_lo *= 0.5;

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (mu_lo + mu_hi);
        if (mid == mu_lo || mid == mu_hi) break;
        if (allocated(mid) >= B) mu_lo = mid;
        else mu_hi = mid;
    }
    const double mu = 0.5 * (mu_lo + mu_hi);
    std::vector<double> row(L);
    for (int k = 0; k < L; ++k)
        row[k] = cu_row_root(prob.w_over_l, prob.coef(i, k), b[k], prob.e[k], mu, B);
    restore_budget(row, B);
    std::copy(row.begin(), row.end(), p.begin() + static_cast<size_t>(i) * L);
}

} // namespace

CuSolution cu_best_response(const CuProblem& prob, const SolverOptions& opts) {
    prob.validate();
    opts.validate();

    const size_t n = static_cast<size_t>(prob.n_rrh) * prob.n_sub;
    std::vector<double> p(n);
    for (int i = 0; i < prob.n_rrh; ++i)
        for (int k = 0; k < prob.n_sub; ++k)
            p[static_cast<size_t>(i) * prob.n_sub + k] = prob.budget[i] / prob.n_sub;

    const double max_budget = *std::max_element(prob.budget.begin(), prob.budget.end());

    CuSolution sol;
    double f = cu_objective(prob, p);
    sol.objective_trace.push_back(f);

    // stage 1: projected gradient ascent with Armijo backtracking. Capped well
    // below max_iters; radio-scale conditioning can make first-order progress
    // crawl, and stage 2 closes the remaining gap cheaply.
    const int stage1_cap = std::min(opts.max_iters, 500);
    double t0 = -1.0; // adaptive initial step, set from the first gradient
    double residual = std::numeric_limits<double>::infinity();
    while (sol.iterations < stage1_cap) {
        ++sol.iterations;
        const auto g = cu_gradient(prob, p, opts);
        residual = cu_kkt_residual(prob, p, g, opts);
        if (residual <= opts.tol_kkt) break;

        const double gnorm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
        if (t0 <= 0) t0 = max_budget / std::max(gnorm, 1e-300);

        double t = t0;
        std::vector<double> q;
        double fq = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            q = p;
            for (size_t j = 0; j < n; ++j) q[j] += t * g[j];
            project_rows(prob, q);
            fq = cu_objective(prob, q);
            double lin = 0.0;
            for (size_t j = 0; j < n; ++j) lin += g[j] * (q[j] - p[j]);
            if (fq >= f + opts.armijo_c * lin) {
                accepted = true;
                break;
            }
            t *= opts.backtrack_beta;
        }
        if (!accepted) break; // objective differences hit the fp noise floor

        double step = 0.0;
        for (size_t j = 0; j < n; ++j) step = std::max(step, std::abs(q[j] - p[j]));
        p = std::move(q);
        f = fq;
        sol.objective_trace.push_back(f);
        t0 = std::min(t * 2.0, 1e18);

        if (step <= opts.tol_step * max_budget) break; // iterate stopped moving
    }

    // stage 2: exact per-row refinement. First-order steps stall once objective
    // differences are dominated by rounding; the row subproblem's stationarity
    // is strictly monotone per subcarrier, so each row can be solved to machine
    // precision against the others, driving the joint residual below tol_kkt.
    // At least one pass always runs, so boundary points the projection parked
    // at exact zero get re-optimized. Coherently coupled rows contract slowly,
    // so the linear tail is collapsed by safeguarded geometric extrapolation.
    const size_t n_vals = p.size();
    const auto refine_pass = [&](std::vector<double>& x) {
        for (int i = 0; i < prob.n_rrh; ++i) cu_row_solve(prob, i, x);
    };
    const auto kkt_of = [&](const std::vector<double>& x) {
        const auto g = cu_gradient(prob, x, opts);
        return cu_kkt_residual(prob, x, g, opts);
    };

    bool want_column_fixes = false;
    for (int round = 0; round < 8; ++round) {
        if (want_column_fixes) {
            // break mutually-supported floor-scale columns and reopen any
            // all-zero column that fails the coordinated reentry test; the
            // refinement passes below restore row feasibility
            for (int k = 0; k < prob.n_sub; ++k) {
                if (cu_straggler_column(prob, p, k)) {
                    for (int i = 0; i < prob.n_rrh; ++i)
                        p[static_cast<size_t>(i) * prob.n_sub + k] = 0.0;
                }
            }
            const auto g = cu_gradient(prob, p, opts);
            std::vector<double> mu(prob.n_rrh, 0.0);
            for (int i = 0; i < prob.n_rrh; ++i) {
                int active = 0;
                for (int k = 0; k < prob.n_sub; ++k) {
                    const size_t idx = static_cast<size_t>(i) * prob.n_sub + k;
                    if (p[idx] > opts.p_floor_rel * prob.budget[i]) {
                        mu[i] += g[idx];
                        ++active;
                    }
                }
                if (active > 0) mu[i] /= active;
            }
            for (int k = 0; k < prob.n_sub; ++k) {
                double amp = 0.0, gain = 0.0;
                for (int i = 0; i < prob.n_rrh; ++i) {
                    amp += prob.coef(i, k) *
                           std::sqrt(p[static_cast<size_t>(i) * prob.n_sub + k]);
                    if (mu[i] > 0.0) gain += prob.coef(i, k) * prob.coef(i, k) / mu[i];
                }
                if (amp == 0.0 && prob.w_over_l / kLn2 * gain > prob.e[k]) {
                    // profitable coordinated reentry; seed it and let passes size it
                    for (int i = 0; i < prob.n_rrh; ++i)
                        p[static_cast<size_t>(i) * prob.n_sub + k] = 1e-3 * prob.budget[i];
                }
            }
        }
        std::vector<double> prev(n_vals, 0.0);
        double prev_step = 0.0;
        for (int pass = 0; pass == 0 || (pass < 400 && residual > opts.tol_kkt); ++pass) {
            if (sol.iterations >= opts.max_iters) break;
            ++sol.iterations;
            prev = p;
            refine_pass(p);
            residual = kkt_of(p);
            const double f_new = cu_objective(prob, p);

            double step = 0.0;
            for (size_t j = 0; j < n_vals; ++j) step += (p[j] - prev[j]) * (p[j] - prev[j]);
            step = std::sqrt(step);
            if (pass % 4 == 3 && prev_step > 0.0 && step > 0.0 &&
                residual > opts.tol_kkt) {
                const double rho = step / prev_step;
                if (rho > 0.3 && rho < 0.9999) {
                    // sum the remaining geometric tail, then re-solve once
                    std::vector<double> cand = p;
                    const double scale = rho / (1.0 - rho);
                    for (size_t j = 0; j < n_vals; ++j)
                        cand[j] += scale * (p[j] - prev[j]);
                    for (size_t j = 0; j < n_vals; ++j) cand[j] = std::max(cand[j], 0.0);
                    project_rows(prob, cand);
                    refine_pass(cand);
                    const double cand_res = kkt_of(cand);
                    const double cand_f = cu_objective(prob, cand);
                    if (cand_res < residual && cand_f >= f_new) {
                        p = std::move(cand);
                        residual = cand_res;
                        ++sol.iterations;
                        sol.objective_trace.push_back(cand_f);
                        f = cand_f;
                        prev_step = 0.0;
                        continue;
                    }
                }
            }
            prev_step = step;
            f = f_new;
            sol.objective_trace.push_back(f);
        }

        snap_floor_rows(prob, p, opts);
        residual = kkt_of(p);
        if (residual <= opts.tol_kkt || sol.iterations >= opts.max_iters) break;
        want_column_fixes = true;
    }

    sol.p = p;
    sol.objective = cu_objective(prob, p);
    sol.kkt_residual = residual;
    if (residual > opts.tol_kkt)
        throw SolverError("cu_best_response: no convergence within max_iters (residual " +
                              std::to_string(residual) + ")",
                          sol.p, residual, sol.iterations);
    return sol;
}

void BsChProblem::validate() const {
    const size_t L = c.size();
    if (L == 0 || D.size() != L || I.size() != L)
        throw InvalidArgError("bs-ch problem: shape mismatch");
    for (double v : c)
        if (!(v >= 0)) throw InvalidArgError("bs-ch problem: gains must be >= 0");
    for (double v : D)
        if (!(v >= 0)) throw InvalidArgError("bs-ch problem: D must be >= 0");
    for (double v : I)
        if (!(v > 0)) throw InvalidArgError("bs-ch problem: I must be > 0");
    if (!(p_max > 0)) throw InvalidArgError("bs-ch problem: p_max must be > 0");
    if (!(w_over_l > 0)) throw InvalidArgError("bs-ch problem: W/L must be > 0");
}

double bs_ch_objective(const BsChProblem& prob, const std::vector<double>& p) {
    double obj = 0.0;
    for (size_t k = 0; k < prob.c.size(); ++k)
        obj += prob.w_over_l *
               std::log2(1.0 + prob.c[k] * p[k] / (prob.I[k] + prob.D[k] * p[k]));
    return obj;
}

namespace {

// Marginal utility phi_k(p) = (W/(L ln2)) c I / ((I + D p)(I + (c + D) p)),
// strictly decreasing in p.
double bs_ch_marginal(const BsChProblem& prob, size_t k, double p) {
    const double c = prob.c[k], D = prob.D[k], I = prob.I[k];
    return prob.w_over_l / kLn2 * c * I / ((I + D * p) * (I + (c + D) * p));
}

// Root of phi_k(p) = mu (0 when already below mu at p = 0).
double bs_ch_root(const BsChProblem& prob, size_t k, double mu) {
    const double c = prob.c[k], D = prob.D[k], I = prob.I[k];
    if (c <= 0.0) return 0.0;
    const double T = prob.w_over_l / kLn2 * c * I / mu;
    if (T <= I * I) return 0.0; // phi_k(0) <= mu
    if (D == 0.0) return (T - I * I) / (I * c);
    // D(c+D) p^2 + I(c+2D) p + (I^2 - T) = 0; C < 0 here, so the stable
    // q-form of the positive root avoids cancellation for small D
    const double A = D * (c + D);
    const double B = I * (c + 2.0 * D);
    const double C = I * I - T;
    return 2.0 * (-C) / (B + std::sqrt(B * B - 4.0 * A * C));
}

} // namespace

BsChSolution bs_ch_best_response(const BsChProblem& prob, const SolverOptions& opts) {
    prob.validate();
    opts.validate();
    const size_t L = prob.c.size();

    BsChSolution sol;
    if (std::all_of(prob.c.begin(), prob.c.end(), [](double v) { return v <= 0.0; })) {
        // objective is identically zero; return the symmetric point
        sol.p.assign(L, prob.p_max / static_cast<double>(L));
        return sol;
    }

    double mu_hi = 0.0;
    for (size_t k = 0; k < L; ++k) mu_hi = std::max(mu_hi, bs_ch_marginal(prob, k, 0.0));

    const auto allocated = [&](double mu) {
        double s = 0.0;
        for (size_t k = 0; k < L; ++k) s += bs_ch_root(prob, k, mu);
        return s;
    };

    double mu_lo = mu_hi;
    int iters = 0;
    while (allocated(mu_lo) < prob.p_max) {
        mu_lo *= 0.5;
        if (++iters > 2000)
            throw SolverError("bs_ch_best_response: bracket search failed", sol.p, 1.0, iters);
    }

    for (int it = 0; it < opts.max_iters; ++it) {
        ++iters;
        const double mid = 0.5 * (mu_lo + mu_hi);
        if (allocated(mid) >= prob.p_max) mu_lo = mid;
        else mu_hi = mid;
        if ((mu_hi - mu_lo) <= 1e-16 * mu_hi) break;
    }
    const double mu = 0.5 * (mu_lo + mu_hi);

    std::vector<double> p(L);
    for (size_t k = 0; k < L; ++k) p[k] = bs_ch_root(prob, k, mu);
    snap_floor(p, prob.p_max, opts.p_floor_rel * prob.p_max);

    // stationarity residual at the final point
    double mu_hat = 0.0;
    int active = 0;
    for (size_t k = 0; k < L; ++k)
        if (p[k] > 0) {
            mu_hat += bs_ch_marginal(prob, k, p[k]);
            ++active;
        }
    mu_hat /= std::max(active, 1);
    double r = 0.0;
    for (size_t k = 0; k < L; ++k) {
        const double phi = bs_ch_marginal(prob, k, p[k]);
        if (p[k] > 0) r = std::max(r, std::abs(phi - mu_hat));
        else r = std::max(r, std::max(phi - mu_hat, 0.0));
    }

    sol.p = std::move(p);
    sol.objective = bs_ch_objective(prob, sol.p);
    sol.kkt_residual = r / std::max(mu_hat, 1e-300);
    sol.iterations = iters;
    if (sol.kkt_residual > opts.tol_kkt)
        throw SolverError("bs_ch_best_response: residual above tolerance", sol.p,
                          sol.kkt_residual, iters);
    return sol;
}

std::vector<double> nash_bs_best_response(const Scenario& s, const ChannelRealization& c,
                                          const Deployment& d, const Assignment& a,
                                          const PowerProfile& others, int tx,
                                          const SolverOptions& opts) {
    const int L = s.n_subcarriers;
    std::vector<double> gains(L);
    for (int k = 0; k < L; ++k) {
        const int j = a.bs_user_at(tx, k);
        if (j < 0) throw InvalidArgError("nash_bs_best_response: transmitter is not a BS");
        double den = s.noise_power_w;
        for (const auto& t : d.transmitters) {
            if (t.id == tx) continue;
            den += c.gain_abs2(t.id, j, k) * others.at(t.id, k) *
                   std::pow(d.distance(t.id, j), -s.pathloss_exponent);
        }
        const double own =
            c.gain_abs2(tx, j, k) * std::pow(d.distance(tx, j), -s.pathloss_exponent);
        // |h| = 0 has probability zero; the clamp keeps waterfill preconditions
        gains[k] = std::max(own / den, 1e-300);
    }
    return waterfill(gains, d.transmitters[tx].p_max_w, s.w_over_l(), opts);
}

} // namespace cranhet

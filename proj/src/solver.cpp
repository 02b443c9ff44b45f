#include "slr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slr/errors.hpp"

namespace slr {

namespace {

constexpr double kVacuousRadiusSq = 1e18; // beyond this the cap can't bind
constexpr double kZeroRadiusSq = 1e-20;   // below this only w_c = 0 fits

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Acklam's rational approximation, good to ~1e-9 before polishing
double probit_seed(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

void validate_config(const chance_config& config) {
    if (!(config.alpha >= 0.0) || !std::isfinite(config.alpha))
        throw config_error("alpha must be finite and >= 0, got " + std::to_string(config.alpha));
    if (!(config.beta > 0.0 && config.beta < 1.0))
        throw config_error("beta must lie in (0,1), got " + std::to_string(config.beta));
}

struct reduced_workspace {
    Eigen::MatrixXd M;  // G x d group means
    Eigen::VectorXd yb; // mean scores
};

// psi_t = t * J + phi, phi = -sum log(r_g^2 - w_c' V_g w_c) over binding groups
struct barrier_eval {
    double value = std::numeric_limits<double>::infinity();
    bool feasible = false;
};

barrier_eval eval_barrier(const weight_vector& w, double t, const reduced_problem& prob,
                          const reduced_workspace& ws, const std::vector<int>& binding) {
    barrier_eval out;
    double phi = 0.0;
    for (int g : binding) {
        double slack = prob.radius_sq[g] -
                       w.coefficients.dot(prob.groups[std::size_t(g)].covariance * w.coefficients);
        if (slack <= 0.0) return out; // outside the domain
        phi -= std::log(slack);
    }
    out.value = t * log_loss(w, ws.M, ws.yb) + phi;
    out.feasible = std::isfinite(out.value);
    return out;
}

solver_report solve_closed_form(const reduced_problem& prob, const reduced_workspace& ws) {
    // with w_c pinned at zero the optimum is sigma(w0) = mean of group scores
    const Eigen::Index G = ws.yb.size();
    double mbar = ws.yb.mean();
    solver_report rep;
    rep.weights = weight_vector::zeros(prob.dim());
    rep.weights.intercept = std::log(mbar / (1.0 - mbar));
    rep.epsilons = Eigen::VectorXd::Constant(G, rep.weights.intercept);
    rep.multipliers = Eigen::VectorXd::Zero(G);
    rep.objective = log_loss(rep.weights, ws.M, ws.yb);
    // gradient along the only free direction; the coefficient block is pinned
    rep.kkt_stationarity = std::abs(loss_gradient(rep.weights, ws.M, ws.yb)[0]);
    rep.status = solve_status::optimal;
    return rep;
}

solver_report solve_unconstrained(const reduced_workspace& ws, double tol, int max_iter) {
    fit_report fit = fit_logistic(ws.M, ws.yb, tol, max_iter);
    solver_report rep;
    rep.weights = fit.weights;
    rep.epsilons =
        ((ws.M * fit.weights.coefficients).array() + fit.weights.intercept).matrix();
    rep.multipliers = Eigen::VectorXd::Zero(ws.yb.size());
    rep.objective = fit.final_loss;
    rep.kkt_stationarity = fit.gradient_norm;
    rep.newton_total_iters = fit.iterations;
    rep.status = fit.converged ? solve_status::optimal : solve_status::max_iter;
    return rep;
}

} // namespace

double probit(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw config_error("probit argument must lie in (0,1), got " + std::to_string(p));
    // reflect the upper half onto the lower: 1-p is exact for p >= 0.5 (Sterbenz), and
    // the CDF keeps full relative precision only in the lower tail, where erfc does
    if (p > 0.5) return -probit(1.0 - p);
    double x = probit_seed(p);
    // Halley steps against the erfc-based CDF push the error to ~1e-15
    for (int i = 0; i < 2; ++i) {
        double e = std_normal_cdf(x) - p;
        double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        if (!std::isfinite(u)) break;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double constraint_radius(const chance_config& config) {
    validate_config(config);
    double z = probit(0.5 * (1.0 + config.beta));
    if (z <= 0.0) return std::numeric_limits<double>::infinity();
    double r = config.alpha / z;
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd reduced_problem::mean_matrix() const {
    Eigen::MatrixXd M(Eigen::Index(groups.size()), dim());
    for (std::size_t g = 0; g < groups.size(); ++g) M.row(Eigen::Index(g)) = groups[g].mean;
    return M;
}

Eigen::VectorXd reduced_problem::mean_scores() const {
    Eigen::VectorXd y(Eigen::Index(groups.size()));
    for (std::size_t g = 0; g < groups.size(); ++g) y[Eigen::Index(g)] = groups[g].mean_score;
    return y;
}

reduced_problem assemble_reduced(const std::vector<group_summary>& groups,
                                 const chance_config& config) {
    if (groups.empty()) throw data_error("assemble_reduced: no groups");
    double r = constraint_radius(config);
    double r2 = std::isfinite(r) ? r * r : std::numeric_limits<double>::infinity();
    if (!std::isfinite(r2)) r2 = std::numeric_limits<double>::infinity();
    reduced_problem prob;
    prob.groups = groups;
    prob.radius_sq = Eigen::VectorXd::Constant(Eigen::Index(groups.size()), r2);
    prob.config = config;
    return prob;
}

lifted_problem assemble_lifted(const std::vector<group_summary>& groups,
                               const chance_config& config) {
    if (groups.empty()) throw data_error("assemble_lifted: no groups");
    validate_config(config);
    lifted_problem prob;
    prob.d = groups.front().mean.size();
    prob.g_count = Eigen::Index(groups.size());
    prob.config = config;
    const Eigen::Index zd = prob.z_dim();
    for (Eigen::Index g = 0; g < prob.g_count; ++g) {
        const auto& grp = groups[std::size_t(g)];
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(zd, zd);
        V.topLeftCorner(prob.d, prob.d) = grp.covariance;
        prob.block_cov.push_back(std::move(V));
        Eigen::VectorXd P = Eigen::VectorXd::Zero(zd);
        P.head(prob.d) = grp.mean;
        P[prob.d] = 1.0;          // intercept slot
        P[prob.d + 1 + g] = -1.0; // this group's epsilon slot
        prob.equality_coeffs.push_back(std::move(P));
        prob.mean_scores.push_back(grp.mean_score);
    }
    return prob;
}

double lifted_problem::objective(const Eigen::VectorXd& z) const {
    double J = 0.0;
    for (Eigen::Index g = 0; g < g_count; ++g) {
        double eps = z[d + 1 + g];
        J += softplus(eps) - mean_scores[std::size_t(g)] * eps;
    }
    return J;
}

std::vector<double> lifted_problem::constraint_values(const Eigen::VectorXd& z) const {
    const double zq = probit(0.5 * (1.0 + config.beta));
    std::vector<double> vals;
    vals.reserve(std::size_t(4 * g_count));
    for (Eigen::Index g = 0; g < g_count; ++g) {
        double spread = std::sqrt(std::max(0.0, z.dot(block_cov[std::size_t(g)] * z)));
        double ratio = config.alpha / std::max(spread, 1e-300);
        vals.push_back(zq - ratio);
        vals.push_back(-ratio - probit(0.5 * (1.0 - config.beta)));
        double lin = equality_coeffs[std::size_t(g)].dot(z);
        vals.push_back(lin);
        vals.push_back(-lin);
    }
    return vals;
}

std::string to_string(solve_status s) {
    switch (s) {
    case solve_status::optimal: return "optimal";
    case solve_status::infeasible: return "infeasible";
    case solve_status::max_iter: return "max_iter";
    case solve_status::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

solver_report solve_slr(const reduced_problem& problem, double tol, int max_iter) {
    const Eigen::Index G = Eigen::Index(problem.groups.size());
    const Eigen::Index d = problem.dim();
    if (G == 0) throw data_error("solve_slr: no groups");
    if (problem.radius_sq.size() != G) throw data_error("solve_slr: radius vector size mismatch");
    for (const auto& g : problem.groups) {
        if (g.mean.size() != d || g.covariance.rows() != d || g.covariance.cols() != d)
            throw data_error("solve_slr: inconsistent group dimensions");
    }

    reduced_workspace ws{problem.mean_matrix(), problem.mean_scores()};

    // a PD covariance with an (effectively) zero radius pins w_c at the origin
    double min_r2 = problem.radius_sq.minCoeff();
    if (min_r2 <= kZeroRadiusSq) return solve_closed_form(problem, ws);
    if (min_r2 >= kVacuousRadiusSq || !std::isfinite(min_r2))
        return solve_unconstrained(ws, tol, max_iter);

    std::vector<int> binding; // groups whose cap can actually bite
    for (Eigen::Index g = 0; g < G; ++g)
        if (std::isfinite(problem.radius_sq[g]) && problem.radius_sq[g] < kVacuousRadiusSq)
            binding.push_back(int(g));

    solver_report rep;
    rep.weights = weight_vector::zeros(d); // w = 0 is strictly inside every cap
    rep.multipliers = Eigen::VectorXd::Zero(G);

    double t = 1.0;
    const double mu = 10.0;
    const double gap_target = tol; // stop once (#binding)/t falls under this
    const int max_outer = 64;

    for (int outer = 0; outer < max_outer; ++outer) {
        rep.barrier_outer_iters = outer + 1;
        int stage_steps = 0;

        // damped Newton centering of psi_t around the current iterate
        for (int it = 0; it < max_iter; ++it) {
            Eigen::VectorXd grad = loss_gradient(rep.weights, ws.M, ws.yb) * t;
            Eigen::MatrixXd H(d + 1, d + 1);
            {
                Eigen::VectorXd eta =
                    ((ws.M * rep.weights.coefficients).array() + rep.weights.intercept).matrix();
                Eigen::VectorXd s(G);
                for (Eigen::Index g = 0; g < G; ++g) {
                    double p = sigmoid(eta[g]);
                    s[g] = p * (1.0 - p);
                }
                H(0, 0) = s.sum();
                Eigen::VectorXd cross = ws.M.transpose() * s;
                H.block(1, 0, d, 1) = cross;
                H.block(0, 1, 1, d) = cross.transpose();
                H.block(1, 1, d, d) = ws.M.transpose() * s.asDiagonal() * ws.M;
                H *= t;
            }
            for (int g : binding) {
                const Eigen::MatrixXd& V = problem.groups[std::size_t(g)].covariance;
                Eigen::VectorXd u = V * rep.weights.coefficients;
                double slack = problem.radius_sq[g] - rep.weights.coefficients.dot(u);
                if (slack <= 0.0) {
                    rep.status = solve_status::numerical_failure;
                    return rep;
                }
                grad.tail(d) += (2.0 / slack) * u;
                H.block(1, 1, d, d) += (2.0 / slack) * V;
                H.block(1, 1, d, d) += (4.0 / (slack * slack)) * (u * u.transpose());
            }
            H.diagonal().array() += 1e-12;

            double gnorm = grad.lpNorm<Eigen::Infinity>();
            if (gnorm <= 1e-9 * std::max(1.0, t)) break;

            Eigen::VectorXd step = -H.ldlt().solve(grad);
            if (!step.allFinite()) {
                rep.status = solve_status::numerical_failure;
                return rep;
            }

            barrier_eval here = eval_barrier(rep.weights, t, problem, ws, binding);
            double slope = grad.dot(step);
            double stride = 1.0;
            weight_vector trial = rep.weights;
            bool moved = false;
            while (stride > 1e-14) {
                trial.intercept = rep.weights.intercept + stride * step[0];
                trial.coefficients = rep.weights.coefficients + stride * step.tail(d);
                barrier_eval cand = eval_barrier(trial, t, problem, ws, binding);
                if (cand.feasible && cand.value <= here.value + 1e-4 * stride * slope) {
                    rep.weights = trial;
                    moved = true;
                    break;
                }
                stride *= 0.5;
            }
            rep.newton_total_iters++;
            stage_steps++;
            if (!moved) break; // line search stalled; gradient check below decides status
        }

        double min_slack = std::numeric_limits<double>::infinity();
        for (int g : binding) {
            double q = rep.weights.coefficients.dot(
                problem.groups[std::size_t(g)].covariance * rep.weights.coefficients);
            min_slack = std::min(min_slack, problem.radius_sq[g] - q);
        }
        rep.stages.push_back({t, log_loss(rep.weights, ws.M, ws.yb), min_slack, stage_steps});

        if (double(binding.size()) / t <= gap_target) {
            rep.status = solve_status::optimal;
            break;
        }
        t *= mu;
        if (outer == max_outer - 1) rep.status = solve_status::max_iter;
    }

    rep.epsilons = ((ws.M * rep.weights.coefficients).array() + rep.weights.intercept).matrix();
    rep.objective = log_loss(rep.weights, ws.M, ws.yb);
    double worst = 0.0;
    for (int g : binding) {
        double q = rep.weights.coefficients.dot(problem.groups[std::size_t(g)].covariance *
                                                rep.weights.coefficients);
        double slack = problem.radius_sq[g] - q;
        rep.multipliers[g] = 1.0 / (t * slack);
        worst = std::max(worst, q - problem.radius_sq[g]);
    }
    rep.max_constraint_violation = std::max(0.0, worst);
    kkt_residuals res = check_kkt(rep, problem);
    rep.kkt_stationarity = res.stationarity;
    if (!rep.weights.coefficients.allFinite() || !std::isfinite(rep.weights.intercept))
        rep.status = solve_status::numerical_failure;
    // an optimal report promises tight residuals; demote if a centering stalled short
    else if (rep.status == solve_status::optimal &&
             (res.stationarity > 1e-5 || res.feasibility > 1e-6 || res.complementarity > 1e-5))
        rep.status = solve_status::max_iter;
    return rep;
}

kkt_residuals check_kkt(const solver_report& report, const reduced_problem& problem) {
    const Eigen::Index d = problem.dim();
    const Eigen::Index G = Eigen::Index(problem.groups.size());
    reduced_workspace ws{problem.mean_matrix(), problem.mean_scores()};

    Eigen::VectorXd lagr = loss_gradient(report.weights, ws.M, ws.yb);
    kkt_residuals res;
    for (Eigen::Index g = 0; g < G; ++g) {
        const auto& grp = problem.groups[std::size_t(g)];
        double q = report.weights.coefficients.dot(grp.covariance * report.weights.coefficients);
        double cval = q - problem.radius_sq[g]; // <= 0 when feasible
        double lam = report.multipliers.size() == G ? report.multipliers[g] : 0.0;
        if (lam != 0.0) lagr.tail(d) += lam * 2.0 * (grp.covariance * report.weights.coefficients);
        if (std::isfinite(cval)) {
            res.feasibility = std::max(res.feasibility, cval);
            res.complementarity = std::max(res.complementarity, std::abs(lam * cval));
        }
    }
    res.feasibility = std::max(res.feasibility, 0.0);
    res.stationarity = lagr.lpNorm<Eigen::Infinity>();
    return res;
}

} // namespace slr

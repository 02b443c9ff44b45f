#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "slr/glm.hpp"
#include "slr/summarize.hpp"

namespace slr {

struct chance_config {
    double alpha = 1.0; // constraint half-width, >= 0
    double beta = 0.5;  // probability level, in (0,1)
};

// group-summary form: minimize J(w) = sum_g [softplus(e_g) - ybar_g * e_g],
// e_g = w0 + w_c . m_g, subject to w_c' V_g w_c <= r_g^2 (intercept unconstrained)
struct reduced_problem {
    std::vector<group_summary> groups;
    Eigen::VectorXd radius_sq; // one r^2 per group (shared r today, vector for generality)
    chance_config config;

    Eigen::Index dim() const { return groups.empty() ? 0 : groups.front().mean.size(); }
    // the reduced objective is exactly a logistic log-loss over (group means, mean scores)
    Eigen::MatrixXd mean_matrix() const;
    Eigen::VectorXd mean_scores() const;
};

// literal encoding with explicit per-group epsilon variables, used only to cross-check
// the reduction. Decision vector Z = [w_1..w_d, w_0, e_1..e_G] (dim d+1+G).
struct lifted_problem {
    Eigen::Index d = 0;
    Eigen::Index g_count = 0;
    std::vector<Eigen::MatrixXd> block_cov; // (d+1+G)^2, feature covariance in top-left dxd
    std::vector<Eigen::VectorXd> equality_coeffs; // P_g = [m_g, 1, 0..-1 at slot d+1+g..0]
    std::vector<double> mean_scores;
    chance_config config;

    Eigen::Index z_dim() const { return d + 1 + g_count; }
    double objective(const Eigen::VectorXd& z) const;
    // four constraint families evaluated at z, <= 0 feasible:
    //   per group: probit((1+beta)/2) - alpha/sqrt(z'Vz),
    //              -alpha/sqrt(z'Vz) - probit((1-beta)/2),
    //              +P_g'z, -P_g'z
    std::vector<double> constraint_values(const Eigen::VectorXd& z) const;
};

enum class solve_status { optimal, infeasible, max_iter, numerical_failure };

std::string to_string(solve_status s);

// one centering stage of the barrier path, kept for diagnostics and property tests
struct barrier_stage {
    double t = 0.0;
    double objective = 0.0; // true objective at the stage's final iterate
    double min_slack = 0.0;
    int newton_steps = 0;
};

struct solver_report {
    weight_vector weights;
    Eigen::VectorXd epsilons; // e_g = w0 + w_c . m_g
    Eigen::VectorXd multipliers; // barrier-path lambda_g = 1/(t * slack_g)
    double objective = 0.0;
    double max_constraint_violation = 0.0;
    double kkt_stationarity = 0.0;
    int barrier_outer_iters = 0;
    int newton_total_iters = 0;
    std::vector<barrier_stage> stages;
    solve_status status = solve_status::numerical_failure;
};

// inverse standard normal CDF, abs error <= 1e-9 on [1e-12, 1-1e-12]
double probit(double p);

// r = alpha / probit((1+beta)/2); +inf when the ratio overflows (vacuous constraint)
double constraint_radius(const chance_config& config);

reduced_problem assemble_reduced(const std::vector<group_summary>& groups,
                                 const chance_config& config);

lifted_problem assemble_lifted(const std::vector<group_summary>& groups,
                               const chance_config& config);

// log-barrier interior point with damped Newton centering. Sentinels: r^2 >= 1e18 or
// non-finite -> unconstrained Newton fit; r^2 <= 1e-20 -> closed form w_c = 0,
// w0 = logit(mean of group scores).
solver_report solve_slr(const reduced_problem& problem, double tol = 1e-8, int max_iter = 200);

struct kkt_residuals {
    double stationarity = 0.0;
    double complementarity = 0.0;
    double feasibility = 0.0;
};

kkt_residuals check_kkt(const solver_report& report, const reduced_problem& problem);

} // namespace slr

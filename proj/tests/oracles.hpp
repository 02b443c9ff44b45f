#pragma once

// Independent reference implementations used only by tests. Everything here is
// deliberately written the slow, obvious way and shares no code with src/.

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "slr/solver.hpp"

namespace oracle {

// standard normal CDF via erf; ~1e-16 relative accuracy
double phi(double x);

// inverse of phi by plain bisection on [-40, 40]
double probit_bisect(double p);

using scalar_field = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd fd_gradient(const scalar_field& f, const Eigen::VectorXd& x, double h = 1e-6);

Eigen::MatrixXd fd_hessian(const scalar_field& f, const Eigen::VectorXd& x, double h = 1e-4);

// smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations
double jacobi_min_eigenvalue(Eigen::MatrixXd A);

// ROC AUC by looping over every (positive, negative) pair; ties count half
double brute_roc_auc(const std::vector<int>& y, const std::vector<double>& s);

// PR AUC by recounting the confusion matrix from scratch at every distinct score
double brute_pr_auc(const std::vector<int>& y, const std::vector<double>& s);

// Nelder-Mead simplex minimizer (reflection/expansion/contraction/shrink)
Eigen::VectorXd nelder_mead(const scalar_field& f, const Eigen::VectorXd& x0, double scale,
                            int max_evals, double ftol = 1e-15);

struct penalty_solution {
    Eigen::VectorXd z;
    double objective = 0.0;
    double max_violation = 0.0;
};

// quadratic-penalty minimization of the full lifted encoding over z, driven by
// Nelder-Mead with an increasing penalty weight; the reference for the reduction
penalty_solution penalty_minimize(const slr::lifted_problem& prob);

// KKT residuals recomputed from scratch with finite differences (no solver code)
slr::kkt_residuals kkt_from_scratch(const slr::reduced_problem& prob,
                                    const slr::weight_vector& w,
                                    const Eigen::VectorXd& multipliers);

// reproducible random problem builders shared by the solver tests
std::vector<slr::group_summary> random_groups(std::mt19937_64& rng, int d, int g_count);

} // namespace oracle

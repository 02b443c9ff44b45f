#pragma once

#include <Eigen/Dense>

namespace slr {

struct weight_vector {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;

    static weight_vector zeros(Eigen::Index d) { return {0.0, Eigen::VectorXd::Zero(d)}; }
};

struct fit_report {
    weight_vector weights;
    double final_loss = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// numerically stable 1/(1+e^-t)
double sigmoid(double t);

// stable log(1+e^z)
double softplus(double z);

// -sum[y log s + (1-y) log(1-s)] via sum[softplus(z) - y z]; y may be fractional in [0,1]
double log_loss(const weight_vector& w, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// gradient wrt (intercept, coefficients), intercept entry first
Eigen::VectorXd loss_gradient(const weight_vector& w, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y);

// damped Newton with Armijo backtracking, ridge 1e-8 on the Hessian
fit_report fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        double tol = 1e-8, int max_iter = 100);

Eigen::VectorXd score(const weight_vector& w, const Eigen::MatrixXd& X);

} // namespace slr

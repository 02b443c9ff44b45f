#include "slr/glm.hpp"

#include <cmath>
#include <stdexcept>

#include "slr/errors.hpp"

namespace slr {

double sigmoid(double t) {
    if (t >= 0) {
        double e = std::exp(-t);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(t);
    return e / (1.0 + e);
}

double softplus(double z) {
    // log(1+e^z) without overflow on either side
    if (z > 0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

namespace {

Eigen::VectorXd linear_predictor(const weight_vector& w, const Eigen::MatrixXd& X) {
    if (X.cols() != w.coefficients.size())
        throw std::invalid_argument("weight/feature dimension mismatch: " +
                                    std::to_string(X.cols()) + " columns vs " +
                                    std::to_string(w.coefficients.size()) + " coefficients");
    return ((X * w.coefficients).array() + w.intercept).matrix();
}

} // namespace

double log_loss(const weight_vector& w, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (y.size() != X.rows()) throw std::invalid_argument("log_loss: row/label count mismatch");
    Eigen::VectorXd z = linear_predictor(w, X);
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z[i]) - y[i] * z[i];
    return total;
}

Eigen::VectorXd loss_gradient(const weight_vector& w, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y) {
    if (y.size() != X.rows())
        throw std::invalid_argument("loss_gradient: row/label count mismatch");
    Eigen::VectorXd z = linear_predictor(w, X);
    Eigen::VectorXd resid(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) resid[i] = sigmoid(z[i]) - y[i];
    Eigen::VectorXd g(X.cols() + 1);
    g[0] = resid.sum();
    g.tail(X.cols()) = X.transpose() * resid;
    return g;
}

fit_report fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol,
                        int max_iter) {
    const Eigen::Index d = X.cols();
    fit_report report;
    report.weights = weight_vector::zeros(d);

    double loss = log_loss(report.weights, X, y);
    constexpr double ridge = 1e-8;

    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd g = loss_gradient(report.weights, X, y);
        report.gradient_norm = g.lpNorm<Eigen::Infinity>();
        report.iterations = iter;
        if (report.gradient_norm <= tol) {
            report.converged = true;
            break;
        }

        Eigen::VectorXd z = linear_predictor(report.weights, X);
        Eigen::VectorXd s(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            double p = sigmoid(z[i]);
            s[i] = p * (1.0 - p);
        }
        // H = A' diag(s) A with A = [1 X], assembled blockwise
        Eigen::MatrixXd h(d + 1, d + 1);
        h(0, 0) = s.sum() + ridge;
        Eigen::VectorXd xs = X.transpose() * s;
        h.block(1, 0, d, 1) = xs;
        h.block(0, 1, 1, d) = xs.transpose();
        h.block(1, 1, d, d) = X.transpose() * s.asDiagonal() * X;
        h.block(1, 1, d, d).diagonal().array() += ridge;

        Eigen::VectorXd step = h.ldlt().solve(-g);
        if (!step.allFinite())
            throw solver_error("fit_logistic: non-finite Newton step at iteration " +
                               std::to_string(iter));

        // Armijo backtracking on the loss
        double t = 1.0;
        double slope = g.dot(step);
        weight_vector trial = report.weights;
        double new_loss = loss;
        while (t > 1e-14) {
            trial.intercept = report.weights.intercept + t * step[0];
            trial.coefficients = report.weights.coefficients + t * step.tail(d);
            new_loss = log_loss(trial, X, y);
            if (std::isfinite(new_loss) && new_loss <= loss + 1e-4 * t * slope) break;
            t *= 0.5;
        }
        if (t <= 1e-14) break; // no usable descent left, report whatever we have
        report.weights = trial;
        loss = new_loss;
        report.iterations = iter + 1;
        if (!std::isfinite(loss))
            throw solver_error("fit_logistic: non-finite loss at iteration " +
                               std::to_string(iter));
    }
    if (!report.converged) {
        Eigen::VectorXd g = loss_gradient(report.weights, X, y);
        report.gradient_norm = g.lpNorm<Eigen::Infinity>();
        report.converged = report.gradient_norm <= tol;
    }
    report.final_loss = loss;
    return report;
}

Eigen::VectorXd score(const weight_vector& w, const Eigen::MatrixXd& X) {
    Eigen::VectorXd z = linear_predictor(w, X);
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
    return z;
}

} // namespace slr

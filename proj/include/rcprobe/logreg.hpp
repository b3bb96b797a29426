#ifndef RCPROBE_LOGREG_HPP
#define RCPROBE_LOGREG_HPP

#include <Eigen/Core>

namespace rcprobe::probing {

struct LogRegOptions {
    double l2_strength = 1.0; // penalty on weights; bias unpenalized
    int max_iterations = 1000;
    double grad_tolerance = 1e-7;
};

struct LogRegResult {
    Eigen::VectorXd weights;
    double bias = 0.0;
    bool converged = false;
    int iterations = 0;
    double final_objective = 0.0;
};

// Binary L2-regularized logistic regression:
//   minimize sum_i log(1 + exp(-s_i (w.x_i + b))) + 0.5 * l2 * |w|^2
// with s_i = +-1. Deterministic (zero init, L-BFGS with backtracking).
// X is n x d, labels y in {0, 1} of length n.
LogRegResult fit_logistic_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                     const LogRegOptions& opts = {});

} // namespace rcprobe::probing

#endif

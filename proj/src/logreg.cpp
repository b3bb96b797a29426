#include "rcprobe/logreg.hpp"

#include <cmath>
#include <deque>

#include "rcprobe/error.hpp"

namespace rcprobe::probing {

namespace {

// log(1 + exp(-m)) without overflow.
inline double logistic_loss(double margin) {
    if (margin > 0) return std::log1p(std::exp(-margin));
    return -margin + std::log1p(std::exp(margin));
}

// sigmoid(-m) = 1 / (1 + exp(m))
inline double sigmoid_neg(double margin) {
    if (margin > 0) {
        double e = std::exp(-margin);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(margin));
}

struct Objective {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& s; // +-1 labels
    double l2;

    // theta = [w; b]; returns f(theta), fills grad.
    double eval(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
        Eigen::Index d = X.cols();
        Eigen::VectorXd w = theta.head(d);
        double b = theta[d];
        Eigen::VectorXd z = X * w;
        z.array() += b;

        double loss = 0.0;
        Eigen::VectorXd r(z.size()); // d loss / d z
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            double margin = s[i] * z[i];
            loss += logistic_loss(margin);
            r[i] = -s[i] * sigmoid_neg(margin);
        }
        loss += 0.5 * l2 * w.squaredNorm();

        grad.resize(d + 1);
        grad.head(d) = X.transpose() * r + l2 * w;
        grad[d] = r.sum();
        return loss;
    }
};

} // namespace

LogRegResult fit_logistic_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                     const LogRegOptions& opts) {
    if (X.rows() != y.size()) throw ValidationError("feature/label count mismatch");
    if (X.rows() == 0) throw ValidationError("cannot fit on an empty dataset");
    bool has_pos = false, has_neg = false;
    Eigen::VectorXd s(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        s[i] = y[i] > 0.5 ? 1.0 : -1.0;
        (s[i] > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw ValidationError("degenerate input: training labels contain a single class");
    }

    Objective obj{X, s, opts.l2_strength};
    Eigen::Index dim = X.cols() + 1;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd grad(dim);
    double f = obj.eval(theta, grad);

    // L-BFGS two-loop recursion with Armijo backtracking.
    const int history = 10;
    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    LogRegResult result;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        if (grad.norm() <= opts.grad_tolerance * std::max(1.0, theta.norm())) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            q *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Eigen::VectorXd direction = -q;
        double dir_deriv = grad.dot(direction);
        if (dir_deriv >= 0) { // not a descent direction; fall back to steepest descent
            direction = -grad;
            dir_deriv = -grad.squaredNorm();
        }

        double step = 1.0;
        Eigen::VectorXd theta_new;
        Eigen::VectorXd grad_new(dim);
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            theta_new = theta + step * direction;
            f_new = obj.eval(theta_new, grad_new);
            if (f_new <= f + 1e-4 * step * dir_deriv) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            result.converged = grad.norm() <= 1e-3 * std::max(1.0, theta.norm());
            break;
        }

        Eigen::VectorXd step_vec = theta_new - theta;
        Eigen::VectorXd grad_diff = grad_new - grad;
        double sy = step_vec.dot(grad_diff);
        if (sy > 1e-12) {
            s_hist.push_back(step_vec);
            y_hist.push_back(grad_diff);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta = std::move(theta_new);
        grad = std::move(grad_new);
        f = f_new;
    }

    result.weights = theta.head(X.cols());
    result.bias = theta[X.cols()];
    result.iterations = iter;
    result.final_objective = f;
    return result;
}

} // namespace rcprobe::probing

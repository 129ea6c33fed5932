#include "lsmds/stress.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lsmds/errors.hpp"

namespace lsmds {

namespace {

void require_square_symmetric(const Eigen::MatrixXd& M, const char* name, double tol = 0.0) {
    if (M.rows() != M.cols())
        throw validation_error(std::string(name) + " table must be square");
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = i; j < M.cols(); ++j) {
            double a = M(i, j), b = M(j, i);
            if (!std::isfinite(a))
                throw validation_error(std::string(name) + " has a non-finite entry");
            if (std::abs(a - b) > tol)
                throw validation_error(std::string(name) + " table is not symmetric at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
}

} // namespace

bool weight_graph_connected(const Eigen::MatrixXd& weights) {
    const Eigen::Index n = weights.rows();
    if (n == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack = {0};
    seen[0] = 1;
    Eigen::Index visited = 1;
    while (!stack.empty()) {
        Eigen::Index i = stack.back();
        stack.pop_back();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!seen[static_cast<std::size_t>(j)] && weights(i, j) > 0.0) {
                seen[static_cast<std::size_t>(j)] = 1;
                ++visited;
                stack.push_back(j);
            }
        }
    }
    return visited == n;
}

void validate_stress_problem(const StressProblem& prob) {
    require_square_symmetric(prob.dissimilarities, "dissimilarity");
    require_square_symmetric(prob.weights, "weight");
    if (prob.weights.rows() != prob.dissimilarities.rows())
        throw validation_error("dissimilarity and weight tables disagree in size");
    if (prob.dim < 1) throw validation_error("embedding dimension must be >= 1");
    const Eigen::Index n = prob.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (prob.dissimilarities(i, i) != 0.0 || prob.weights(i, i) != 0.0)
            throw validation_error("dissimilarity/weight diagonals must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (prob.dissimilarities(i, j) < 0.0)
                throw validation_error("dissimilarities must be nonnegative");
            if (prob.weights(i, j) < 0.0) throw validation_error("weights must be nonnegative");
        }
    }
    if (!weight_graph_connected(prob.weights))
        throw validation_error("weight graph is disconnected; the majorization update is ill-posed");
}

double stress_value(const Embedding& X, const StressProblem& prob) {
    const Eigen::Index n = prob.size();
    if (X.rows() != n)
        throw validation_error("embedding rows (" + std::to_string(X.rows()) +
                               ") do not match problem size (" + std::to_string(n) + ")");
    double sigma = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double w = prob.weights(i, j);
            if (w == 0.0) continue;
            double dist = (X.row(i) - X.row(j)).norm();
            double r = dist - prob.dissimilarities(i, j);
            sigma += w * r * r;
        }
    }
    return sigma;
}

Eigen::MatrixXd b_matrix(const Embedding& Z, const StressProblem& prob) {
    const Eigen::Index n = prob.size();
    if (Z.rows() != n) throw validation_error("embedding rows do not match problem size");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            double w = prob.weights(i, j);
            if (w == 0.0) continue;
            // Coincident points take the zero branch exactly.
            if ((Z.row(i).array() == Z.row(j).array()).all()) continue;
            double dist = (Z.row(i) - Z.row(j)).norm();
            double b = -w * prob.dissimilarities(i, j) / dist;
            B(i, j) = b;
            diag -= b;
        }
        B(i, i) = diag;
    }
    return B;
}

double majorizer_value(const Embedding& X, const Embedding& Z, const StressProblem& prob,
                       const Eigen::MatrixXd& V) {
    const Eigen::Index n = prob.size();
    if (X.rows() != n || Z.rows() != n || X.cols() != Z.cols())
        throw validation_error("majorizer shapes disagree");
    if (V.rows() != n || V.cols() != n)
        throw validation_error("V matrix size does not match the problem");
    Eigen::MatrixXd B = b_matrix(Z, prob);
    double quad = (X.transpose() * (V * X)).trace();
    double cross = (Z.transpose() * (B * X)).trace();
    return quad - 2.0 * cross + stress_constant(prob);
}

double stress_constant(const StressProblem& prob) {
    const Eigen::Index n = prob.size();
    double c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double d = prob.dissimilarities(i, j);
            c += prob.weights(i, j) * d * d;
        }
    return c;
}

Eigen::MatrixXd relative_weights(const Eigen::MatrixXd& dissimilarities) {
    const Eigen::Index n = dissimilarities.rows();
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            double d = dissimilarities(i, j);
            if (d <= 0.0)
                throw validation_error("relative weights need positive off-diagonal dissimilarities; "
                                       "d(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                                       std::to_string(d));
            W(i, j) = 1.0 / (d * d);
        }
    }
    return W;
}

StressProblem make_problem(const Eigen::MatrixXd& dissimilarities, WeightModel model, int dim) {
    StressProblem prob;
    prob.dissimilarities = dissimilarities;
    prob.dim = dim;
    const Eigen::Index n = dissimilarities.rows();
    if (model == WeightModel::Unit) {
        prob.weights = Eigen::MatrixXd::Ones(n, n);
        prob.weights.diagonal().setZero();
    } else {
        prob.weights = relative_weights(dissimilarities);
    }
    validate_stress_problem(prob);
    return prob;
}

} // namespace lsmds

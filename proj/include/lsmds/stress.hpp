#pragma once

#include <Eigen/Core>

namespace lsmds {

/// Embedding coordinates, one point per row (N x m).
using Embedding = Eigen::MatrixXd;

/// Weighted least-squares MDS instance: symmetric dissimilarities d_ij,
/// symmetric nonnegative weights w_ij (zero marks a missing pair) and the
/// target embedding dimension. The weight graph must be connected.
struct StressProblem {
    Eigen::MatrixXd dissimilarities; // N x N
    Eigen::MatrixXd weights;         // N x N
    int dim = 2;

    Eigen::Index size() const { return dissimilarities.rows(); }
};

enum class WeightModel { Unit, Relative };

/// Throws validation_error on shape/symmetry/diagonal violations or a
/// disconnected weight graph.
void validate_stress_problem(const StressProblem& prob);

/// True iff the graph of strictly positive weights is connected.
bool weight_graph_connected(const Eigen::MatrixXd& weights);

/// sigma(X) = sum_{i<j} w_ij (||x_i - x_j|| - d_ij)^2
double stress_value(const Embedding& X, const StressProblem& prob);

/// b_ij = -w_ij d_ij / ||z_i - z_j|| for distinct rows, 0 for coincident
/// ones (exact equality), with the diagonal set so rows sum to zero.
Eigen::MatrixXd b_matrix(const Embedding& Z, const StressProblem& prob);

/// Majorizer h(X, Z) = tr(X' V X) - 2 tr(Z' B(Z) X) + sum_{i<j} w_ij d_ij^2.
/// V is the weight-graph Laplacian (see laplace module), passed in because
/// callers reuse it across evaluations.
double majorizer_value(const Embedding& X, const Embedding& Z, const StressProblem& prob,
                       const Eigen::MatrixXd& V);

/// Relative-stress weights w_ij = d_ij^{-2}; requires positive off-diagonal d.
Eigen::MatrixXd relative_weights(const Eigen::MatrixXd& dissimilarities);

/// Assembles a StressProblem from a dissimilarity table and a weight model.
StressProblem make_problem(const Eigen::MatrixXd& dissimilarities, WeightModel model, int dim);

/// sum_{i<j} w_ij d_ij^2, the constant term of the stress expansion.
double stress_constant(const StressProblem& prob);

} // namespace lsmds

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <filesystem>
#include <optional>

#include "lsmds/mesh.hpp"

namespace lsmds {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Truncated generalized eigenbasis W phi = lambda A phi with lumped
/// (diagonal) mass A. Columns of `vectors` are A-orthonormal, eigenvalues
/// ascending, each column's first nonzero coordinate positive.
struct EigenBasis {
    Eigen::MatrixXd vectors;   // N x p
    Eigen::VectorXd values;    // p, ascending, nonnegative
    Eigen::VectorXd mass;      // N, diagonal of A
    int p = 0;
};

/// Cotangent stiffness and lumped barycentric mass of a triangle mesh.
/// Stiffness is PSD with zero row sums: off-diagonals -1/2 (cot a + cot b)
/// over the one or two triangles incident to the edge, diagonal the negated
/// off-diagonal row sum. Mass A_ii = 1/3 of the incident triangle area.
/// Throws solver_error naming the face on degenerate (zero-area) triangles.
void cotan_matrices(const TriangleMesh& mesh, SparseMatrix& stiffness, Eigen::VectorXd& mass);

/// Graph Laplacian of a symmetric weight table: v_ij = -w_ij off-diagonal,
/// v_ii the positive row sum. Dense variant for dense MDS weight tables.
Eigen::MatrixXd graph_laplacian(const Eigen::MatrixXd& weights);

/// Sparse variant for edge lists (retargeting grids).
SparseMatrix graph_laplacian_sparse(int n, const std::vector<Eigen::Triplet<double>>& edge_weights);

struct EigsOptions {
    double tol = 1e-8;          // relative residual |W phi - lambda A phi|
    int restart_factor = 10;    // iteration cap = restart_factor * p
    unsigned long long seed = 0x1b05eed5ULL;
};

/// Smallest-p eigenpairs of W phi = lambda A phi via shift-inverted block
/// subspace iteration with Rayleigh-Ritz extraction (dense fallback for
/// small problems). Deterministic for fixed inputs and seed.
EigenBasis eigenbasis(const SparseMatrix& stiffness, const Eigen::VectorXd& mass, int p,
                      const EigsOptions& opts = {});

/// Closed-form separable basis on a regular grid: sin in x (vanishing on the
/// left/right columns), cos in y (zero normal derivative on top/bottom),
/// eigenvalue (k pi / Lx)^2 + (l pi / Ly)^2, sorted ascending and normalized
/// against the tensor-product cell-area mass.
EigenBasis fourier_basis_grid(int rows, int cols, double length_x, double length_y, int p);

/// Flat binary cache of an EigenBasis: header (magic, N, p) then eigenvalues,
/// eigenvectors (column-major) and mass diagonal as little-endian doubles.
void save_basis(const EigenBasis& basis, const std::filesystem::path& path);
EigenBasis load_basis(const std::filesystem::path& path);

/// Content hash used to key cached bases: mesh bytes, p and solver options.
std::uint64_t basis_cache_key(const TriangleMesh& mesh, int p);

/// Loads the cached basis for (mesh, p) from cache_dir if present; computes
/// and stores it otherwise. `hit` reports which branch ran.
EigenBasis cached_eigenbasis(const TriangleMesh& mesh, int p,
                             const std::filesystem::path& cache_dir, bool* hit = nullptr,
                             const EigsOptions& opts = {});

} // namespace lsmds

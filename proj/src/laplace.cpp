#include "lsmds/laplace.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "lsmds/errors.hpp"
#include "lsmds/utils.hpp"

namespace lsmds {

void cotan_matrices(const TriangleMesh& mesh, SparseMatrix& stiffness, Eigen::VectorXd& mass) {
    const Eigen::Index n = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.num_faces()) * 12);
    mass = Eigen::VectorXd::Zero(n);

    for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
        const int v0 = mesh.faces(f, 0), v1 = mesh.faces(f, 1), v2 = mesh.faces(f, 2);
        // Edge lengths opposite each corner; area via Heron's formula.
        const double l0 = (mesh.vertices.row(v1) - mesh.vertices.row(v2)).norm();
        const double l1 = (mesh.vertices.row(v2) - mesh.vertices.row(v0)).norm();
        const double l2 = (mesh.vertices.row(v0) - mesh.vertices.row(v1)).norm();
        const double s = 0.5 * (l0 + l1 + l2);
        const double area2 = s * (s - l0) * (s - l1) * (s - l2);
        const double lmax = std::max({l0, l1, l2});
        if (!(area2 > 1e-28 * lmax * lmax * lmax * lmax))
            throw solver_error("degenerate triangle (zero area) at face " + std::to_string(f));
        const double area = std::sqrt(area2);

        // cot of the angle at corner k, opposite edge of length l_k.
        const double cot0 = (l1 * l1 + l2 * l2 - l0 * l0) / (4.0 * area);
        const double cot1 = (l2 * l2 + l0 * l0 - l1 * l1) / (4.0 * area);
        const double cot2 = (l0 * l0 + l1 * l1 - l2 * l2) / (4.0 * area);

        auto add_edge = [&](int a, int b, double cot) {
            const double w = 0.5 * cot;
            trips.emplace_back(a, b, -w);
            trips.emplace_back(b, a, -w);
            trips.emplace_back(a, a, w);
            trips.emplace_back(b, b, w);
        };
        add_edge(v1, v2, cot0);
        add_edge(v2, v0, cot1);
        add_edge(v0, v1, cot2);

        const double third = area / 3.0;
        mass[v0] += third;
        mass[v1] += third;
        mass[v2] += third;
    }

    stiffness.resize(n, n);
    stiffness.setFromTriplets(trips.begin(), trips.end());
    stiffness.makeCompressed();
}

Eigen::MatrixXd graph_laplacian(const Eigen::MatrixXd& weights) {
    const Eigen::Index n = weights.rows();
    if (weights.cols() != n) throw validation_error("weight table must be square");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (weights(i, j) != weights(j, i))
                throw validation_error("weight table is not symmetric at (" + std::to_string(i) +
                                       "," + std::to_string(j) + ")");
    Eigen::MatrixXd V = -weights;
    V.diagonal().setZero();
    for (Eigen::Index i = 0; i < n; ++i) V(i, i) = -V.row(i).sum();
    return V;
}

SparseMatrix graph_laplacian_sparse(int n, const std::vector<Eigen::Triplet<double>>& edge_weights) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edge_weights.size() * 4);
    for (const auto& e : edge_weights) {
        if (e.row() == e.col()) throw validation_error("edge weight on the diagonal");
        trips.emplace_back(e.row(), e.col(), -e.value());
        trips.emplace_back(e.col(), e.row(), -e.value());
        trips.emplace_back(e.row(), e.row(), e.value());
        trips.emplace_back(e.col(), e.col(), e.value());
    }
    SparseMatrix V(n, n);
    V.setFromTriplets(trips.begin(), trips.end());
    V.makeCompressed();
    return V;
}

namespace {

// Flips each column so its first coordinate above the noise floor is positive.
void fix_column_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        const double peak = vectors.col(c).cwiseAbs().maxCoeff();
        if (peak == 0.0) continue;
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            const double v = vectors(i, c);
            if (std::abs(v) > 1e-8 * peak) {
                if (v < 0.0) vectors.col(c) = -vectors.col(c);
                break;
            }
        }
    }
}

EigenBasis assemble_basis(const Eigen::MatrixXd& y, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& inv_sqrt_mass, const Eigen::VectorXd& mass, int p) {
    EigenBasis basis;
    basis.p = p;
    basis.values = theta.head(p).cwiseMax(0.0);
    basis.vectors = inv_sqrt_mass.asDiagonal() * y.leftCols(p);
    basis.mass = mass;
    fix_column_signs(basis.vectors);
    return basis;
}

} // namespace

EigenBasis eigenbasis(const SparseMatrix& stiffness, const Eigen::VectorXd& mass, int p,
                      const EigsOptions& opts) {
    const Eigen::Index n = stiffness.rows();
    if (stiffness.cols() != n) throw validation_error("stiffness matrix must be square");
    if (mass.size() != n) throw validation_error("mass diagonal size does not match stiffness");
    if ((mass.array() <= 0.0).any()) throw validation_error("mass diagonal must be positive");
    if (p < 1 || p >= n)
        throw validation_error("eigenbasis needs 1 <= p < N; got p=" + std::to_string(p) +
                               ", N=" + std::to_string(n));

    // Reduce W phi = lambda A phi to the symmetric problem C y = lambda y
    // with C = A^{-1/2} W A^{-1/2}, y = A^{1/2} phi.
    const Eigen::VectorXd inv_sqrt = mass.array().rsqrt();
    SparseMatrix C = inv_sqrt.asDiagonal() * stiffness * inv_sqrt.asDiagonal();
    C.makeCompressed();

    const int block = static_cast<int>(std::min<Eigen::Index>(n, 2 * p + 8));

    if (n <= 600 || block >= n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(C));
        if (es.info() != Eigen::Success) throw solver_error("dense eigensolver failed");
        return assemble_basis(es.eigenvectors(), es.eigenvalues(), inv_sqrt, mass, p);
    }

    // Shift-inverted subspace iteration: factor C + sigma I once, then
    // alternate inverse application with Rayleigh-Ritz extraction.
    const double scale = Eigen::VectorXd(C.diagonal()).cwiseAbs().maxCoeff();
    const double sigma = std::max(1e-6 * scale, 1e-300);
    SparseMatrix shifted = C;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += sigma;
    Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
    if (factor.info() != Eigen::Success)
        throw solver_error("factorization of the shifted operator failed");

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd Q(n, block);
    for (Eigen::Index j = 0; j < block; ++j)
        for (Eigen::Index i = 0; i < n; ++i) Q(i, j) = gauss(rng);

    const int max_rounds = std::max(32, opts.restart_factor * p);
    Eigen::VectorXd theta;
    for (int round = 0; round < max_rounds; ++round) {
        Eigen::MatrixXd Z = factor.solve(Q);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
        Eigen::MatrixXd Qo = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
        Eigen::MatrixXd CQ = C * Qo;
        Eigen::MatrixXd H = Qo.transpose() * CQ;
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        if (es.info() != Eigen::Success) throw solver_error("Rayleigh-Ritz eigensolver failed");
        theta = es.eigenvalues();
        Q = Qo * es.eigenvectors();

        Eigen::MatrixXd R = CQ * es.eigenvectors() - Q * theta.asDiagonal();
        bool converged = true;
        for (int i = 0; i < p; ++i) {
            if (R.col(i).norm() > opts.tol * std::max(theta[i], 1.0)) {
                converged = false;
                break;
            }
        }
        if (converged) return assemble_basis(Q, theta, inv_sqrt, mass, p);
    }
    throw solver_error("eigensolver did not converge within " + std::to_string(max_rounds) +
                       " iterations (p=" + std::to_string(p) + ")");
}

EigenBasis fourier_basis_grid(int rows, int cols, double length_x, double length_y, int p) {
    if (rows < 2 || cols < 2) throw validation_error("fourier basis needs rows, cols >= 2");
    if (!(length_x > 0) || !(length_y > 0)) throw validation_error("grid lengths must be positive");
    const long available = static_cast<long>(cols - 2) * rows;
    if (p < 1 || p > available)
        throw validation_error("p=" + std::to_string(p) + " exceeds available grid modes (" +
                               std::to_string(available) + ")");

    struct Mode {
        double value;
        int k, l;
    };
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(available));
    const double pi = std::acos(-1.0);
    for (int k = 1; k <= cols - 2; ++k) {
        for (int l = 0; l < rows; ++l) {
            const double kx = k * pi / length_x;
            const double ly = l * pi / length_y;
            modes.push_back({kx * kx + ly * ly, k, l});
        }
    }
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.k != b.k) return a.k < b.k;
        return a.l < b.l;
    });

    const Eigen::Index n = static_cast<Eigen::Index>(rows) * cols;
    const double hx = length_x / (cols - 1);
    const double hy = length_y / (rows - 1);

    EigenBasis basis;
    basis.p = p;
    basis.values.resize(p);
    basis.vectors.resize(n, p);
    basis.mass.resize(n);
    // Tensor-product cell-area mass with half weights on boundary rows and
    // columns; the sampled sin/cos modes are exactly orthogonal under it.
    for (int i = 0; i < rows; ++i) {
        const double wy = (i == 0 || i == rows - 1) ? 0.5 : 1.0;
        for (int j = 0; j < cols; ++j) {
            const double wx = (j == 0 || j == cols - 1) ? 0.5 : 1.0;
            basis.mass[static_cast<Eigen::Index>(i) * cols + j] = hx * hy * wx * wy;
        }
    }

    for (int c = 0; c < p; ++c) {
        const Mode& m = modes[static_cast<std::size_t>(c)];
        basis.values[c] = m.value;
        for (int i = 0; i < rows; ++i) {
            const double cy = std::cos(m.l * pi * i / (rows - 1));
            for (int j = 0; j < cols; ++j) {
                const double sx = std::sin(m.k * pi * j / (cols - 1));
                basis.vectors(static_cast<Eigen::Index>(i) * cols + j, c) = sx * cy;
            }
        }
        const double norm2 = basis.vectors.col(c).cwiseAbs2().dot(basis.mass);
        basis.vectors.col(c) /= std::sqrt(norm2);
    }
    fix_column_signs(basis.vectors);
    return basis;
}

namespace {
constexpr char kBasisMagic[8] = {'L', 'S', 'M', 'D', 'S', 'E', 'B', '1'};

void append_bytes(std::string& out, const void* data, std::size_t bytes) {
    out.append(static_cast<const char*>(data), bytes);
}
} // namespace

void save_basis(const EigenBasis& basis, const std::filesystem::path& path) {
    const std::uint64_t n = static_cast<std::uint64_t>(basis.vectors.rows());
    const std::uint64_t p = static_cast<std::uint64_t>(basis.p);
    std::string blob;
    blob.reserve(sizeof(kBasisMagic) + 16 + sizeof(double) * (p + n * p + n));
    append_bytes(blob, kBasisMagic, sizeof(kBasisMagic));
    append_bytes(blob, &n, sizeof(n));
    append_bytes(blob, &p, sizeof(p));
    append_bytes(blob, basis.values.data(), sizeof(double) * p);
    append_bytes(blob, basis.vectors.data(), sizeof(double) * n * p);
    append_bytes(blob, basis.mass.data(), sizeof(double) * n);
    write_file_atomic(path, blob);
}

EigenBasis load_basis(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open basis cache: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kBasisMagic, sizeof(magic)) != 0)
        throw validation_error(path.string() + ": not a basis cache file");
    std::uint64_t n = 0, p = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&p), sizeof(p));
    if (!in || n == 0 || p == 0 || p > n)
        throw validation_error(path.string() + ": corrupt basis header");
    EigenBasis basis;
    basis.p = static_cast<int>(p);
    basis.values.resize(static_cast<Eigen::Index>(p));
    basis.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    basis.mass.resize(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(basis.values.data()),
            static_cast<std::streamsize>(sizeof(double) * p));
    in.read(reinterpret_cast<char*>(basis.vectors.data()),
            static_cast<std::streamsize>(sizeof(double) * n * p));
    in.read(reinterpret_cast<char*>(basis.mass.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
    if (!in) throw validation_error(path.string() + ": truncated basis cache");
    return basis;
}

std::uint64_t basis_cache_key(const TriangleMesh& mesh, int p) {
    std::uint64_t h = fnv1a(mesh.vertices.data(),
                            sizeof(double) * static_cast<std::size_t>(mesh.vertices.size()));
    h = fnv1a(mesh.faces.data(), sizeof(int) * static_cast<std::size_t>(mesh.faces.size()), h);
    std::uint64_t pv = static_cast<std::uint64_t>(p);
    return fnv1a(&pv, sizeof(pv), h);
}

EigenBasis cached_eigenbasis(const TriangleMesh& mesh, int p,
                             const std::filesystem::path& cache_dir, bool* hit,
                             const EigsOptions& opts) {
    namespace fs = std::filesystem;
    std::ostringstream name;
    name << "basis_" << std::hex << basis_cache_key(mesh, p) << std::dec << "_p" << p << ".bin";
    const fs::path path = cache_dir / name.str();

    if (fs::exists(path)) {
        try {
            EigenBasis basis = load_basis(path);
            if (basis.vectors.rows() == mesh.num_vertices() && basis.p == p) {
                if (hit) *hit = true;
                return basis;
            }
        } catch (const std::exception&) {
            // fall through to recompute
        }
    }
    SparseMatrix stiffness;
    Eigen::VectorXd mass;
    cotan_matrices(mesh, stiffness, mass);
    EigenBasis basis = eigenbasis(stiffness, mass, p, opts);
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    save_basis(basis, path);
    if (hit) *hit = false;
    return basis;
}

} // namespace lsmds

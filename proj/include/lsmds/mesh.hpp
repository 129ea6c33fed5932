#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace lsmds {

enum class MeshFormat { OFF, OBJ };

/// Triangle mesh: the discretized manifold all other modules operate on.
/// Vertices are 3-d points (planar meshes carry z = 0); faces index into
/// the vertex list. boundary_flags are derived from face incidence.
struct TriangleMesh {
    Eigen::MatrixX3d vertices;       // N x 3
    Eigen::MatrixX3i faces;          // F x 3
    std::vector<bool> boundary_flags; // per vertex, true on boundary edges

    Eigen::Index num_vertices() const { return vertices.rows(); }
    Eigen::Index num_faces() const { return faces.rows(); }
};

/// Undirected vertex-pair edge with the number of incident faces.
struct MeshEdge {
    int a = 0, b = 0; // a < b
    int face_count = 0;
};

/// Checks index ranges, face degeneracy and edge/face incidence (at most two
/// faces per edge); fills mesh.boundary_flags. Throws validation_error.
void validate_mesh(TriangleMesh& mesh);

/// Unique undirected edges with incidence counts.
std::vector<MeshEdge> mesh_edges(const TriangleMesh& mesh);

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);

/// Infers OFF/OBJ from the file extension; throws on anything else.
MeshFormat mesh_format_from_path(const std::filesystem::path& path);

/// Regular planar lattice; vertex (i, j) sits at index i*cols + j with
/// position (j*spacing_x, i*spacing_y, 0). Each quad is split into two
/// triangles along the (i,j)-(i+1,j+1) diagonal.
TriangleMesh generate_grid_mesh(int rows, int cols, double spacing_x, double spacing_y);

/// Icosahedron subdivided `level` times, vertices projected to the unit
/// sphere. V(l) = 10*4^l + 2.
TriangleMesh generate_sphere_mesh(int subdivision_level);

/// Raster image with samples normalized to [0,1] (maxval 255 on disk).
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1; // 1 (PGM) or 3 (PPM)
    std::vector<double> samples; // row-major, interleaved channels

    double at(int row, int col, int ch = 0) const {
        return samples[static_cast<std::size_t>((row * width + col) * channels + ch)];
    }
    double& at(int row, int col, int ch = 0) {
        return samples[static_cast<std::size_t>((row * width + col) * channels + ch)];
    }
};

/// Plain-text PGM (P2) and PPM (P3) only; binary variants are rejected.
RasterImage load_image(const std::filesystem::path& path);
void save_image(const RasterImage& image, const std::filesystem::path& path);

} // namespace lsmds

#include "lsmds/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "lsmds/errors.hpp"
#include "lsmds/utils.hpp"

namespace lsmds {

namespace {

// Reads the next whitespace-separated token, skipping '#' comments.
bool next_token(std::istream& in, std::string& tok) {
    while (in >> tok) {
        if (tok[0] == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return true;
    }
    return false;
}

double parse_double(const std::string& tok, const char* what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw validation_error(std::string("expected a number for ") + what + ", got '" + tok + "'");
    }
    if (pos != tok.size())
        throw validation_error(std::string("trailing characters in ") + what + ": '" + tok + "'");
    return v;
}

long parse_long(const std::string& tok, const char* what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw validation_error(std::string("expected an integer for ") + what + ", got '" + tok + "'");
    }
    if (pos != tok.size())
        throw validation_error(std::string("trailing characters in ") + what + ": '" + tok + "'");
    return v;
}

TriangleMesh load_off(std::istream& in, const std::string& name) {
    std::string tok;
    if (!next_token(in, tok) || tok != "OFF")
        throw validation_error(name + ": missing OFF header");
    if (!next_token(in, tok)) throw validation_error(name + ": truncated OFF header");
    long nv = parse_long(tok, "vertex count");
    if (!next_token(in, tok)) throw validation_error(name + ": truncated OFF header");
    long nf = parse_long(tok, "face count");
    if (!next_token(in, tok)) throw validation_error(name + ": truncated OFF header");
    parse_long(tok, "edge count"); // present but unused

    if (nv < 0 || nf < 0) throw validation_error(name + ": negative counts in OFF header");

    TriangleMesh mesh;
    mesh.vertices.resize(nv, 3);
    for (long i = 0; i < nv; ++i) {
        for (int c = 0; c < 3; ++c) {
            if (!next_token(in, tok)) throw validation_error(name + ": truncated vertex list");
            mesh.vertices(i, c) = parse_double(tok, "vertex coordinate");
        }
    }
    mesh.faces.resize(nf, 3);
    for (long f = 0; f < nf; ++f) {
        if (!next_token(in, tok)) throw validation_error(name + ": truncated face list");
        long arity = parse_long(tok, "face arity");
        if (arity != 3)
            throw validation_error(name + ": face " + std::to_string(f) + " has arity " +
                                   std::to_string(arity) + "; only triangles are supported");
        for (int c = 0; c < 3; ++c) {
            if (!next_token(in, tok)) throw validation_error(name + ": truncated face list");
            long idx = parse_long(tok, "face index");
            if (idx < 0 || idx >= nv)
                throw validation_error(name + ": face index " + std::to_string(idx) +
                                       " out of range [0," + std::to_string(nv) + ")");
            mesh.faces(f, c) = static_cast<int>(idx);
        }
    }
    return mesh;
}

// Accepts 'v x y z' and 'f i j k' (1-based; 'i/t/n' references keep the
// leading vertex index). Everything else is ignored.
TriangleMesh load_obj(std::istream& in, const std::string& name) {
    std::vector<std::array<double, 3>> verts;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#') continue;
        if (kind == "v") {
            std::array<double, 3> v{};
            for (int c = 0; c < 3; ++c) {
                std::string tok;
                if (!(ls >> tok))
                    throw validation_error(name + ":" + std::to_string(lineno) + ": short vertex line");
                v[static_cast<std::size_t>(c)] = parse_double(tok, "vertex coordinate");
            }
            verts.push_back(v);
        } else if (kind == "f") {
            std::vector<long> idx;
            std::string tok;
            while (ls >> tok) {
                std::string head = tok.substr(0, tok.find('/'));
                long i = parse_long(head, "face index");
                if (i <= 0)
                    throw validation_error(name + ":" + std::to_string(lineno) +
                                           ": OBJ face indices are 1-based, got " + std::to_string(i));
                idx.push_back(i - 1);
            }
            if (idx.size() != 3)
                throw validation_error(name + ":" + std::to_string(lineno) +
                                       ": only triangular faces are supported");
            faces.push_back({static_cast<int>(idx[0]), static_cast<int>(idx[1]),
                             static_cast<int>(idx[2])});
        }
    }
    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (int c = 0; c < 3; ++c)
            mesh.vertices(static_cast<Eigen::Index>(i), c) = verts[i][static_cast<std::size_t>(c)];
    mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            int idx = faces[f][static_cast<std::size_t>(c)];
            if (idx >= mesh.vertices.rows())
                throw validation_error(name + ": face index " + std::to_string(idx + 1) +
                                       " exceeds vertex count " + std::to_string(mesh.vertices.rows()));
            mesh.faces(static_cast<Eigen::Index>(f), c) = idx;
        }
    }
    return mesh;
}

} // namespace

std::vector<MeshEdge> mesh_edges(const TriangleMesh& mesh) {
    std::map<std::pair<int, int>, int> counts;
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        for (int c = 0; c < 3; ++c) {
            int a = mesh.faces(f, c);
            int b = mesh.faces(f, (c + 1) % 3);
            if (a > b) std::swap(a, b);
            ++counts[{a, b}];
        }
    }
    std::vector<MeshEdge> edges;
    edges.reserve(counts.size());
    for (const auto& [key, n] : counts) edges.push_back({key.first, key.second, n});
    return edges;
}

void validate_mesh(TriangleMesh& mesh) {
    const Eigen::Index n = mesh.num_vertices();
    if (!mesh.vertices.allFinite())
        throw validation_error("mesh has non-finite vertex coordinates");
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
        for (int idx : {a, b, c})
            if (idx < 0 || idx >= n)
                throw validation_error("face " + std::to_string(f) + " has index " +
                                       std::to_string(idx) + " out of range [0," +
                                       std::to_string(n) + ")");
        if (a == b || b == c || a == c)
            throw validation_error("face " + std::to_string(f) + " is degenerate (repeated index)");
    }
    mesh.boundary_flags.assign(static_cast<std::size_t>(n), false);
    for (const MeshEdge& e : mesh_edges(mesh)) {
        if (e.face_count > 2)
            throw validation_error("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                   ") has " + std::to_string(e.face_count) + " incident faces");
        if (e.face_count == 1) {
            mesh.boundary_flags[static_cast<std::size_t>(e.a)] = true;
            mesh.boundary_flags[static_cast<std::size_t>(e.b)] = true;
        }
    }
}

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") return MeshFormat::OFF;
    if (ext == ".obj") return MeshFormat::OBJ;
    throw validation_error("cannot infer mesh format from '" + path.string() + "' (use .off or .obj)");
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open mesh file: " + path.string());
    TriangleMesh mesh = format == MeshFormat::OFF ? load_off(in, path.string())
                                                  : load_obj(in, path.string());
    validate_mesh(mesh);
    return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
    if (mesh.num_vertices() == 0)
        throw validation_error("refusing to write an empty mesh: " + path.string());
    std::ostringstream out;
    if (format == MeshFormat::OFF) {
        out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
        for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
            out << format_double(mesh.vertices(i, 0)) << ' ' << format_double(mesh.vertices(i, 1))
                << ' ' << format_double(mesh.vertices(i, 2)) << '\n';
        for (Eigen::Index f = 0; f < mesh.num_faces(); ++f)
            out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' ' << mesh.faces(f, 2)
                << '\n';
    } else {
        for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
            out << "v " << format_double(mesh.vertices(i, 0)) << ' '
                << format_double(mesh.vertices(i, 1)) << ' ' << format_double(mesh.vertices(i, 2))
                << '\n';
        for (Eigen::Index f = 0; f < mesh.num_faces(); ++f)
            out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' '
                << mesh.faces(f, 2) + 1 << '\n';
    }
    write_file_atomic(path, out.str());
}

TriangleMesh generate_grid_mesh(int rows, int cols, double spacing_x, double spacing_y) {
    if (rows < 2 || cols < 2)
        throw validation_error("grid mesh needs rows, cols >= 2; got " + std::to_string(rows) +
                               "x" + std::to_string(cols));
    if (!(spacing_x > 0) || !(spacing_y > 0))
        throw validation_error("grid spacing must be positive");
    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(rows) * cols, 3);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            Eigen::Index v = static_cast<Eigen::Index>(i) * cols + j;
            mesh.vertices.row(v) << j * spacing_x, i * spacing_y, 0.0;
        }
    }
    mesh.faces.resize(static_cast<Eigen::Index>(rows - 1) * (cols - 1) * 2, 3);
    Eigen::Index f = 0;
    for (int i = 0; i + 1 < rows; ++i) {
        for (int j = 0; j + 1 < cols; ++j) {
            int v00 = i * cols + j;
            int v01 = i * cols + j + 1;
            int v10 = (i + 1) * cols + j;
            int v11 = (i + 1) * cols + j + 1;
            mesh.faces.row(f++) << v00, v01, v11;
            mesh.faces.row(f++) << v00, v11, v10;
        }
    }
    validate_mesh(mesh);
    return mesh;
}

TriangleMesh generate_sphere_mesh(int subdivision_level) {
    if (subdivision_level < 0) throw validation_error("subdivision level must be >= 0");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> verts = {
        {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    auto normalize = [](std::array<double, 3>& v) {
        double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        v = {v[0] / n, v[1] / n, v[2] / n};
    };
    for (auto& v : verts) normalize(v);

    for (int level = 0; level < subdivision_level; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const auto& va = verts[static_cast<std::size_t>(a)];
            const auto& vb = verts[static_cast<std::size_t>(b)];
            std::array<double, 3> m = {(va[0] + vb[0]) / 2, (va[1] + vb[1]) / 2, (va[2] + vb[2]) / 2};
            normalize(m);
            int idx = static_cast<int>(verts.size());
            verts.push_back(m);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (int c = 0; c < 3; ++c)
            mesh.vertices(static_cast<Eigen::Index>(i), c) = verts[i][static_cast<std::size_t>(c)];
    mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int c = 0; c < 3; ++c)
            mesh.faces(static_cast<Eigen::Index>(f), c) = faces[f][static_cast<std::size_t>(c)];
    validate_mesh(mesh);
    return mesh;
}

RasterImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open image file: " + path.string());
    std::string magic;
    if (!(in >> magic)) throw validation_error(path.string() + ": empty image file");
    int channels = 0;
    if (magic == "P2") channels = 1;
    else if (magic == "P3") channels = 3;
    else if (magic == "P5" || magic == "P6")
        throw validation_error(path.string() + ": binary PGM/PPM not accepted; use plain P2/P3");
    else
        throw validation_error(path.string() + ": unknown image magic '" + magic + "'");

    std::string tok;
    if (!next_token(in, tok)) throw validation_error(path.string() + ": truncated image header");
    long w = parse_long(tok, "image width");
    if (!next_token(in, tok)) throw validation_error(path.string() + ": truncated image header");
    long h = parse_long(tok, "image height");
    if (!next_token(in, tok)) throw validation_error(path.string() + ": truncated image header");
    long maxval = parse_long(tok, "image maxval");
    if (w <= 0 || h <= 0) throw validation_error(path.string() + ": non-positive image dimensions");
    if (maxval != 255)
        throw validation_error(path.string() + ": maxval must be 255, got " + std::to_string(maxval));

    RasterImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = channels;
    std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                        static_cast<std::size_t>(channels);
    img.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!next_token(in, tok)) throw validation_error(path.string() + ": truncated sample data");
        long v = parse_long(tok, "sample value");
        if (v < 0 || v > 255)
            throw validation_error(path.string() + ": sample " + std::to_string(v) +
                                   " outside [0,255]");
        img.samples[i] = static_cast<double>(v) / 255.0;
    }
    return img;
}

void save_image(const RasterImage& image, const std::filesystem::path& path) {
    if (image.width <= 0 || image.height <= 0)
        throw validation_error("refusing to write an empty image: " + path.string());
    if (image.channels != 1 && image.channels != 3)
        throw validation_error("image must have 1 or 3 channels");
    if (image.samples.size() != static_cast<std::size_t>(image.width) * image.height * image.channels)
        throw validation_error("image sample count does not match dimensions");
    std::ostringstream out;
    out << (image.channels == 1 ? "P2" : "P3") << '\n'
        << image.width << ' ' << image.height << '\n'
        << "255\n";
    std::size_t per_row = static_cast<std::size_t>(image.width) * image.channels;
    for (int r = 0; r < image.height; ++r) {
        for (std::size_t c = 0; c < per_row; ++c) {
            double v = image.samples[static_cast<std::size_t>(r) * per_row + c];
            int q = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
            out << q << (c + 1 == per_row ? '\n' : ' ');
        }
    }
    write_file_atomic(path, out.str());
}

} // namespace lsmds

#include "gaugelab/mesh.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "gaugelab/error.hpp"

namespace gaugelab {

namespace {

Vec wrap_delta(const Manifold& m, Vec d) {
    if (m.kind() == ManifoldKind::FlatTorus2)
        for (int i = 0; i < 2; ++i) d(i) -= m.period(i) * std::round(d(i) / m.period(i));
    return d;
}

Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

}  // namespace

Vec SimplicialComplex::edge_vector(int e) const {
    const auto& ed = edges[e];
    return wrap_delta(surface, vertices[ed[1]] - vertices[ed[0]]);
}

void icosphere_raw(int level, std::vector<Vec>& verts, std::vector<std::array<int, 3>>& faces) {
    if (level < 0) throw Error(ErrorKind::PreconditionViolated, "icosphere level >= 0");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    verts = {v3(-1, t, 0), v3(1, t, 0), v3(-1, -t, 0), v3(1, -t, 0), v3(0, -1, t), v3(0, 1, t),
             v3(0, -1, -t), v3(0, 1, -t), v3(t, 0, -1), v3(t, 0, 1), v3(-t, 0, -1), v3(-t, 0, 1)};
    for (auto& v : verts) v.normalize();
    faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
             {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const int id = static_cast<int>(verts.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    for (auto& f : faces) {
        const Eigen::Vector3d a = verts[f[0]], b = verts[f[1]], c = verts[f[2]];
        if ((b - a).cross(c - a).dot(a + b + c) < 0) std::swap(f[1], f[2]);
    }
}

SimplicialComplex make_complex(const Manifold& m, std::vector<Vec> vertices, std::vector<std::array<int, 3>> faces,
                               std::vector<std::array<Vec, 3>> corners) {
    SimplicialComplex k;
    k.surface = m;
    k.vertices = std::move(vertices);
    k.faces = std::move(faces);
    const int nv = static_cast<int>(k.vertices.size());
    std::map<std::pair<int, int>, int> index;
    for (const auto& f : k.faces) {
        std::array<int, 3> fe{}, fs{};
        for (int i = 0; i < 3; ++i) {
            const int a = f[i], b = f[(i + 1) % 3];
            if (a < 0 || b < 0 || a >= nv || b >= nv || a == b)
                throw Error(ErrorKind::InvalidComplex, "face references invalid vertex");
            const auto key = std::minmax(a, b);
            auto it = index.find(key);
            int e;
            if (it == index.end()) {
                e = static_cast<int>(k.edges.size());
                k.edges.push_back({key.first, key.second});
                index.emplace(key, e);
            } else {
                e = it->second;
            }
            fe[i] = e;
            fs[i] = a < b ? 1 : -1;
        }
        k.face_edges.push_back(fe);
        k.face_edge_signs.push_back(fs);
    }
    if (corners.empty()) {
        for (const auto& f : k.faces) {
            const Vec& a = k.vertices[f[0]];
            corners.push_back({a, a + wrap_delta(m, k.vertices[f[1]] - a), a + wrap_delta(m, k.vertices[f[2]] - a)});
        }
    }
    k.face_corners = std::move(corners);
    return k;
}

void validate_complex(const SimplicialComplex& k) {
    std::vector<int> count(k.edges.size(), 0), sum(k.edges.size(), 0);
    for (std::size_t f = 0; f < k.faces.size(); ++f)
        for (int i = 0; i < 3; ++i) {
            ++count[k.face_edges[f][i]];
            sum[k.face_edges[f][i]] += k.face_edge_signs[f][i];
        }
    for (std::size_t e = 0; e < k.edges.size(); ++e) {
        if (count[e] != 2) throw Error(ErrorKind::NonClosedSurface, "edge without exactly two faces");
        if (sum[e] != 0) throw Error(ErrorKind::InvalidComplex, "inconsistent face orientation");
    }
}

SimplicialComplex triangulate(const Manifold& m, int level) {
    if (level < 0) throw Error(ErrorKind::PreconditionViolated, "triangulation level >= 0");
    if (m.kind() == ManifoldKind::RoundSphere2) {
        std::vector<Vec> verts;
        std::vector<std::array<int, 3>> faces;
        icosphere_raw(level, verts, faces);
        for (auto& v : verts) v *= m.scale();
        auto k = make_complex(m, std::move(verts), std::move(faces));
        k.level = level;
        return k;
    }
    if (m.kind() == ManifoldKind::FlatTorus2) {
        const int n = 3 * (1 << level);
        const double h1 = m.period(0) / n, h2 = m.period(1) / n;
        std::vector<Vec> verts;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec p(2);
                p << i * h1, j * h2;
                verts.push_back(p);
            }
        auto id = [n](int i, int j) { return (i % n) * n + (j % n); };
        auto lift = [h1, h2](int i, int j) {
            Vec p(2);
            p << i * h1, j * h2;
            return p;
        };
        std::vector<std::array<int, 3>> faces;
        std::vector<std::array<Vec, 3>> corners;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                corners.push_back({lift(i, j), lift(i + 1, j), lift(i + 1, j + 1)});
                faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
                corners.push_back({lift(i, j), lift(i + 1, j + 1), lift(i, j + 1)});
            }
        auto k = make_complex(m, std::move(verts), std::move(faces), std::move(corners));
        k.level = level;
        return k;
    }
    throw Error(ErrorKind::UnsupportedGeometry, "triangulations exist for the sphere and the torus only");
}

void write_off(std::ostream& os, const SimplicialComplex& k) {
    os << "OFF\n" << k.vertices.size() << ' ' << k.faces.size() << " 0\n";
    os.precision(17);
    for (const auto& v : k.vertices) {
        for (int i = 0; i < 3; ++i) os << (i ? " " : "") << (i < v.size() ? v(i) : 0.0);
        os << '\n';
    }
    for (const auto& f : k.faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

SimplicialComplex read_off(std::istream& is, const Manifold& m) {
    std::string head;
    if (!(is >> head) || head != "OFF") throw Error(ErrorKind::InvalidComplex, "missing OFF header");
    long nv = 0, nf = 0, ne = 0;
    if (!(is >> nv >> nf >> ne) || nv < 0 || nf < 0) throw Error(ErrorKind::InvalidComplex, "bad OFF counts");
    const int d = m.ambient_dim();
    std::vector<Vec> verts;
    for (long i = 0; i < nv; ++i) {
        double x, y, z;
        if (!(is >> x >> y >> z)) throw Error(ErrorKind::InvalidComplex, "truncated vertex list");
        Vec p(d);
        const double c[3] = {x, y, z};
        for (int j = 0; j < d && j < 3; ++j) p(j) = c[j];
        verts.push_back(p);
    }
    std::vector<std::array<int, 3>> faces;
    for (long i = 0; i < nf; ++i) {
        int n, a, b, c;
        if (!(is >> n)) throw Error(ErrorKind::InvalidComplex, "truncated face list");
        if (n != 3) throw Error(ErrorKind::InvalidComplex, "only triangles are supported");
        if (!(is >> a >> b >> c)) throw Error(ErrorKind::InvalidComplex, "truncated face list");
        faces.push_back({a, b, c});
    }
    auto k = make_complex(m, std::move(verts), std::move(faces));
    validate_complex(k);
    return k;
}

}  // namespace gaugelab

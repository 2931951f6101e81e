// Copyright 2026 The monge-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "monge/error.hpp"
#include "monge/numerics.hpp"

namespace monge {

/// Quad mesh over an nu x nv vertex grid. Seams are glued by index, so a
/// closed surface has no duplicated rows; `identification` records how.
struct QuadMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::size_t, 4>> quads;
    std::size_t nu = 0;
    std::size_t nv = 0;
    std::string identification;
    /// Largest distance between a seam vertex and its glued partner.
    double seam_residual = 0.0;
    /// Vertices where the surface is singular (kept with --allow-singular).
    std::vector<std::size_t> singular_vertices;
};

/// General polygon mesh, as read from an OBJ file.
struct PolyMesh {
    std::vector<Vec3> vertices;
    std::vector<std::vector<std::size_t>> faces;
};

inline PolyMesh to_poly(const QuadMesh& m) {
    PolyMesh p;
    p.vertices = m.vertices;
    p.faces.reserve(m.quads.size());
    for (const auto& q : m.quads) p.faces.emplace_back(q.begin(), q.end());
    return p;
}

struct MeshCheck {
    std::size_t vertices = 0;
    std::size_t faces = 0;
    std::size_t edges = 0;
    std::size_t boundary_edges = 0;
    std::size_t nonmanifold_edges = 0;
    std::size_t degenerate_faces = 0;
    /// Every edge is shared by exactly two faces.
    bool watertight = false;
    /// Some choice of face windings makes every shared edge run opposite ways.
    bool orientable = false;
    /// The windings as stored already do.
    bool consistently_oriented = false;
    long euler_characteristic = 0;
};

inline MeshCheck check_mesh(const PolyMesh& m) {
    MeshCheck r;
    r.vertices = m.vertices.size();
    r.faces = m.faces.size();
    // edge (lo, hi) -> list of (face, +1 if the face runs lo -> hi)
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, int>>> edges;
    std::vector<char> used(m.vertices.size(), 0);
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        const auto& face = m.faces[f];
        bool degenerate = face.size() < 3;
        for (std::size_t k = 0; k < face.size(); ++k) {
            const std::size_t a = face[k];
            const std::size_t b = face[(k + 1) % face.size()];
            if (a >= m.vertices.size() || b >= m.vertices.size())
                throw InvalidInput("face " + std::to_string(f) + " references a missing vertex");
            used[a] = 1;
            if (a == b) {
                degenerate = true;
                continue;
            }
            edges[{std::min(a, b), std::max(a, b)}].emplace_back(f, a < b ? 1 : -1);
        }
        if (degenerate) ++r.degenerate_faces;
    }
    r.edges = edges.size();
    std::vector<std::vector<std::pair<std::size_t, int>>> adj(m.faces.size());  // (face, same direction?)
    r.consistently_oriented = true;
    for (const auto& [e, uses] : edges) {
        if (uses.size() == 1) ++r.boundary_edges;
        if (uses.size() > 2) ++r.nonmanifold_edges;
        if (uses.size() != 2) continue;
        const bool same = uses[0].second == uses[1].second;
        if (same) r.consistently_oriented = false;
        adj[uses[0].first].emplace_back(uses[1].first, same ? 1 : 0);
        adj[uses[1].first].emplace_back(uses[0].first, same ? 1 : 0);
    }
    r.watertight = r.boundary_edges == 0 && r.nonmanifold_edges == 0 && r.degenerate_faces == 0 && r.faces > 0;
    // Two-colouring of flips: neighbours sharing an edge the same way need
    // opposite flips.
    std::vector<int> flip(m.faces.size(), -1);
    r.orientable = r.nonmanifold_edges == 0;
    for (std::size_t s = 0; s < m.faces.size() && r.orientable; ++s) {
        if (flip[s] >= 0) continue;
        flip[s] = 0;
        std::vector<std::size_t> stack{s};
        while (!stack.empty() && r.orientable) {
            const std::size_t f = stack.back();
            stack.pop_back();
            for (const auto& [g, same] : adj[f]) {
                const int want = flip[f] ^ same;
                if (flip[g] < 0) {
                    flip[g] = want;
                    stack.push_back(g);
                } else if (flip[g] != want) {
                    r.orientable = false;
                    break;
                }
            }
        }
    }
    if (!r.orientable) r.consistently_oriented = false;
    std::size_t nused = 0;
    for (char u : used) nused += u;
    r.euler_characteristic = static_cast<long>(nused) - static_cast<long>(r.edges) + static_cast<long>(r.faces);
    return r;
}

inline MeshCheck check_mesh(const QuadMesh& m) { return check_mesh(to_poly(m)); }

/// Wavefront OBJ with 1-based quad faces; `header` lines become comments.
inline void write_obj(std::ostream& os, const QuadMesh& m, const std::vector<std::string>& header = {}) {
    for (const auto& h : header) os << "# " << h << '\n';
    char buf[96];
    for (const Vec3& v : m.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        os << buf;
    }
    for (const auto& q : m.quads) os << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

/// Reads `v` and `f` records (f accepts a, a/b, a/b/c and negative indices).
inline PolyMesh read_obj(std::istream& is) {
    PolyMesh m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) throw InvalidInput("bad vertex on OBJ line " + std::to_string(lineno));
            m.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::size_t> face;
            std::string tok;
            while (ls >> tok) {
                long idx = 0;
                try {
                    idx = std::stol(tok.substr(0, tok.find('/')));
                } catch (const std::exception&) {
                    throw InvalidInput("bad face index on OBJ line " + std::to_string(lineno));
                }
                const long nv = static_cast<long>(m.vertices.size());
                const long zero = idx > 0 ? idx - 1 : nv + idx;
                if (idx == 0 || zero < 0) throw InvalidInput("face index out of range on OBJ line " + std::to_string(lineno));
                face.push_back(static_cast<std::size_t>(zero));
            }
            if (face.size() < 3) throw InvalidInput("face with fewer than 3 vertices on OBJ line " + std::to_string(lineno));
            m.faces.push_back(std::move(face));
        }
    }
    for (std::size_t f = 0; f < m.faces.size(); ++f)
        for (std::size_t v : m.faces[f])
            if (v >= m.vertices.size()) throw InvalidInput("face " + std::to_string(f) + " references a missing vertex");
    return m;
}

}  // namespace monge

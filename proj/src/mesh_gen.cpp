#include "mixedfem/mesh_gen.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mixedfem {

SimMesh box_tet_mesh(int nx, int ny, int nz, double sx, double sy, double sz) {
  std::vector<Vec3> pos;
  auto vid = [&](int i, int j, int k) {
    return (i * (ny + 1) + j) * (nz + 1) + k;
  };
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k <= nz; ++k)
        pos.emplace_back(sx * i / nx, sy * j / ny, sz * k / nz);

  // six-tet split of each cell
  static const int tets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                                 {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};
  std::vector<std::array<int, 4>> elems;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        int c[8] = {vid(i, j, k),         vid(i, j, k + 1),
                    vid(i, j + 1, k),     vid(i, j + 1, k + 1),
                    vid(i + 1, j, k),     vid(i + 1, j, k + 1),
                    vid(i + 1, j + 1, k), vid(i + 1, j + 1, k + 1)};
        for (auto& t : tets)
          elems.push_back({c[t[0]], c[t[1]], c[t[2]], c[t[3]]});
      }
  return build_mesh(std::move(pos), std::move(elems), ElementKind::Tet);
}

SimMesh grid_tri_mesh(int nx, int nz, double sx, double sz, double thickness) {
  std::vector<Vec3> pos;
  auto vid = [&](int i, int k) { return i * (nz + 1) + k; };
  for (int i = 0; i <= nx; ++i)
    for (int k = 0; k <= nz; ++k)
      pos.emplace_back(sx * i / nx, 0.0, sz * k / nz);
  std::vector<std::array<int, 4>> elems;
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < nz; ++k) {
      int a = vid(i, k), b = vid(i + 1, k), c = vid(i + 1, k + 1), d = vid(i, k + 1);
      elems.push_back({a, b, c, -1});
      elems.push_back({a, c, d, -1});
    }
  return build_mesh(std::move(pos), std::move(elems), ElementKind::Tri, thickness);
}

SimMesh chain_rod_mesh(int segments, double length, double cross_section) {
  std::vector<Vec3> pos;
  for (int i = 0; i <= segments; ++i)
    pos.emplace_back(length * i / segments, 0.0, 0.0);
  std::vector<std::array<int, 4>> elems;
  for (int i = 0; i < segments; ++i) elems.push_back({i, i + 1, -1, -1});
  return build_mesh(std::move(pos), std::move(elems), ElementKind::Rod, 1e-3,
                    cross_section);
}

SimMesh surface_of_tets(const SimMesh& tets, double thickness) {
  std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> faces;
  const int opp[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& e : tets.elements) {
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> tri = {e[opp[f][0]], e[opp[f][1]], e[opp[f][2]]};
      std::array<int, 3> key = tri;
      std::sort(key.begin(), key.end());
      auto it = faces.find(key);
      if (it == faces.end())
        faces[key] = {tri, e[f]};
      else
        faces.erase(it);
    }
  }
  std::vector<std::array<int, 4>> elems;
  for (const auto& [key, val] : faces) {
    auto [tri, d] = val;
    const Vec3& a = tets.rest_positions[tri[0]];
    Vec3 n = (tets.rest_positions[tri[1]] - a).cross(tets.rest_positions[tri[2]] - a);
    if (n.dot(tets.rest_positions[d] - a) > 0) std::swap(tri[1], tri[2]);
    elems.push_back({tri[0], tri[1], tri[2], -1});
  }
  // drop interior vertices not referenced by any boundary face; a vertex with
  // no incident element would carry zero lumped mass
  std::vector<int> remap(tets.rest_positions.size(), -1);
  std::vector<Vec3> verts;
  for (auto& e : elems)
    for (int i = 0; i < 3; ++i) {
      if (remap[e[i]] < 0) {
        remap[e[i]] = static_cast<int>(verts.size());
        verts.push_back(tets.rest_positions[e[i]]);
      }
      e[i] = remap[e[i]];
    }
  return build_mesh(std::move(verts), std::move(elems), ElementKind::Tri,
                    thickness);
}

SimMesh edges_of_tets(const SimMesh& tets, double cross_section) {
  std::set<std::pair<int, int>> edges;
  for (const auto& e : tets.elements)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        edges.insert({std::min(e[a], e[b]), std::max(e[a], e[b])});
  std::vector<std::array<int, 4>> elems;
  for (auto [a, b] : edges) elems.push_back({a, b, -1, -1});
  return build_mesh(tets.rest_positions, std::move(elems), ElementKind::Rod,
                    1e-3, cross_section);
}

}  // namespace mixedfem

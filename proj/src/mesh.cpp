#include "mixedfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mixedfem {

int verts_per_element(ElementKind kind) {
  switch (kind) {
    case ElementKind::Tet: return 4;
    case ElementKind::Tri: return 3;
    case ElementKind::Rod: return 2;
  }
  return 0;
}

VecX SimMesh::rest_vector() const {
  VecX q(3 * num_vertices());
  for (int v = 0; v < num_vertices(); ++v) q.segment<3>(3 * v) = rest_positions[v];
  return q;
}

double SimMesh::bbox_diagonal() const {
  if (rest_positions.empty()) return 0.0;
  Vec3 lo = rest_positions[0], hi = rest_positions[0];
  for (const Vec3& p : rest_positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

MatX SimMesh::element_positions(const VecX& q, int e) const {
  const int n = verts_per_element();
  MatX P(3, n);
  for (int c = 0; c < n; ++c) P.col(c) = q.segment<3>(3 * elements[e][c]);
  return P;
}

Mat3 SimMesh::deformation_gradient(const VecX& q, int e) const {
  return element_positions(q, e) * grad_ops[e];
}

Eigen::Matrix<double, 4, 3> tet_gradient(const Mat3& T) {
  if (std::abs(T.determinant()) < 1e-300)
    throw std::invalid_argument("tet_gradient: singular edge matrix");
  Mat3 Tinv = T.inverse();
  Eigen::Matrix<double, 4, 3> G;
  G.row(0) = -Eigen::RowVector3d::Ones() * Tinv;
  G.bottomRows<3>() = Tinv;
  return G;
}

Eigen::Matrix<double, 3, 3> tri_gradient(const Eigen::Matrix<double, 3, 2>& T) {
  Eigen::Matrix2d TtT = T.transpose() * T;
  if (std::abs(TtT.determinant()) < 1e-300)
    throw std::invalid_argument("tri_gradient: degenerate triangle");
  Eigen::Matrix<double, 2, 3> Tpinv = TtT.inverse() * T.transpose();
  Eigen::Matrix<double, 3, 3> G;
  G.row(0) = -Eigen::RowVector2d::Ones() * Tpinv;
  G.bottomRows<2>() = Tpinv;
  return G;
}

Eigen::Matrix<double, 2, 3> rod_gradient(const Vec3& T) {
  double len2 = T.squaredNorm();
  if (len2 < 1e-300) throw std::invalid_argument("rod_gradient: zero-length edge");
  Eigen::RowVector3d Tpinv = T.transpose() / len2;
  Eigen::Matrix<double, 2, 3> G;
  G.row(0) = -Tpinv;
  G.row(1) = Tpinv;
  return G;
}

Vec3 tri_normal(const Vec3& x0, const Vec3& x1, const Vec3& x2) {
  Vec3 n = (x1 - x0).cross(x2 - x0);
  double len = n.norm();
  if (len < 1e-300) throw std::invalid_argument("tri_normal: degenerate triangle");
  return n / len;
}

std::pair<Vec3, Vec3> rod_frame(const Vec3& edge) {
  double len = edge.norm();
  if (len < 1e-300) throw std::invalid_argument("rod_frame: zero-length edge");
  Vec3 e = edge / len;
  // Pick the global axis least aligned with the edge; ties break to the
  // lowest axis index.
  int axis = 0;
  double best = std::abs(e[0]);
  for (int a = 1; a < 3; ++a) {
    if (std::abs(e[a]) < best - 1e-15) {
      best = std::abs(e[a]);
      axis = a;
    }
  }
  Vec3 n = e.cross(Vec3::Unit(axis)).normalized();
  Vec3 b = e.cross(n);
  return {n, b};
}

SimMesh build_mesh(std::vector<Vec3> positions,
                   std::vector<std::array<int, 4>> elements, ElementKind kind,
                   double thickness, double cross_section) {
  SimMesh mesh;
  mesh.kind = kind;
  mesh.rest_positions = std::move(positions);
  mesh.elements = std::move(elements);

  const int n = mesh.verts_per_element();
  const int nv = mesh.num_vertices();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int c = 0; c < n; ++c) {
      int v = mesh.elements[e][c];
      if (v < 0 || v >= nv)
        throw std::out_of_range("element " + std::to_string(e) +
                                " references invalid vertex " + std::to_string(v));
    }
  }

  const double diag = std::max(mesh.bbox_diagonal(), 1e-30);
  mesh.grad_ops.resize(mesh.num_elements());
  mesh.volumes.resize(mesh.num_elements());
  if (kind != ElementKind::Tet) mesh.ref_normals.resize(mesh.num_elements());
  if (kind == ElementKind::Rod) mesh.ref_binormals.resize(mesh.num_elements());

  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto& idx = mesh.elements[e];
    auto x = [&](int c) -> const Vec3& { return mesh.rest_positions[idx[c]]; };
    switch (kind) {
      case ElementKind::Tet: {
        Mat3 T;
        T.col(0) = x(1) - x(0);
        T.col(1) = x(2) - x(0);
        T.col(2) = x(3) - x(0);
        double vol = T.determinant() / 6.0;
        if (vol < 0) {  // reorient instead of rejecting
          std::swap(idx[1], idx[2]);
          T.col(0) = x(1) - x(0);
          T.col(1) = x(2) - x(0);
          vol = -vol;
        }
        if (vol <= 1e-12 * diag * diag * diag)
          throw std::runtime_error("degenerate tet element " + std::to_string(e));
        mesh.grad_ops[e] = tet_gradient(T);
        mesh.volumes[e] = vol;
        break;
      }
      case ElementKind::Tri: {
        Eigen::Matrix<double, 3, 2> T;
        T.col(0) = x(1) - x(0);
        T.col(1) = x(2) - x(0);
        double area = 0.5 * T.col(0).cross(T.col(1)).norm();
        if (area <= 1e-12 * diag * diag)
          throw std::runtime_error("degenerate tri element " + std::to_string(e));
        mesh.grad_ops[e] = tri_gradient(T);
        mesh.volumes[e] = area * thickness;
        mesh.ref_normals[e] = tri_normal(x(0), x(1), x(2));
        break;
      }
      case ElementKind::Rod: {
        Vec3 edge = x(1) - x(0);
        double len = edge.norm();
        if (len <= 1e-12 * diag)
          throw std::runtime_error("degenerate rod element " + std::to_string(e));
        mesh.grad_ops[e] = rod_gradient(edge);
        mesh.volumes[e] = len * cross_section;
        auto [nrm, bin] = rod_frame(edge);
        mesh.ref_normals[e] = nrm;
        mesh.ref_binormals[e] = bin;
        break;
      }
    }
  }
  return mesh;
}

namespace {

std::vector<std::string> read_data_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream probe(line);
    std::string tok;
    if (probe >> tok) lines.push_back(line);
  }
  return lines;
}

SimMesh load_node_ele(const std::string& path, double thickness,
                      double cross_section) {
  std::string base = path;
  if (base.size() > 5 && base.substr(base.size() - 5) == ".node")
    base = base.substr(0, base.size() - 5);
  auto node_lines = read_data_lines(base + ".node");
  auto ele_lines = read_data_lines(base + ".ele");
  if (node_lines.empty() || ele_lines.empty())
    throw std::runtime_error("empty node/ele file: " + base);

  auto parse_count = [](const std::string& line, const char* what) {
    std::istringstream ss(line);
    long n = -1;
    ss >> n;
    if (n < 0) throw std::runtime_error(std::string("bad count line in ") + what);
    return static_cast<size_t>(n);
  };
  size_t nv = parse_count(node_lines[0], "node file");
  size_t ne = parse_count(ele_lines[0], "ele file");
  if (node_lines.size() != nv + 1 || ele_lines.size() != ne + 1)
    throw std::runtime_error("node/ele line count mismatch in " + base);

  std::vector<Vec3> pos(nv);
  for (size_t i = 0; i < nv; ++i) {
    std::istringstream ss(node_lines[i + 1]);
    if (!(ss >> pos[i][0] >> pos[i][1] >> pos[i][2]))
      throw std::runtime_error("parse failure at node line " + std::to_string(i));
  }
  std::vector<std::array<int, 4>> elems(ne, {-1, -1, -1, -1});
  for (size_t i = 0; i < ne; ++i) {
    std::istringstream ss(ele_lines[i + 1]);
    if (!(ss >> elems[i][0] >> elems[i][1] >> elems[i][2] >> elems[i][3]))
      throw std::runtime_error("parse failure at element line " + std::to_string(i));
  }
  return build_mesh(std::move(pos), std::move(elems), ElementKind::Tet,
                    thickness, cross_section);
}

SimMesh load_obj_tri(const std::string& path, double thickness) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Vec3> pos;
  std::vector<std::array<int, 4>> elems;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p[0] >> p[1] >> p[2])) throw std::runtime_error("bad v record: " + line);
      pos.push_back(p);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string fld;
      while (ss >> fld) {
        // accept v, v/vt, v//vn forms; only the vertex index is used
        face.push_back(std::stoi(fld.substr(0, fld.find('/'))) - 1);
      }
      if (face.size() != 3)
        throw std::runtime_error("only triangulated faces are supported: " + line);
      elems.push_back({face[0], face[1], face[2], -1});
    }
  }
  return build_mesh(std::move(pos), std::move(elems), ElementKind::Tri, thickness);
}

SimMesh load_rod_edges(const std::string& path, double cross_section) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Vec3> pos;
  std::vector<std::array<int, 4>> elems;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p[0] >> p[1] >> p[2])) throw std::runtime_error("bad v record: " + line);
      pos.push_back(p);
    } else if (tag == "e") {
      int a, b;
      if (!(ss >> a >> b)) throw std::runtime_error("bad e record: " + line);
      elems.push_back({a, b, -1, -1});
    } else {
      throw std::runtime_error("unknown rod record: " + line);
    }
  }
  return build_mesh(std::move(pos), std::move(elems), ElementKind::Rod, 1e-3,
                    cross_section);
}

}  // namespace

SimMesh load_mesh(const std::string& path, ElementKind kind, double thickness,
                  double cross_section) {
  switch (kind) {
    case ElementKind::Tet: return load_node_ele(path, thickness, cross_section);
    case ElementKind::Tri: return load_obj_tri(path, thickness);
    case ElementKind::Rod: return load_rod_edges(path, cross_section);
  }
  throw std::invalid_argument("unknown mesh kind");
}

void save_frame_obj(const std::string& path, const SimMesh& mesh, const VecX& q) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(12);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << "v " << q[3 * v] << ' ' << q[3 * v + 1] << ' ' << q[3 * v + 2] << '\n';
  }
  if (mesh.kind == ElementKind::Tri) {
    for (const auto& e : mesh.elements)
      out << "f " << e[0] + 1 << ' ' << e[1] + 1 << ' ' << e[2] + 1 << '\n';
  } else if (mesh.kind == ElementKind::Rod) {
    for (const auto& e : mesh.elements)
      out << "l " << e[0] + 1 << ' ' << e[1] + 1 << '\n';
  } else {
    // boundary faces of the tet mesh, oriented away from the opposite vertex
    std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> faces;
    const int opp[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& e : mesh.elements) {
      for (int f = 0; f < 4; ++f) {
        std::array<int, 3> tri = {e[opp[f][0]], e[opp[f][1]], e[opp[f][2]]};
        std::array<int, 3> key = tri;
        std::sort(key.begin(), key.end());
        auto it = faces.find(key);
        if (it == faces.end())
          faces[key] = {tri, e[f]};  // remember the opposite vertex
        else
          faces.erase(it);  // interior face, shared twice
      }
    }
    for (const auto& [key, val] : faces) {
      auto [tri, d] = val;
      const Vec3& a = mesh.rest_positions[tri[0]];
      Vec3 n = (mesh.rest_positions[tri[1]] - a).cross(mesh.rest_positions[tri[2]] - a);
      if (n.dot(mesh.rest_positions[d] - a) > 0) std::swap(tri[1], tri[2]);
      out << "f " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
    }
  }
}

}  // namespace mixedfem

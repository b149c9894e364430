#include "mixedfem/operators.hpp"

#include <stdexcept>

namespace mixedfem {

SpMat assemble_J(const SimMesh& mesh) {
  const int n = mesh.verts_per_element();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.num_elements()) * 9 * n);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const MatX& G = mesh.grad_ops[e];  // n x 3
    for (int c = 0; c < n; ++c) {
      int v = mesh.elements[e][c];
      // F_ab = sum_c q[3v_c + a] G(c, b)  =>  rowvec index 3a+b
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          trips.emplace_back(9 * e + 3 * a + b, 3 * v + a, G(c, b));
    }
  }
  SpMat J(9 * mesh.num_elements(), 3 * mesh.num_vertices());
  J.setFromTriplets(trips.begin(), trips.end());
  J.makeCompressed();
  return J;
}

void update_W(const std::vector<Mat3>& rotations, std::vector<Mat96>& blocks) {
  blocks.resize(rotations.size());
#pragma omp parallel for
  for (long i = 0; i < static_cast<long>(rotations.size()); ++i)
    blocks[i] = rotation_block(rotations[i]);
}

std::vector<Mat96> assemble_W(const std::vector<Mat3>& rotations) {
  std::vector<Mat96> blocks;
  update_W(rotations, blocks);
  return blocks;
}

VecX normal_rhs_term(const SimMesh& mesh, const std::vector<Mat3>& rotations) {
  if (mesh.kind == ElementKind::Tet)
    throw std::logic_error("normal_rhs_term: tet meshes have no frame correction");
  VecX out(9 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec3& n = mesh.ref_normals[e];
    Mat3 corr = n * n.transpose();
    if (mesh.kind == ElementKind::Rod) {
      const Vec3& b = mesh.ref_binormals[e];
      corr += b * b.transpose();
    }
    out.segment<9>(9 * e) = rowvec(rotations[e] * corr);
  }
  return out;
}

VecX apply_W(const std::vector<Mat96>& blocks, const VecX& s) {
  VecX out(9 * static_cast<long>(blocks.size()));
  for (size_t i = 0; i < blocks.size(); ++i)
    out.segment<9>(9 * i) = blocks[i] * s.segment<6>(6 * i);
  return out;
}

VecX apply_Wt(const std::vector<Mat96>& blocks, const VecX& l) {
  VecX out(6 * static_cast<long>(blocks.size()));
  for (size_t i = 0; i < blocks.size(); ++i)
    out.segment<6>(6 * i) = blocks[i].transpose() * l.segment<9>(9 * i);
  return out;
}

}  // namespace mixedfem

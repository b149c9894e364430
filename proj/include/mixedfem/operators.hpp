#pragma once

#include <vector>

#include "mixedfem/mesh.hpp"
#include "mixedfem/tensors.hpp"

namespace mixedfem {

// Constant coupling matrix, 9|T| x 3|V|. The i-th 9-slice of J*q is
// rowvec(F_i), the deformation gradient of element i at configuration q.
// Integration weights dv_i are applied later, where the saddle system is
// assembled, so that J itself maps positions to deformation gradients.
SpMat assemble_J(const SimMesh& mesh);

// Block-diagonal stretch-to-gradient map; block i is rowvec(R_i * symmat(.)).
void update_W(const std::vector<Mat3>& rotations, std::vector<Mat96>& blocks);
std::vector<Mat96> assemble_W(const std::vector<Mat3>& rotations);

// Shell/rod constraint correction: slice i is rowvec(R_i n_i n_i^T), plus the
// binormal term for rods. Unscaled, like J.
VecX normal_rhs_term(const SimMesh& mesh, const std::vector<Mat3>& rotations);

// Apply the block-diagonal W (or its transpose) to a stacked vector.
VecX apply_W(const std::vector<Mat96>& blocks, const VecX& s);
VecX apply_Wt(const std::vector<Mat96>& blocks, const VecX& l);

}  // namespace mixedfem

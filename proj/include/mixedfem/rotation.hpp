#pragma once

#include "mixedfem/tensors.hpp"

namespace mixedfem {

// Orthogonal Procrustes: the rotation maximizing <R, M>_F over SO(3),
// from the SVD of M with reflection correction. Rank-deficient and
// negative-determinant targets are fine.
Mat3 polar_rotation(const Mat3& M);

}  // namespace mixedfem

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mixedfem {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat96 = Eigen::Matrix<double, 9, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

// Symmetric 6-vector ordering: (S00, S11, S22, S12, S02, S01).
inline Mat3 symmat(const Vec6& s) {
  Mat3 S;
  S << s[0], s[5], s[4],
       s[5], s[1], s[3],
       s[4], s[3], s[2];
  return S;
}

// Inverse of symmat for a symmetric matrix (off-diagonals taken once).
inline Vec6 sym_to_vec(const Mat3& S) {
  Vec6 s;
  s << S(0, 0), S(1, 1), S(2, 2), S(1, 2), S(0, 2), S(0, 1);
  return s;
}

// Full contraction of the symmetric-encoding tensor against a 3x3 matrix.
// Off-diagonal slots collect both symmetric entries, so for symmetric M the
// shear components come back doubled. Gradients taken through this
// contraction pick up the standard factor of two on shear terms.
inline Vec6 contract_sym(const Mat3& M) {
  Vec6 c;
  c << M(0, 0), M(1, 1), M(2, 2),
       M(1, 2) + M(2, 1), M(0, 2) + M(2, 0), M(0, 1) + M(1, 0);
  return c;
}

// Row-major 9-vector <-> 3x3 matrix.
inline Mat3 matvec9(const Vec9& l) {
  Mat3 M;
  M << l[0], l[1], l[2],
       l[3], l[4], l[5],
       l[6], l[7], l[8];
  return M;
}

inline Vec9 rowvec(const Mat3& M) {
  Vec9 v;
  v << M(0, 0), M(0, 1), M(0, 2),
       M(1, 0), M(1, 1), M(1, 2),
       M(2, 0), M(2, 1), M(2, 2);
  return v;
}

// 9x6 block mapping a stretch 6-vector s to rowvec(R * symmat(s)).
// Column j is rowvec(R * symmat(e_j)); linear in R.
inline Mat96 rotation_block(const Mat3& R) {
  Mat96 W;
  for (int j = 0; j < 6; ++j) {
    Vec6 e = Vec6::Zero();
    e[j] = 1.0;
    W.col(j) = rowvec(R * symmat(e));
  }
  return W;
}

}  // namespace mixedfem

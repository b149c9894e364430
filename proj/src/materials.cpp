#include "mixedfem/materials.hpp"

#include <cmath>

namespace mixedfem {

MaterialModel material_from_name(const std::string& name) {
  if (name == "ARAP" || name == "arap") return MaterialModel::ARAP;
  if (name == "Corot" || name == "corot" || name == "corotational")
    return MaterialModel::Corot;
  if (name == "NH" || name == "nh" || name == "NeoHookean" || name == "neohookean")
    return MaterialModel::NeoHookean;
  throw std::invalid_argument("unknown material model: " + name);
}

std::string material_name(MaterialModel model) {
  switch (model) {
    case MaterialModel::ARAP: return "ARAP";
    case MaterialModel::Corot: return "Corot";
    case MaterialModel::NeoHookean: return "NH";
  }
  return "?";
}

namespace {

double det_checked(const Mat3& S) {
  double d = S.determinant();
  if (!(d > 0))
    throw NonPhysicalStretch("neo-Hookean stretch has non-positive determinant");
  return d;
}

// diag(1,1,1,2,2,2): d(contract_sym(S))/ds
Mat6 shear_metric() {
  Mat6 D = Mat6::Zero();
  D.diagonal() << 1, 1, 1, 2, 2, 2;
  return D;
}

}  // namespace

double energy(const Vec6& s, const MaterialParams& p) {
  const double mu = p.mu(), la = p.lambda();
  switch (p.model) {
    case MaterialModel::ARAP: {
      Mat3 D = symmat(s) - Mat3::Identity();
      return mu * D.squaredNorm();
    }
    case MaterialModel::Corot: {
      Mat3 D = symmat(s) - Mat3::Identity();
      double tr = D.trace();
      return mu * D.squaredNorm() + 0.5 * la * tr * tr;
    }
    case MaterialModel::NeoHookean: {
      Mat3 S = symmat(s);
      double logd = std::log(det_checked(S));
      return 0.5 * mu * (S.squaredNorm() - 3.0) - mu * logd + 0.5 * la * logd * logd;
    }
  }
  return 0.0;
}

Vec6 gradient(const Vec6& s, const MaterialParams& p) {
  const double mu = p.mu(), la = p.lambda();
  switch (p.model) {
    case MaterialModel::ARAP:
      return 2.0 * mu * contract_sym(symmat(s) - Mat3::Identity());
    case MaterialModel::Corot: {
      Mat3 D = symmat(s) - Mat3::Identity();
      Vec6 g = 2.0 * mu * contract_sym(D);
      g.head<3>().array() += la * D.trace();
      return g;
    }
    case MaterialModel::NeoHookean: {
      Mat3 S = symmat(s);
      double logd = std::log(det_checked(S));
      Mat3 Sinv = S.inverse();
      return mu * contract_sym(S) + (la * logd - mu) * contract_sym(Sinv);
    }
  }
  return Vec6::Zero();
}

Mat6 hessian(const Vec6& s, const MaterialParams& p, bool project) {
  const double mu = p.mu(), la = p.lambda();
  Mat6 H;
  switch (p.model) {
    case MaterialModel::ARAP:
      H = 2.0 * mu * shear_metric();
      break;
    case MaterialModel::Corot:
      H = 2.0 * mu * shear_metric();
      H.topLeftCorner<3, 3>().array() += la;
      break;
    case MaterialModel::NeoHookean: {
      Mat3 S = symmat(s);
      double logd = std::log(det_checked(S));
      Mat3 Sinv = S.inverse();
      Vec6 csi = contract_sym(Sinv);
      H = mu * shear_metric() + la * csi * csi.transpose();
      const double coeff = la * logd - mu;
      for (int j = 0; j < 6; ++j) {
        Vec6 e = Vec6::Zero();
        e[j] = 1.0;
        H.col(j) += coeff * contract_sym(-Sinv * symmat(e) * Sinv);
      }
      H = 0.5 * (H + H.transpose()).eval();
      break;
    }
  }
  if (project) {
    Eigen::SelfAdjointEigenSolver<Mat6> eig(H);
    Vec6 ev = eig.eigenvalues().cwiseMax(spd_floor(p));
    H = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
  }
  return H;
}

}  // namespace mixedfem

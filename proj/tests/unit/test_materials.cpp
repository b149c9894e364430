#include <doctest.h>

#include "helpers.hpp"
#include "mixedfem/materials.hpp"

using namespace mixedfem;

namespace {

Vec6 random_stretch() {
  // rejection-sample stretches with det(symmat(s)) > 0.2
  for (;;) {
    Vec6 s;
    s << testutil::uniform(0.5, 1.6), testutil::uniform(0.5, 1.6),
        testutil::uniform(0.5, 1.6), testutil::uniform(-0.25, 0.25),
        testutil::uniform(-0.25, 0.25), testutil::uniform(-0.25, 0.25);
    if (symmat(s).determinant() > 0.2) return s;
  }
}

const Vec6 kRest = (Vec6() << 1, 1, 1, 0, 0, 0).finished();

}  // namespace

TEST_CASE("gradients match central finite differences") {
  for (MaterialModel model :
       {MaterialModel::ARAP, MaterialModel::Corot, MaterialModel::NeoHookean}) {
    MaterialParams p;
    p.model = model;
    p.youngs = 1e5;
    p.poisson = 0.3;
    for (int trial = 0; trial < 25; ++trial) {
      Vec6 s = random_stretch();
      Vec6 g = gradient(s, p);
      for (int i = 0; i < 6; ++i) {
        const double h = 1e-5 * (1.0 + std::abs(s[i]));
        Vec6 sp = s, sm = s;
        sp[i] += h;
        sm[i] -= h;
        const double fd = (energy(sp, p) - energy(sm, p)) / (2 * h);
        CHECK(std::abs(g[i] - fd) <= 1e-5 * (1.0 + std::abs(fd)));
      }
    }
  }
}

TEST_CASE("hessians match finite differences of the gradient") {
  for (MaterialModel model :
       {MaterialModel::ARAP, MaterialModel::Corot, MaterialModel::NeoHookean}) {
    MaterialParams p;
    p.model = model;
    p.youngs = 1e5;
    p.poisson = 0.3;
    for (int trial = 0; trial < 10; ++trial) {
      Vec6 s = random_stretch();
      Mat6 H = hessian(s, p, /*project=*/false);
      for (int i = 0; i < 6; ++i) {
        const double h = 1e-5 * (1.0 + std::abs(s[i]));
        Vec6 sp = s, sm = s;
        sp[i] += h;
        sm[i] -= h;
        Vec6 fd = (gradient(sp, p) - gradient(sm, p)) / (2 * h);
        CHECK((H.col(i) - fd).cwiseAbs().maxCoeff() <=
              1e-5 * (1.0 + fd.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("rest stretch has zero energy and zero gradient") {
  for (MaterialModel model :
       {MaterialModel::ARAP, MaterialModel::Corot, MaterialModel::NeoHookean}) {
    MaterialParams p;
    p.model = model;
    CHECK(std::abs(energy(kRest, p)) < 1e-10 * p.mu());
    CHECK(gradient(kRest, p).cwiseAbs().maxCoeff() < 1e-10 * p.mu());
  }
}

TEST_CASE("neo-Hookean rejects non-physical stretches") {
  MaterialParams p;
  p.model = MaterialModel::NeoHookean;
  Vec6 inverted;
  inverted << -1, 1, 1, 0, 0, 0;
  CHECK_THROWS_AS(energy(inverted, p), NonPhysicalStretch);
  CHECK_THROWS_AS(gradient(inverted, p), NonPhysicalStretch);
}

TEST_CASE("projected hessian is positive definite") {
  MaterialParams p;
  p.model = MaterialModel::NeoHookean;
  // strongly compressed state: the raw hessian is indefinite
  Vec6 s;
  s << 0.4, 0.5, 0.45, 0.1, -0.05, 0.08;
  Mat6 H = hessian(s, p, /*project=*/true);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(H);
  CHECK(eig.eigenvalues().minCoeff() >= spd_floor(p) * (1 - 1e-12));
}

TEST_CASE("material names round trip") {
  for (MaterialModel model :
       {MaterialModel::ARAP, MaterialModel::Corot, MaterialModel::NeoHookean})
    CHECK(material_from_name(material_name(model)) == model);
  CHECK_THROWS(material_from_name("stvk"));
}

TEST_CASE("parameter validation") {
  MaterialParams p;
  p.youngs = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.youngs = 1e5;
  p.poisson = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.poisson = 0.3;
  p.rho = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

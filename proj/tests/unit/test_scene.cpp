#include <doctest.h>

#include "helpers.hpp"
#include "mixedfem/mesh_gen.hpp"
#include "mixedfem/scene.hpp"

using namespace mixedfem;

namespace {

const char* kFullScene = R"({
  "mesh": { "path": "meshes/cube.node", "kind": "tet" },
  "material": { "Model": "corot", "rho": 1200, "E": 5e6, "nu": 0.4 },
  "timestep": 0.004,
  "Substeps": 12,
  "outer_iterations": 2,
  "gravity": [0, -9.8, 0],
  "thickness": 2e-3,
  "cross_section": 3e-6,
  "pins": [
    { "vertices": [0, 1] },
    { "box": { "min": [0, 0, 0], "max": [1, 1, 1] },
      "motion": [ { "time": 0, "translate": [0, 0, 0] },
                  { "time": 1, "translate": [0.5, 0, 0] } ] }
  ],
  "ground": { "height": -0.2, "stiffness": 2e4, "damping": 5 },
  "solver": { "cg_tol": 1e-8, "tikhonov": 1e-7 }
})";

}  // namespace

TEST_CASE("full scene schema parses with verbatim material keys") {
  SceneConfig cfg = parse_scene(kFullScene);
  CHECK(cfg.mesh_path == "meshes/cube.node");
  CHECK(cfg.kind == ElementKind::Tet);
  CHECK(cfg.material.model == MaterialModel::Corot);
  CHECK(cfg.material.rho == 1200);
  CHECK(cfg.material.youngs == 5e6);
  CHECK(cfg.material.poisson == 0.4);
  CHECK(cfg.timestep == 0.004);
  CHECK(cfg.substeps == 12);
  CHECK(cfg.outer_iterations == 2);
  CHECK(cfg.gravity.y() == -9.8);
  CHECK(cfg.thickness == 2e-3);
  CHECK(cfg.cross_section == 3e-6);
  REQUIRE(cfg.pins.size() == 2);
  CHECK(cfg.pins[0].vertices == std::vector<int>{0, 1});
  REQUIRE(cfg.ground.has_value());
  CHECK(cfg.ground->stiffness == 2e4);
  CHECK(cfg.solver.cg_tol == 1e-8);
  CHECK(cfg.solver.tikhonov == 1e-7);
}

TEST_CASE("schema violations name the offending field") {
  auto check_names = [](const std::string& text, const std::string& field) {
    try {
      parse_scene(text);
      FAIL("expected a schema error for ", field);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  check_names(R"({"material": {"Model":"arap","rho":1,"E":1,"nu":0.3}})",
              "mesh");
  check_names(R"({"mesh": {"path":"x","kind":"tet"}})", "material");
  check_names(
      R"({"mesh":{"path":"x","kind":"tet"},
          "material":{"Model":"arap","rho":1,"nu":0.3}})",
      "material.E");
  check_names(
      R"({"mesh":{"path":"x","kind":"blob"},
          "material":{"Model":"arap","rho":1,"E":1,"nu":0.3}})",
      "mesh.kind");
  check_names(
      R"({"mesh":{"path":"x","kind":"tet"},
          "material":{"Model":"arap","rho":1,"E":1,"nu":0.3},
          "timestep": -0.1})",
      "timestep");
}

TEST_CASE("box selector resolves pinned vertices from rest positions") {
  SimMesh mesh = box_tet_mesh(2, 2, 2, 0.2, 0.2, 0.2);
  PinGroup g;
  g.box_min = Vec3(-1e-9, -1e-9, -1e-9);
  g.box_max = Vec3(1e-9, 0.21, 0.21);  // the x = 0 face
  std::vector<int> pinned = g.resolve(mesh);
  CHECK(pinned.size() == 9);
  for (int v : pinned) CHECK(mesh.rest_positions[v].x() == 0.0);
}

TEST_CASE("out-of-range pin indices are rejected") {
  SimMesh mesh = box_tet_mesh(1, 1, 1, 0.2, 0.2, 0.2);
  PinGroup g;
  g.vertices = {1000};
  CHECK_THROWS_AS(g.resolve(mesh), std::out_of_range);
}

TEST_CASE("pin motion keys interpolate linearly and hold after the end") {
  PinGroup g;
  PinMotionKey a, b;
  a.time = 0.0;
  b.time = 2.0;
  b.translate = Vec3(1, 0, 0);
  g.motion = {a, b};
  Vec3 rest(0.5, 0, 0);
  CHECK((g.position_at(rest, rest, 0.0) - rest).norm() < 1e-14);
  CHECK((g.position_at(rest, rest, 1.0) - (rest + Vec3(0.5, 0, 0))).norm() <
        1e-14);
  CHECK((g.position_at(rest, rest, 5.0) - (rest + Vec3(1, 0, 0))).norm() <
        1e-14);
}

TEST_CASE("projection restrict/expand round trip and idempotence") {
  DofProjection P = DofProjection::build({1}, 3);
  CHECK(P.num_free() == 6);
  VecX full(9);
  for (int i = 0; i < 9; ++i) full[i] = i;
  VecX free = P.restrict(full);
  VecX back = P.expand(free, full);
  CHECK((back - full).cwiseAbs().maxCoeff() == 0.0);
  CHECK((P.restrict(back) - free).cwiseAbs().maxCoeff() == 0.0);
  // no pins -> identity
  DofProjection I = DofProjection::build({}, 3);
  CHECK(I.num_free() == 9);
  CHECK((I.restrict(full) - full).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lumped mass: unit tet spreads rho*V/4 to each vertex") {
  // scaled reference tet with volume exactly 1
  const double c = std::cbrt(6.0);
  SimMesh mesh = build_mesh(
      {Vec3(0, 0, 0), Vec3(c, 0, 0), Vec3(0, c, 0), Vec3(0, 0, c)},
      {{0, 1, 2, 3}}, ElementKind::Tet);
  REQUIRE(mesh.volumes[0] == doctest::Approx(1.0).epsilon(1e-12));
  VecX M = lumped_mass(mesh, 1000.0);
  for (int i = 0; i < M.size(); ++i)
    CHECK(M[i] == doctest::Approx(250.0).epsilon(1e-12));
  CHECK_THROWS_AS(lumped_mass(mesh, 0.0), std::invalid_argument);
}

TEST_CASE("total mass is invariant under refinement") {
  const double rho = 850.0;
  VecX coarse = lumped_mass(box_tet_mesh(1, 1, 1, 0.3, 0.3, 0.3), rho);
  VecX fine = lumped_mass(box_tet_mesh(3, 3, 3, 0.3, 0.3, 0.3), rho);
  CHECK(std::abs(coarse.sum() - fine.sum()) <= 1e-10 * coarse.sum());
}

TEST_CASE("contact force: linear one-sided law") {
  GroundPlane g;
  g.height = 0.0;
  g.stiffness = 1e4;
  g.damping = 0.0;
  VecX q(6), v = VecX::Zero(6);
  q << 0, 0.5, 0,   // above
       0, -0.01, 0;  // 1 cm below
  VecX f = contact_force(q, v, g);
  CHECK(f.head<3>().cwiseAbs().maxCoeff() == 0.0);
  CHECK(f[4] == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(f[3] == 0.0);
  CHECK(f[5] == 0.0);
  // damping opposes the approach velocity of penetrating vertices
  g.damping = 10.0;
  v[4] = -2.0;
  CHECK(contact_force(q, v, g)[4] == doctest::Approx(120.0).epsilon(1e-12));
  // contact energy matches the half-quadratic penalty
  CHECK(contact_energy(q, g) == doctest::Approx(0.5 * 1e4 * 1e-4).epsilon(1e-12));
}

#include "registry.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mixedfem/mesh.hpp"
#include "mixedfem/mesh_gen.hpp"
#include "mixedfem/operators.hpp"
#include "mixedfem/rotation.hpp"
#include "mixedfem/scene.hpp"
#include "mixedfem/solver.hpp"
#include "oracles.hpp"

namespace mixedfem::validation {

namespace {

std::atomic<bool> g_mutate{false};
std::atomic<unsigned> g_seed{0};

std::string num(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

CheckResult ok(const std::string& detail) { return {true, detail}; }
CheckResult bad(const std::string& detail) { return {false, detail}; }

VecX random_vec(oracle::Rng& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * u(rng);
  return v;
}

double rel_err(const VecX& got, const VecX& want) {
  return (got - want).norm() / (want.norm() + 1e-12);
}

SimMesh single_element(ElementKind kind) {
  switch (kind) {
    case ElementKind::Tet:
      return build_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                         Vec3(0, 0, 1)},
                        {{0, 1, 2, 3}}, kind);
    case ElementKind::Tri:
      return build_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)},
                        {{0, 1, 2, -1}}, kind);
    case ElementKind::Rod:
      return build_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {{0, 1, -1, -1}},
                        kind);
  }
  throw std::logic_error("bad kind");
}

std::vector<SimMesh> sample_meshes() {
  std::vector<SimMesh> out;
  out.push_back(box_tet_mesh(1, 1, 1, 0.5, 0.5, 0.5));
  out.push_back(grid_tri_mesh(2, 2, 1.0, 1.0));
  out.push_back(chain_rod_mesh(3, 0.6));
  return out;
}

const char* kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::Tet: return "tet";
    case ElementKind::Tri: return "tri";
    case ElementKind::Rod: return "rod";
  }
  return "?";
}

MatX dense_of(const SpMat& A) { return MatX(A); }

SpMat free_coupling(const SpMat& J_full, const DofProjection& proj) {
  return J_full * proj.selection();
}

SceneConfig base_config(MaterialModel model, double E, double nu, double rho) {
  SceneConfig cfg;
  cfg.material.model = model;
  cfg.material.youngs = E;
  cfg.material.poisson = nu;
  cfg.material.rho = rho;
  return cfg;
}

// ---------- operator / tensor oracles ----------

CheckResult check_tensor_contractions() {
  oracle::Rng rng(11 + seed_offset());
  for (int t = 0; t < 20; ++t) {
    const VecX l9 = random_vec(rng, 9, 2.0);
    const VecX s6 = random_vec(rng, 6, 2.0);
    const Mat3 M = oracle::random_rotation(rng) +
                   0.3 * Mat3::Identity() * (t % 3);
    const Mat3 bl = matvec9(Vec9(l9));
    if ((bl - oracle::naive_B_dot(Vec9(l9))).norm() > 1e-14)
      return bad("matvec9 disagrees with the naive third-order contraction");
    if ((symmat(Vec6(s6)) - oracle::naive_C_dot(Vec6(s6))).norm() > 1e-14)
      return bad("symmat disagrees with the naive symmetric contraction");
    if ((rowvec(M) - oracle::naive_B_contract(M)).norm() > 1e-14)
      return bad("rowvec disagrees with the naive transposed contraction");
    if ((contract_sym(M) - oracle::naive_C_contract(M)).norm() > 1e-14)
      return bad("contract_sym disagrees with the naive contraction");
    const Vec6 s(s6);
    if ((sym_to_vec(symmat(s)) - s).norm() > 1e-14)
      return bad("sym_to_vec does not invert symmat");
  }
  return ok("20 random samples, all contractions within 1e-14");
}

CheckResult check_coupling_matches_naive() {
  double worst = 0;
  for (const SimMesh& mesh : sample_meshes()) {
    const MatX got = dense_of(assemble_J(mesh));
    const MatX want = oracle::naive_J(mesh);
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
  }
  if (worst > 1e-12)
    return bad("assembled coupling deviates from naive tensors by " +
               num(worst));
  return ok("tet/tri/rod coupling matches naive tensor assembly, max dev " +
            num(worst));
}

CheckResult check_coupling_recovers_gradients() {
  oracle::Rng rng(17 + seed_offset());
  double worst = 0;
  for (const SimMesh& mesh : sample_meshes()) {
    const SpMat J = assemble_J(mesh);
    for (int t = 0; t < 5; ++t) {
      const VecX q =
          mesh.rest_vector() + random_vec(rng, 3 * mesh.num_vertices(), 0.2);
      const VecX Jq = J * q;
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const Vec9 want = rowvec(mesh.deformation_gradient(q, e));
        worst = std::max(
            worst, (Jq.segment<9>(9 * e) - want).lpNorm<Eigen::Infinity>());
      }
    }
  }
  if (worst > 1e-10)
    return bad("J*q deviates from the per-element deformation gradient by " +
               num(worst));
  return ok("J*q reproduces per-element deformation gradients, max dev " +
            num(worst));
}

CheckResult check_stretch_block_matches_naive() {
  oracle::Rng rng(23 + seed_offset());
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    Mat3 R = oracle::random_rotation(rng);
    if (t % 4 == 0) R += 0.5 * oracle::random_rotation(rng);  // non-rotation too
    worst = std::max(
        worst, (rotation_block(R) - oracle::naive_W_block(R)).cwiseAbs().maxCoeff());
  }
  if (worst > 1e-13)
    return bad("rotation_block deviates from the naive Z:R contraction by " +
               num(worst));
  return ok("20 samples, rotation_block matches naive contraction, max dev " +
            num(worst));
}

// ---------- material derivative oracles ----------

CheckResult check_material_gradients() {
  oracle::Rng rng(31 + seed_offset());
  for (MaterialModel model :
       {MaterialModel::ARAP, MaterialModel::Corot, MaterialModel::NeoHookean}) {
    MaterialParams mat = base_config(model, 1e5, 0.3, 1000).material;
    for (int t = 0; t < 20; ++t) {
      const Vec6 s = oracle::random_stretch(rng, 0.3);
      const VecX fd = oracle::fd_gradient(
          [&](const VecX& x) { return energy(Vec6(x), mat); }, VecX(s));
      const double err =
          (fd - VecX(gradient(s, mat))).norm() / (fd.norm() + 1e-12);
      if (err > 1e-5)
        return bad(std::string(material_name(mat.model)) +
                   " gradient deviates from finite differences by " + num(err));
    }
  }
  return ok("3 models x 20 stretches, analytic gradients within 1e-5 of FD");
}

CheckResult check_material_hessians() {
  oracle::Rng rng(37 + seed_offset());
  for (MaterialModel model :
       {MaterialModel::ARAP, MaterialModel::Corot, MaterialModel::NeoHookean}) {
    MaterialParams mat = base_config(model, 1e5, 0.3, 1000).material;
    for (int t = 0; t < 20; ++t) {
      const Vec6 s = oracle::random_stretch(rng, 0.3);
      const MatX fd = oracle::fd_jacobian(
          [&](const VecX& x) { return VecX(gradient(Vec6(x), mat)); }, VecX(s));
      const MatX H = hessian(s, mat, /*project=*/false);
      const double err = (fd - H).norm() / (H.norm() + 1e-12);
      if (err > 1e-5)
        return bad(std::string(material_name(mat.model)) +
                   " hessian deviates from finite differences by " + num(err));
    }
  }
  return ok("3 models x 20 stretches, analytic hessians within 1e-5 of FD");
}

// ---------- rotation oracle ----------

CheckResult check_rotation_optimality(int matrices, int samples) {
  oracle::Rng rng(41 + seed_offset());
  std::normal_distribution<double> nrm(0.0, 1.0);
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < matrices; ++t) {
    Mat3 M;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M(i, j) = nrm(rng);
    const Mat3 R = polar_rotation(M);
    if ((R.transpose() * R - Mat3::Identity()).norm() > 1e-12 ||
        std::abs(R.determinant() - 1.0) > 1e-12)
      return bad("polar factor is not a proper rotation");
    const double margin = (R.transpose() * M).trace() -
                          oracle::best_sampled_objective(M, samples, rng);
    worst_margin = std::min(worst_margin, margin);
    if (margin < -1e-9)
      return bad("a sampled rotation beats the polar factor by " +
                 num(-margin));
  }
  return ok(std::to_string(matrices) + " matrices x " +
            std::to_string(samples) + " sampled rotations, worst margin " +
            num(worst_margin));
}

// ---------- saddle solve vs dense oracle ----------

struct DenseCompare {
  double err_dq = 0, err_l = 0, err_ds = 0;
  int cg_iters = 0;
};

DenseCompare dense_compare(ElementKind kind, MaterialModel model,
                           unsigned seed, bool flip_sign) {
  oracle::Rng rng(seed);
  SimMesh mesh = single_element(kind);
  MaterialParams mat = base_config(model, 1e5, 0.3, 1000).material;

  const int nv = mesh.num_vertices();
  const int T = mesh.num_elements();
  const VecX q = mesh.rest_vector() + random_vec(rng, 3 * nv, 0.05);
  VecX s(6 * T);
  std::vector<Mat3> R(T);
  for (int e = 0; e < T; ++e) {
    s.segment<6>(6 * e) = oracle::random_stretch(rng, 0.5);
    R[e] = oracle::random_rotation(rng);
  }
  const VecX a = random_vec(rng, 3 * nv, 0.01);
  const double h = 0.01;
  const VecX mass = lumped_mass(mesh, mat.rho);
  const VecX f_ext = random_vec(rng, 3 * nv, 0.1);
  const DofProjection proj = DofProjection::build({0}, nv);
  const double tik = 1e-6;

  const SpMat J_full = assemble_J(mesh);
  const SpMat J_sf = free_coupling(J_full, proj);
  const MaterialLinearization lin = linearize_materials(mesh, mat, s);
  const QuadraticModel model_q = build_quadratic_model(
      mesh, lin, J_full, J_sf, R, q, s, a, h, mass,
      VecX::Zero(3 * nv), f_ext, proj, mat.mu(), tik, flip_sign);
  const ConstantPreconditioner precond = factor_preconditioner(
      model_q.system.mass_over_h2, model_q.system.J, mat.mu(), mesh.volumes,
      tik);
  const GlobalStepResult got = global_step(model_q, precond, 1e-13, 2000);

  const oracle::DenseKktSolution want = oracle::dense_kkt_solve(
      mesh, mat, R, q, s, a, h, mass, f_ext, proj, tik);

  DenseCompare cmp;
  cmp.err_dq = rel_err(got.dq_free, want.dq_free);
  cmp.err_l = rel_err(got.l, want.l);
  cmp.err_ds = rel_err(got.ds, want.ds);
  cmp.cg_iters = got.cg.iterations;
  return cmp;
}

CheckResult check_saddle_matches_dense() {
  const bool flip = mutate_rhs_sign();
  double worst = 0;
  unsigned seed = 100 + seed_offset();
  for (ElementKind kind :
       {ElementKind::Tet, ElementKind::Tri, ElementKind::Rod})
    for (MaterialModel model : {MaterialModel::ARAP, MaterialModel::Corot,
                                MaterialModel::NeoHookean}) {
      const DenseCompare cmp = dense_compare(kind, model, seed++, flip);
      const double err = std::max({cmp.err_dq, cmp.err_l, cmp.err_ds});
      if (err > 1e-8)
        return bad(std::string(kind_name(kind)) + "/" + material_name(model) +
                   " saddle solution deviates from the dense factorization by " +
                   num(err));
      worst = std::max(worst, err);
    }
  return ok("3 element kinds x 3 models vs dense factorization, worst rel "
            "error " + num(worst));
}

CheckResult check_rhs_sign_sensitivity() {
  // the deliberately mutated rhs must visibly disagree with the dense oracle,
  // otherwise the dense cross-check has no teeth
  double smallest = std::numeric_limits<double>::infinity();
  unsigned seed = 200 + seed_offset();
  for (ElementKind kind :
       {ElementKind::Tet, ElementKind::Tri, ElementKind::Rod}) {
    const DenseCompare cmp =
        dense_compare(kind, MaterialModel::NeoHookean, seed++, true);
    // the saddle check trips on the largest component deviation
    smallest = std::min(smallest, std::max({cmp.err_dq, cmp.err_l, cmp.err_ds}));
  }
  if (smallest < 1e-4)
    return bad("flipping the rhs sign only moved the solution by " +
               num(smallest) + "; the dense cross-check cannot detect it");
  return ok("flipped-sign build deviates from the dense oracle by at least " +
            num(smallest));
}

CheckResult check_pcg_matches_dense_lu() {
  const SimMesh mesh = single_element(ElementKind::Tet);
  oracle::Rng rng(53 + seed_offset());
  MaterialParams mat = base_config(MaterialModel::Corot, 1e5, 0.3, 1000).material;
  const int nv = mesh.num_vertices();
  VecX s(6);
  s = oracle::random_stretch(rng, 0.5);
  std::vector<Mat3> R{oracle::random_rotation(rng)};
  const DofProjection proj = DofProjection::build({0}, nv);
  const SpMat J_full = assemble_J(mesh);
  const SpMat J_sf = free_coupling(J_full, proj);
  const MaterialLinearization lin = linearize_materials(mesh, mat, s);
  const QuadraticModel model = build_quadratic_model(
      mesh, lin, J_full, J_sf, R, mesh.rest_vector(), s,
      VecX::Zero(3 * nv), 0.01, lumped_mass(mesh, mat.rho),
      VecX::Zero(3 * nv), random_vec(rng, 3 * nv, 0.1), proj, mat.mu(), 1e-6);

  const int dim = model.system.dim();
  MatX A(dim, dim);
  for (int i = 0; i < dim; ++i)
    A.col(i) = model.system.apply(VecX::Unit(dim, i));
  const VecX want = Eigen::FullPivLU<MatX>(A).solve(model.rhs);

  const ConstantPreconditioner precond = factor_preconditioner(
      model.system.mass_over_h2, model.system.J, mat.mu(), mesh.volumes, 1e-6);
  const PcgResult got = pcg_saddle(model.system, model.rhs, precond, 1e-13, 2000);
  const double err = rel_err(got.x, want);
  if (err > 1e-8)
    return bad("iterative saddle solve deviates from dense LU by " + num(err));
  return ok("iterative solve matches dense LU, rel error " + num(err) + " in " +
            std::to_string(got.iterations) + " iterations");
}

// ---------- end-to-end references ----------

int tip_vertex(const SimMesh& mesh) {
  // free-end vertex closest to the beam axis
  double xmax = -1e30;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    xmax = std::max(xmax, mesh.rest_positions[v].x());
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : mesh.rest_positions) mean += p;
  mean /= mesh.num_vertices();
  int best = -1;
  double best_d = 1e30;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& p = mesh.rest_positions[v];
    if (p.x() < xmax - 1e-9) continue;
    const double d = (p.tail<2>() - mean.tail<2>()).norm();
    if (d < best_d) { best_d = d; best = v; }
  }
  return best;
}

CheckResult compare_with_newton(int nx, double len, double sec, double E,
                                int steps) {
  SimMesh mesh = box_tet_mesh(nx, 2, 2, len, sec, sec);
  SceneConfig cfg = base_config(MaterialModel::NeoHookean, E, 0.3, 1000);
  cfg.gravity = Vec3(0, -9.8, 0);
  cfg.substeps = 8;
  cfg.outer_iterations = 1;
  cfg.timestep = 0.01;
  PinGroup wall;
  wall.box_min = Vec3(-1e-6, -1e-6, -1e-6);
  wall.box_max = Vec3(1e-6, sec + 1e-6, sec + 1e-6);
  cfg.pins.push_back(wall);

  Simulation sim(mesh, cfg);
  for (int i = 0; i < steps; ++i) {
    sim.step();
    sim.reset_velocity();  // dynamic relaxation toward statics
  }

  const DofProjection& proj = sim.projection();
  VecX f_ext(3 * mesh.num_vertices());
  const VecX mass = lumped_mass(mesh, cfg.material.rho);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    f_ext.segment<3>(3 * v) = mass[3 * v] * cfg.gravity;
  const VecX q_ref =
      oracle::newton_static_solve(mesh, cfg.material, proj, f_ext);

  const int tip = tip_vertex(mesh);
  const double d_sim =
      sim.state().q[3 * tip + 1] - mesh.rest_positions[tip].y();
  const double d_ref = q_ref[3 * tip + 1] - mesh.rest_positions[tip].y();
  const double rel = std::abs(d_sim - d_ref) / std::abs(d_ref);
  if (!(std::abs(d_ref) > 1e-5))
    return bad("reference beam did not deflect; test setup is degenerate");
  if (rel > 0.05)
    return bad("tip deflection " + num(d_sim) + " vs displacement-Newton " +
               num(d_ref) + ", rel diff " + num(rel));
  return ok("tip deflection " + num(d_sim) + " vs displacement-Newton " +
            num(d_ref) + ", rel diff " + num(rel));
}

CheckResult check_relaxation_matches_newton() {
  return compare_with_newton(3, 0.3, 0.1, 2e6, 150);
}

// ---------- acceptance criteria ----------

CheckResult accept_rest_and_momentum() {
  // rest shape with no load must not drift
  {
    SimMesh mesh = box_tet_mesh(2, 2, 2, 0.2, 0.2, 0.2);
    SceneConfig cfg = base_config(MaterialModel::NeoHookean, 1e5, 0.3, 1000);
    cfg.substeps = 5;
    Simulation sim(mesh, cfg);
    for (int i = 0; i < 100; ++i) sim.step();
    const double drift =
        (sim.state().q - mesh.rest_vector()).lpNorm<Eigen::Infinity>();
    if (drift > 1e-8)
      return bad("rest configuration drifted by " + num(drift) +
                 " over 100 steps");
  }
  // unsupported body in a uniform field must fall rigidly
  SimMesh mesh = box_tet_mesh(2, 2, 2, 0.2, 0.2, 0.2);
  SceneConfig cfg = base_config(MaterialModel::Corot, 1e5, 0.3, 1000);
  cfg.gravity = Vec3(0, -9.8, 0);
  cfg.substeps = 5;
  Simulation sim(mesh, cfg);
  const int n = 50;
  for (int i = 0; i < n; ++i) sim.step();
  VecX expected = VecX::Zero(3 * mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    expected.segment<3>(3 * v) = n * cfg.timestep * cfg.gravity;
  const double err = rel_err(sim.velocity(), expected);
  if (err > 1e-6)
    return bad("free-fall velocity deviates from the exact impulse by " +
               num(err));
  return ok("100-step rest drift <= 1e-8; free-fall velocity matches the "
            "exact impulse, rel error " + num(err));
}

CheckResult accept_stretch_recovery() {
  // every vertex scripted to a fixed affine pose: the stretch/rotation
  // variables must converge to the polar factors of that map
  SimMesh mesh = single_element(ElementKind::Tet);
  Mat3 A;
  A << 1.25, 0.05, 0.0,
       0.05, 0.90, 0.02,
       0.00, 0.02, 1.10;
  const double ang = 15.0 * M_PI / 180.0;
  Mat3 Rz;
  Rz << std::cos(ang), -std::sin(ang), 0,
        std::sin(ang),  std::cos(ang), 0,
        0, 0, 1;
  A = (Rz * A).eval();

  SceneConfig cfg = base_config(MaterialModel::ARAP, 1e4, 0.3, 1000);
  cfg.substeps = 50;
  cfg.outer_iterations = 1;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    PinGroup g;
    g.vertices = {v};
    PinMotionKey key;
    key.translate = (A - Mat3::Identity()) * mesh.rest_positions[v];
    g.motion = {key};
    cfg.pins.push_back(g);
  }

  Simulation sim(mesh, cfg);
  for (int i = 0; i < 6; ++i) sim.step();

  const Mat3 F = mesh.deformation_gradient(sim.state().q, 0);
  const Mat3 R_ref = polar_rotation(F);
  const Mat3 S_ref = R_ref.transpose() * F;
  const double err_R = (sim.state().R[0] - R_ref).norm();
  const double err_S = (symmat(Vec6(sim.state().s)) - S_ref).norm();
  if ((F - A).norm() > 1e-10)
    return bad("scripted vertices did not reach the target affine map");
  if (err_R > 1e-5 || err_S > 1e-5)
    return bad("recovered factors deviate from the polar decomposition: |dR| = " +
               num(err_R) + ", |dS| = " + num(err_S));
  return ok("rotation/stretch variables match the polar factors: |dR| = " +
            num(err_R) + ", |dS| = " + num(err_S));
}

CheckResult accept_stiffness_range() {
  double rigidity = 0;
  for (double E : {1e6, 1e9}) {
    SimMesh mesh = box_tet_mesh(4, 4, 4, 0.25, 0.25, 0.25);
    SceneConfig cfg = base_config(MaterialModel::Corot, E, 0.45, 1000);
    cfg.gravity = Vec3(0, -9.8, 0);
    cfg.substeps = 15;
    cfg.timestep = 0.01;
    GroundPlane ground;
    ground.height = -0.15;
    ground.stiffness = 1e6;
    ground.damping = 2.0;
    cfg.ground = ground;
    Simulation sim(mesh, cfg);
    for (int i = 0; i < 300; ++i) sim.step();
    if (!sim.state().q.allFinite() || !sim.state().s.allFinite())
      return bad("drop at E = " + num(E) + " produced non-finite state");
    double bottom = 1e30;
    for (int v = 0; v < mesh.num_vertices(); ++v)
      bottom = std::min(bottom, sim.state().q[3 * v + 1]);
    if (bottom < ground.height - 0.01)
      return bad("body at E = " + num(E) + " sank " +
                 num(ground.height - bottom) + " below the ground plane");
    if (E > 1e8) {
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const Mat3 F = mesh.deformation_gradient(sim.state().q, e);
        rigidity = std::max(rigidity, (F - polar_rotation(F)).norm());
      }
      if (rigidity > 1e-2)
        return bad("stiff body strayed from rigidity: max |F - R| = " +
                   num(rigidity));
    }
  }
  return ok("drops at E = 1e6 and 1e9 stay finite and settle on the plane; "
            "stiff case max |F - R| = " + num(rigidity));
}

CheckResult accept_poisson_coupling() {
  auto contraction = [](MaterialModel model) {
    SimMesh mesh = grid_tri_mesh(12, 12, 1.0, 1.0);
    SceneConfig cfg = base_config(model, 1e5, 0.3, 1000);
    cfg.kind = ElementKind::Tri;
    cfg.substeps = 8;
    cfg.timestep = 0.01;
    auto edge = [&](double x0, double x1, double dx) {
      PinGroup g;
      g.box_min = Vec3(x0 - 1e-6, -1e-6, -1e-6);
      g.box_max = Vec3(x1 + 1e-6, 1e-6, 1.0 + 1e-6);
      PinMotionKey k0, k1;
      k1.time = 1.0;
      k1.translate = Vec3(dx, 0, 0);
      g.motion = {k0, k1};
      return g;
    };
    cfg.pins.push_back(edge(0.0, 0.0, -0.25));
    cfg.pins.push_back(edge(1.0, 1.0, +0.25));
    Simulation sim(mesh, cfg);
    for (int i = 0; i < 160; ++i) {
      sim.step();
      sim.reset_velocity();  // quasistatic pull
    }
    // lateral width across the middle third of the sheet
    double zmin = 1e30, zmax = -1e30;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const double rx = mesh.rest_positions[v].x();
      if (rx < 1.0 / 3 || rx > 2.0 / 3) continue;
      zmin = std::min(zmin, sim.state().q[3 * v + 2]);
      zmax = std::max(zmax, sim.state().q[3 * v + 2]);
    }
    return 1.0 - (zmax - zmin);  // rest width is 1
  };

  const double c_arap = contraction(MaterialModel::ARAP);
  const double c_nh = contraction(MaterialModel::NeoHookean);
  const double c_corot = contraction(MaterialModel::Corot);
  if (std::abs(c_arap) > 0.01)
    return bad("rotation-only model contracted laterally by " + num(c_arap));
  if (c_nh < 0.02 || c_corot < 0.02)
    return bad("volume-coupled models show no lateral contraction: nh = " +
               num(c_nh) + ", corot = " + num(c_corot));
  if (c_nh <= std::abs(c_arap) || c_corot <= std::abs(c_arap))
    return bad("volume-coupled contraction does not exceed the rotation-only "
               "model");
  return ok("lateral contraction arap = " + num(c_arap) + ", nh = " +
            num(c_nh) + ", corot = " + num(c_corot));
}

CheckResult accept_element_coverage() {
  const SimMesh tets = box_tet_mesh(3, 3, 3, 0.15, 0.15, 0.15);
  std::vector<SimMesh> meshes{tets, surface_of_tets(tets), edges_of_tets(tets)};
  for (const SimMesh& mesh : meshes) {
    SceneConfig cfg = base_config(MaterialModel::NeoHookean, 1e5, 0.3, 1000);
    cfg.kind = mesh.kind;
    cfg.gravity = Vec3(0, -9.8, 0);
    cfg.timestep = 0.005;
    cfg.substeps = 5;
    GroundPlane ground;
    ground.height = -0.05;
    ground.stiffness = 1e4;
    ground.damping = 1.0;
    cfg.ground = ground;
    Simulation sim(mesh, cfg);
    for (int i = 0; i < 200; ++i) sim.step();
    if (!sim.state().q.allFinite() || !sim.state().s.allFinite() ||
        !sim.state().l.allFinite())
      return bad(std::string(kind_name(mesh.kind)) +
                 " drop produced non-finite state");
    double bottom = 1e30;
    for (int v = 0; v < mesh.num_vertices(); ++v)
      bottom = std::min(bottom, sim.state().q[3 * v + 1]);
    if (bottom < ground.height - 0.02)
      return bad(std::string(kind_name(mesh.kind)) + " body fell through the "
                 "ground plane");
  }
  return ok("tet volume, shell surface, and rod network all run 200 contact "
            "steps with finite state");
}

CheckResult accept_static_equilibrium() {
  return compare_with_newton(6, 0.6, 0.2, 1e6, 300);
}

}  // namespace

void set_mutate_rhs_sign(bool flip) { g_mutate = flip; }
bool mutate_rhs_sign() { return g_mutate; }

void set_seed_offset(unsigned offset) { g_seed = offset; }
unsigned seed_offset() { return g_seed; }

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks = [] {
    std::vector<Check> c;
    auto add = [&](std::string name, std::string module,
                   std::function<CheckResult()> fn) {
      c.push_back({std::move(name), std::move(module), std::move(fn)});
    };
    add("kinematics.tensor_contractions", "kinematics",
        check_tensor_contractions);
    add("kinematics.coupling_matches_naive", "kinematics",
        check_coupling_matches_naive);
    add("kinematics.coupling_recovers_gradients", "kinematics",
        check_coupling_recovers_gradients);
    add("kinematics.stretch_block_matches_naive", "kinematics",
        check_stretch_block_matches_naive);
    add("materials.gradient_matches_fd", "materials", check_material_gradients);
    add("materials.hessian_matches_fd", "materials", check_material_hessians);
    add("rotation.procrustes_sampling", "rotation",
        [] { return check_rotation_optimality(50, 2000); });
    add("linsolve.pcg_matches_dense_lu", "linsolve", check_pcg_matches_dense_lu);
    add("solver.saddle_matches_dense", "solver", check_saddle_matches_dense);
    add("solver.rhs_sign_sensitivity", "solver", check_rhs_sign_sensitivity);
    add("solver.relaxation_matches_newton", "solver",
        check_relaxation_matches_newton);

    add("acceptance.01_gradient_operators", "acceptance",
        check_coupling_recovers_gradients);
    add("acceptance.02_material_derivatives", "acceptance", [] {
      CheckResult g = check_material_gradients();
      if (!g.pass) return g;
      return check_material_hessians();
    });
    add("acceptance.03_saddle_vs_dense", "acceptance",
        check_saddle_matches_dense);
    add("acceptance.04_rotation_optimality", "acceptance",
        [] { return check_rotation_optimality(100, 10000); });
    add("acceptance.05_rest_and_momentum", "acceptance",
        accept_rest_and_momentum);
    add("acceptance.06_stretch_recovery", "acceptance", accept_stretch_recovery);
    add("acceptance.07_stiffness_range", "acceptance", accept_stiffness_range);
    add("acceptance.08_poisson_coupling", "acceptance", accept_poisson_coupling);
    add("acceptance.09_element_coverage", "acceptance",
        accept_element_coverage);
    add("acceptance.10_static_equilibrium", "acceptance",
        accept_static_equilibrium);
    return c;
  }();
  return checks;
}

int run_checks(const std::string& filter, std::ostream& os) {
  int failures = 0, ran = 0;
  for (const Check& check : all_checks()) {
    if (!filter.empty() && check.name.find(filter) == std::string::npos)
      continue;
    ++ran;
    CheckResult result;
    try {
      result = check.fn();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    os << (result.pass ? "[PASS] " : "[FAIL] ") << check.name;
    if (!result.detail.empty()) os << " — " << result.detail;
    os << "\n";
    if (!result.pass) ++failures;
  }
  if (ran == 0) {
    os << "no checks match filter '" << filter << "'\n";
    return 1;
  }
  os << (failures == 0 ? "all " : "") << ran - failures << "/" << ran
     << " checks passed\n";
  return failures;
}

}  // namespace mixedfem::validation

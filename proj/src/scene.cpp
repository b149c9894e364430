#include "mixedfem/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mixedfem {

using nlohmann::json;

std::vector<int> PinGroup::resolve(const SimMesh& mesh) const {
  std::vector<int> out = vertices;
  for (int v : out)
    if (v < 0 || v >= mesh.num_vertices())
      throw std::out_of_range("pin references vertex " + std::to_string(v) +
                              " outside mesh");
  if (box_min && box_max) {
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const Vec3& p = mesh.rest_positions[v];
      if ((p.array() >= box_min->array()).all() &&
          (p.array() <= box_max->array()).all())
        out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Vec3 PinGroup::position_at(const Vec3& rest, const Vec3& centroid, double t) const {
  if (motion.empty()) return rest;
  PinMotionKey key;
  if (t <= motion.front().time) {
    key = motion.front();
  } else if (t >= motion.back().time) {
    key = motion.back();
  } else {
    for (size_t i = 0; i + 1 < motion.size(); ++i) {
      const auto& a = motion[i];
      const auto& b = motion[i + 1];
      if (t >= a.time && t <= b.time) {
        double w = (t - a.time) / std::max(b.time - a.time, 1e-300);
        key.translate = (1 - w) * a.translate + w * b.translate;
        key.axis = b.axis;
        key.degrees = (1 - w) * a.degrees + w * b.degrees;
        break;
      }
    }
  }
  Mat3 R = Eigen::AngleAxisd(key.degrees * M_PI / 180.0, key.axis.normalized())
               .toRotationMatrix();
  return centroid + R * (rest - centroid) + key.translate;
}

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& why) {
  throw std::invalid_argument("scene field '" + field + "': " + why);
}

Vec3 parse_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) schema_error(field, "expected 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

template <typename T>
T get_or(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    schema_error(field, "wrong type");
  }
}

ElementKind kind_from_name(const std::string& name) {
  if (name == "tet") return ElementKind::Tet;
  if (name == "tri") return ElementKind::Tri;
  if (name == "rod") return ElementKind::Rod;
  schema_error("mesh.kind", "must be one of tet|tri|rod, got '" + name + "'");
}

}  // namespace

SceneConfig parse_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scene parse error: ") + e.what());
  }

  SceneConfig cfg;
  if (!j.contains("mesh")) schema_error("mesh", "missing");
  const auto& jm = j["mesh"];
  cfg.mesh_path = get_or<std::string>(jm, "path", "");
  if (!jm.contains("kind")) schema_error("mesh.kind", "missing");
  cfg.kind = kind_from_name(jm["kind"].get<std::string>());

  if (!j.contains("material")) schema_error("material", "missing");
  const auto& jmat = j["material"];
  for (const char* req : {"Model", "rho", "E", "nu"})
    if (!jmat.contains(req)) schema_error(std::string("material.") + req, "missing");
  cfg.material.model = material_from_name(jmat["Model"].get<std::string>());
  cfg.material.rho = jmat["rho"].get<double>();
  cfg.material.youngs = jmat["E"].get<double>();
  cfg.material.poisson = jmat["nu"].get<double>();
  cfg.material.validate();

  cfg.timestep = get_or(j, "timestep", cfg.timestep);
  if (!(cfg.timestep > 0)) schema_error("timestep", "must be positive");
  cfg.substeps = get_or(j, "Substeps", cfg.substeps);
  cfg.outer_iterations = get_or(j, "outer_iterations", cfg.outer_iterations);
  if (cfg.substeps < 1 || cfg.outer_iterations < 1)
    schema_error("Substeps", "iteration budgets must be >= 1");
  if (j.contains("gravity")) cfg.gravity = parse_vec3(j["gravity"], "gravity");
  cfg.thickness = get_or(j, "thickness", cfg.thickness);
  cfg.cross_section = get_or(j, "cross_section", cfg.cross_section);

  if (j.contains("pins")) {
    if (!j["pins"].is_array()) schema_error("pins", "expected an array");
    for (const auto& jp : j["pins"]) {
      PinGroup g;
      if (jp.contains("vertices")) g.vertices = jp["vertices"].get<std::vector<int>>();
      if (jp.contains("box")) {
        g.box_min = parse_vec3(jp["box"].at("min"), "pins.box.min");
        g.box_max = parse_vec3(jp["box"].at("max"), "pins.box.max");
      }
      if (!jp.contains("vertices") && !jp.contains("box"))
        schema_error("pins", "group needs 'vertices' or 'box'");
      if (jp.contains("motion")) {
        for (const auto& jk : jp["motion"]) {
          PinMotionKey key;
          key.time = jk.at("time").get<double>();
          if (jk.contains("translate"))
            key.translate = parse_vec3(jk["translate"], "pins.motion.translate");
          if (jk.contains("axis")) key.axis = parse_vec3(jk["axis"], "pins.motion.axis");
          key.degrees = get_or(jk, "degrees", 0.0);
          g.motion.push_back(key);
        }
      }
      cfg.pins.push_back(std::move(g));
    }
  }

  if (j.contains("ground")) {
    GroundPlane gp;
    const auto& jg = j["ground"];
    gp.height = get_or(jg, "height", gp.height);
    gp.stiffness = get_or(jg, "stiffness", gp.stiffness);
    gp.damping = get_or(jg, "damping", gp.damping);
    if (gp.stiffness < 0) schema_error("ground.stiffness", "must be >= 0");
    cfg.ground = gp;
  }

  if (j.contains("solver")) {
    const auto& js = j["solver"];
    auto& s = cfg.solver;
    s.cg_tol = get_or(js, "cg_tol", s.cg_tol);
    s.cg_maxiter = get_or(js, "cg_maxiter", s.cg_maxiter);
    s.tikhonov = get_or(js, "tikhonov", s.tikhonov);
    s.fixed_iterations = get_or(js, "fixed_iterations", s.fixed_iterations);
    s.line_search = get_or(js, "line_search", s.line_search);
    s.tol_dq = get_or(js, "tol_dq", s.tol_dq);
    s.tol_constraint = get_or(js, "tol_constraint", s.tol_constraint);
    s.tol_rotation = get_or(js, "tol_rotation", s.tol_rotation);
    s.alpha0 = get_or(js, "alpha0", s.alpha0);
    s.alpha_growth = get_or(js, "alpha_growth", s.alpha_growth);
  }
  return cfg;
}

SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

DofProjection DofProjection::build(const std::vector<int>& pinned_vertices,
                                   int num_vertices) {
  DofProjection P;
  P.num_full = 3 * num_vertices;
  std::vector<bool> pinned(num_vertices, false);
  for (int v : pinned_vertices) {
    if (v < 0 || v >= num_vertices)
      throw std::out_of_range("pinned vertex " + std::to_string(v) + " out of range");
    pinned[v] = true;
  }
  P.free_of_full.assign(P.num_full, -1);
  for (int v = 0; v < num_vertices; ++v) {
    if (pinned[v]) continue;
    for (int a = 0; a < 3; ++a) {
      P.free_of_full[3 * v + a] = static_cast<int>(P.full_of_free.size());
      P.full_of_free.push_back(3 * v + a);
    }
  }
  return P;
}

VecX DofProjection::restrict(const VecX& full) const {
  VecX out(num_free());
  for (int i = 0; i < num_free(); ++i) out[i] = full[full_of_free[i]];
  return out;
}

VecX DofProjection::expand(const VecX& free, const VecX& base) const {
  VecX out = base;
  for (int i = 0; i < num_free(); ++i) out[full_of_free[i]] = free[i];
  return out;
}

SpMat DofProjection::selection() const {
  SpMat S(num_full, num_free());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(num_free());
  for (int i = 0; i < num_free(); ++i) trips.emplace_back(full_of_free[i], i, 1.0);
  S.setFromTriplets(trips.begin(), trips.end());
  return S;
}

VecX lumped_mass(const SimMesh& mesh, double rho) {
  if (!(rho > 0)) throw std::invalid_argument("density must be positive");
  VecX M = VecX::Zero(3 * mesh.num_vertices());
  const int n = mesh.verts_per_element();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double share = rho * mesh.volumes[e] / n;
    for (int c = 0; c < n; ++c)
      M.segment<3>(3 * mesh.elements[e][c]).array() += share;
  }
  return M;
}

VecX contact_force(const VecX& q, const VecX& velocity, const GroundPlane& g) {
  VecX f = VecX::Zero(q.size());
  for (int v = 0; v < q.size() / 3; ++v) {
    const double depth = g.height - q[3 * v + 1];
    if (depth <= 0) continue;
    f[3 * v + 1] = g.stiffness * depth - g.damping * velocity[3 * v + 1];
  }
  return f;
}

VecX contact_stiffness_diag(const VecX& q, const GroundPlane& g) {
  VecX k = VecX::Zero(q.size());
  for (int v = 0; v < q.size() / 3; ++v)
    if (q[3 * v + 1] < g.height) k[3 * v + 1] = g.stiffness;
  return k;
}

double contact_energy(const VecX& q, const GroundPlane& g) {
  double E = 0.0;
  for (int v = 0; v < q.size() / 3; ++v) {
    const double depth = g.height - q[3 * v + 1];
    if (depth > 0) E += 0.5 * g.stiffness * depth * depth;
  }
  return E;
}

}  // namespace mixedfem

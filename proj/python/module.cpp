#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mixedfem/materials.hpp"
#include "mixedfem/mesh.hpp"
#include "mixedfem/mesh_gen.hpp"
#include "mixedfem/rotation.hpp"
#include "mixedfem/scene.hpp"
#include "mixedfem/solver.hpp"
#include "mixedfem/tensors.hpp"

namespace py = pybind11;
using namespace mixedfem;

PYBIND11_MODULE(_core, m) {
  m.doc() = "mixed stretch/rotation implicit FEM for volumes, shells and rods";

  py::enum_<ElementKind>(m, "ElementKind")
      .value("Tet", ElementKind::Tet)
      .value("Tri", ElementKind::Tri)
      .value("Rod", ElementKind::Rod);

  py::enum_<MaterialModel>(m, "MaterialModel")
      .value("ARAP", MaterialModel::ARAP)
      .value("Corot", MaterialModel::Corot)
      .value("NeoHookean", MaterialModel::NeoHookean);

  py::register_exception<NonPhysicalStretch>(m, "NonPhysicalStretch");

  py::class_<MaterialParams>(m, "MaterialParams")
      .def(py::init([](const std::string& model, double rho, double E,
                       double nu) {
             MaterialParams p;
             p.model = material_from_name(model);
             p.rho = rho;
             p.youngs = E;
             p.poisson = nu;
             p.validate();
             return p;
           }),
           py::arg("model") = "neohookean", py::arg("rho") = 1e3,
           py::arg("E") = 1e5, py::arg("nu") = 0.45)
      .def_readwrite("model", &MaterialParams::model)
      .def_readwrite("rho", &MaterialParams::rho)
      .def_readwrite("E", &MaterialParams::youngs)
      .def_readwrite("nu", &MaterialParams::poisson)
      .def("mu", &MaterialParams::mu)
      .def("lam", &MaterialParams::lambda);

  py::class_<SimMesh>(m, "SimMesh")
      .def_property_readonly("num_vertices", &SimMesh::num_vertices)
      .def_property_readonly("num_elements", &SimMesh::num_elements)
      .def_property_readonly("kind", [](const SimMesh& s) { return s.kind; })
      .def_property_readonly("volumes",
                             [](const SimMesh& s) { return s.volumes; })
      .def_property_readonly(
          "rest_positions",
          [](const SimMesh& s) {
            MatX P(s.num_vertices(), 3);
            for (int v = 0; v < s.num_vertices(); ++v)
              P.row(v) = s.rest_positions[v].transpose();
            return P;
          })
      .def_property_readonly(
          "elements",
          [](const SimMesh& s) {
            const int n = s.verts_per_element();
            Eigen::MatrixXi E(s.num_elements(), n);
            for (int e = 0; e < s.num_elements(); ++e)
              for (int c = 0; c < n; ++c) E(e, c) = s.elements[e][c];
            return E;
          })
      .def("deformation_gradient", &SimMesh::deformation_gradient,
           py::arg("q"), py::arg("element"));

  m.def("load_mesh", &load_mesh, py::arg("path"), py::arg("kind"),
        py::arg("thickness") = 1e-3, py::arg("cross_section") = 1e-6);
  m.def("box_tet_mesh", &box_tet_mesh, py::arg("nx"), py::arg("ny"),
        py::arg("nz"), py::arg("sx"), py::arg("sy"), py::arg("sz"));
  m.def("grid_tri_mesh", &grid_tri_mesh, py::arg("nx"), py::arg("nz"),
        py::arg("sx"), py::arg("sz"), py::arg("thickness") = 1e-3);
  m.def("chain_rod_mesh", &chain_rod_mesh, py::arg("segments"),
        py::arg("length"), py::arg("cross_section") = 1e-6);
  m.def("surface_of_tets", &surface_of_tets, py::arg("tets"),
        py::arg("thickness") = 1e-3);
  m.def("edges_of_tets", &edges_of_tets, py::arg("tets"),
        py::arg("cross_section") = 1e-6);

  m.def("energy", &energy, py::arg("s"), py::arg("params"));
  m.def("gradient", &gradient, py::arg("s"), py::arg("params"));
  m.def("hessian", &hessian, py::arg("s"), py::arg("params"),
        py::arg("project") = true);

  m.def("polar_rotation", &polar_rotation, py::arg("M"));
  m.def("symmat", [](const Vec6& s) { return symmat(s); }, py::arg("s"));
  m.def("sym_to_vec", [](const Mat3& S) { return sym_to_vec(S); },
        py::arg("S"));

  m.def("parse_scene", &parse_scene, py::arg("json_text"));
  m.def("load_scene", &load_scene, py::arg("path"));
  m.def("lumped_mass", &lumped_mass, py::arg("mesh"), py::arg("rho"));

  py::class_<SceneConfig>(m, "SceneConfig")
      .def(py::init<>())
      .def_readwrite("kind", &SceneConfig::kind)
      .def_readwrite("material", &SceneConfig::material)
      .def_readwrite("timestep", &SceneConfig::timestep)
      .def_readwrite("substeps", &SceneConfig::substeps)
      .def_readwrite("outer_iterations", &SceneConfig::outer_iterations)
      .def_property(
          "gravity", [](const SceneConfig& c) { return c.gravity; },
          [](SceneConfig& c, const Vec3& g) { c.gravity = g; });

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<SimMesh, SceneConfig>(), py::arg("mesh"),
           py::arg("config"))
      .def("step", &Simulation::step)
      .def("reset_velocity", &Simulation::reset_velocity)
      .def_property_readonly("q",
                             [](const Simulation& s) { return s.state().q; })
      .def_property_readonly("s",
                             [](const Simulation& s) { return s.state().s; })
      .def_property_readonly("l",
                             [](const Simulation& s) { return s.state().l; })
      .def_property_readonly(
          "R", [](const Simulation& s) { return s.state().R; })
      .def_property_readonly("velocity", &Simulation::velocity)
      .def_property_readonly("time", &Simulation::time)
      .def_property_readonly("mass", &Simulation::mass);
}

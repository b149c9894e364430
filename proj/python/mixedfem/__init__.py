"""Mixed stretch/rotation implicit FEM for volumes, shells and rods."""

from ._core import (  # noqa: F401
    ElementKind,
    MaterialModel,
    MaterialParams,
    NonPhysicalStretch,
    SceneConfig,
    SimMesh,
    Simulation,
    box_tet_mesh,
    chain_rod_mesh,
    edges_of_tets,
    energy,
    gradient,
    grid_tri_mesh,
    hessian,
    load_mesh,
    load_scene,
    lumped_mass,
    parse_scene,
    polar_rotation,
    surface_of_tets,
    sym_to_vec,
    symmat,
)

__all__ = [
    "ElementKind",
    "MaterialModel",
    "MaterialParams",
    "NonPhysicalStretch",
    "SceneConfig",
    "SimMesh",
    "Simulation",
    "box_tet_mesh",
    "chain_rod_mesh",
    "edges_of_tets",
    "energy",
    "gradient",
    "grid_tri_mesh",
    "hessian",
    "load_mesh",
    "load_scene",
    "lumped_mass",
    "parse_scene",
    "polar_rotation",
    "surface_of_tets",
    "sym_to_vec",
    "symmat",
]

"""Smoke tests for the python bindings.

Usage: python_smoke_test.py <scenes-dir>   (mixedfem must be importable)
"""

import sys
from pathlib import Path

import numpy as np

import mixedfem as mf

SCENES = Path(sys.argv[1]).resolve()

failures = 0


def check(name, cond, detail=""):
    global failures
    status = "PASS" if cond else "FAIL"
    print(f"[{status}] python.{name}" + (f" — {detail}" if detail else ""))
    if not cond:
        failures += 1


# mesh generation and loading
mesh = mf.box_tet_mesh(2, 2, 2, 0.2, 0.2, 0.2)
check("generator", mesh.num_vertices == 27 and mesh.num_elements == 48)
loaded = mf.load_mesh(str(SCENES / "meshes" / "cube.node"), mf.ElementKind.Tet)
check("load_node_ele", loaded.num_vertices == 64)
cloth = mf.load_mesh(str(SCENES / "meshes" / "square.obj"), mf.ElementKind.Tri)
check("load_obj", cloth.kind == mf.ElementKind.Tri and cloth.num_elements > 0)

# material derivatives against a quick finite difference
p = mf.MaterialParams("neohookean", rho=1000, E=1e5, nu=0.3)
s = np.array([1.1, 0.9, 1.05, 0.04, -0.02, 0.03])
g = mf.gradient(s, p)
h = 1e-6
fd = np.array([
    (mf.energy(s + h * np.eye(6)[i], p) - mf.energy(s - h * np.eye(6)[i], p))
    / (2 * h)
    for i in range(6)
])
check("gradient_fd", np.allclose(g, fd, rtol=1e-4), f"max dev {np.abs(g - fd).max():.2e}")
check("hessian_shape", mf.hessian(s, p).shape == (6, 6))

# domain guard surfaces as the dedicated exception
try:
    mf.energy(np.array([-1.0, 1, 1, 0, 0, 0]), p)
    check("nonphysical_stretch", False, "no exception raised")
except mf.NonPhysicalStretch:
    check("nonphysical_stretch", True)

# rotation extraction
R0, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(3, 3)))
if np.linalg.det(R0) < 0:
    R0[:, 0] *= -1
M = R0 @ np.diag([3.0, 2.0, 1.0])
check("polar_rotation", np.allclose(mf.polar_rotation(M), R0, atol=1e-10))
check("symmat_roundtrip",
      np.allclose(mf.sym_to_vec(mf.symmat(s)), s))

# scene parsing with the verbatim material keys
cfg = mf.parse_scene(
    '{"mesh":{"path":"x","kind":"tet"},'
    '"material":{"Model":"arap","rho":500,"E":2e4,"nu":0.3},'
    '"timestep":0.01,"Substeps":4}'
)
check("parse_scene", cfg.substeps == 4 and cfg.material.rho == 500)

# lumped mass bookkeeping
mass = mf.lumped_mass(mesh, 1000.0)
check("lumped_mass_total",
      abs(mass.sum() / 3 - 1000.0 * sum(mesh.volumes)) < 1e-9)

# a short simulation: free fall matches the analytic velocity change
cfg = mf.SceneConfig()
cfg.material = p
cfg.timestep = 0.01
cfg.substeps = 3
cfg.gravity = np.array([0.0, -9.8, 0.0])
sim = mf.Simulation(mesh, cfg)
for _ in range(10):
    sim.step()
vy = sim.velocity.reshape(-1, 3)[:, 1]
check("free_fall", np.allclose(vy, -9.8 * sim.time, rtol=1e-9),
      f"mean vy {vy.mean():.6f}, expected {-9.8 * sim.time:.6f}")
check("state_shapes",
      sim.q.shape == (3 * mesh.num_vertices,)
      and sim.s.shape == (6 * mesh.num_elements,)
      and sim.l.shape == (9 * mesh.num_elements,)
      and len(sim.R) == mesh.num_elements)

print(f"{failures} failures")
sys.exit(1 if failures else 0)

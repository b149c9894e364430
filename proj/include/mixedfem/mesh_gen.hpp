#pragma once

#include "mixedfem/mesh.hpp"

namespace mixedfem {

// Axis-aligned box [0,sx]x[0,sy]x[0,sz], nx*ny*nz cells, 6 tets per cell.
SimMesh box_tet_mesh(int nx, int ny, int nz, double sx, double sy, double sz);

// Square cloth grid in the y=0 plane spanning [0,sx]x[0,sz].
SimMesh grid_tri_mesh(int nx, int nz, double sx, double sz,
                      double thickness = 1e-3);

// Straight chain of rod segments along +x starting at the origin.
SimMesh chain_rod_mesh(int segments, double length, double cross_section = 1e-6);

// Derive a surface shell / edge network from a tet mesh. The shell keeps
// only vertices on the boundary so every vertex carries mass; the edge
// network reuses all tet vertices.
SimMesh surface_of_tets(const SimMesh& tets, double thickness = 1e-3);
SimMesh edges_of_tets(const SimMesh& tets, double cross_section = 1e-6);

}  // namespace mixedfem

#pragma once

#include <string>
#include <vector>

#include "mixedfem/solver.hpp"

namespace mixedfem {

inline constexpr const char* kStatsHeader =
    "step,substep,assembly_ms,kkt_solve_ms,rotation_ms,cg_iters,cg_residual,"
    "constraint_residual,energy";

void write_stats_csv(const std::string& path,
                     const std::vector<SubstepStats>& rows);

}  // namespace mixedfem

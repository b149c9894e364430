#include "mixedfem/stats.hpp"

#include <fstream>
#include <stdexcept>

namespace mixedfem {

void write_stats_csv(const std::string& path,
                     const std::vector<SubstepStats>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << kStatsHeader << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << r.substep << ',' << r.assembly_ms << ','
        << r.kkt_solve_ms << ',' << r.rotation_ms << ',' << r.cg_iters << ','
        << r.cg_residual << ',' << r.constraint_residual << ',' << r.energy
        << '\n';
  }
}

}  // namespace mixedfem

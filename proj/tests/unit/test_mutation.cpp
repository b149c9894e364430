#include <doctest.h>

#include <sstream>

#include "validation/registry.hpp"

// The self-check suite must actually be able to fail: building the saddle
// right-hand side with a flipped sign has to trip the dense cross-check.
TEST_CASE("flipped rhs sign is caught by the dense oracle") {
  std::ostringstream sink;
  mixedfem::validation::set_mutate_rhs_sign(true);
  const int failures =
      mixedfem::validation::run_checks("saddle_matches_dense", sink);
  mixedfem::validation::set_mutate_rhs_sign(false);
  CHECK(failures >= 1);

  // and the pristine build passes the same check
  std::ostringstream sink2;
  CHECK(mixedfem::validation::run_checks("saddle_matches_dense", sink2) == 0);
}

// Drive the first Dirichlet mode on [-2, 2] to rest with a control acting on
// (-1, 1), then print the defect history.
#include <cstdio>

#include "kdvb/kdvb.hpp"

int main() {
  using namespace kdvb;
  ControlProblem p;
  p.grid = build_grid(2.0, 100);
  p.T = 1.0;
  p.nt = 100;
  p.omega = {-1.0, 1.0};
  p.u0 = dirichlet_mode(p.grid, 1).values;
  const ControlResult r = null_control(p);
  std::printf("iterations %d, endpoint defect %.3e, control norm %.3e\n", r.iterations, r.endpoint_error,
              r.control_norm);
  for (std::size_t k = 0; k < r.defect_history.size(); k += 20) std::printf("%zu %.3e\n", k, r.defect_history[k]);
}

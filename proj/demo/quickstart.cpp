// Free decay of the first Dirichlet mode, printed as (t, ||u||).
#include <cstdio>

#include "kdvb/evolution.hpp"

int main() {
  using namespace kdvb;
  auto g = build_grid(1.0, 128);
  const auto A = build_operator(g, OperatorKind::Forward);
  const Trajectory tr = evolve(A, dirichlet_mode(g, 1), 0.0, 1.0, 16);
  for (int k = 0; k <= tr.steps(); ++k) std::printf("%.4f %.6e\n", tr.time(k), tr.norms()[k]);
}

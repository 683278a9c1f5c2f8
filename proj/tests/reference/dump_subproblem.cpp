// Writes one lowered subproblem in the text dump format and prints the
// embedded solver's optimal objective, for comparison by cross_solve.py.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "secrsma/sca.hpp"

using namespace secrsma;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: dump_subproblem <out-file>\n";
    return 2;
  }
  const double power = db_to_linear(20.0);
  const auto spec = SecrecySpec::uniform(2, 0.1);
  ScaOptions opt;
  // first seed whose starting point already meets the thresholds, so the
  // dumped problem is the plain first iteration rather than a restoration step
  for (std::uint64_t seed = 1; seed < 1000; ++seed) {
    const auto H = random_channels(2, 4, seed);
    const auto st = initialize(H, power, 0.5, spec.weights);
    const auto rs = compute_sinrs(H, st.P, 1.0).rates.secrecy;
    if (rs.minCoeff() <= 0.1) continue;
    auto sub = build_subproblem(st, H, spec, power, opt);
    std::ofstream os(argv[1]);
    sub.problem.dump(os);
    const auto out = conic::solve(sub.problem);
    if (!out.ok()) {
      std::cerr << "embedded solve failed: " << out.message << "\n";
      return 1;
    }
    std::printf("%d %.12f\n", static_cast<int>(seed), out.objective);
    return 0;
  }
  std::cerr << "no suitable seed\n";
  return 1;
}

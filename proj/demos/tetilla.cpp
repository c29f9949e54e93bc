// The quadratic star sum under semicircular and Rademacher inputs: the first
// has fourth moment 5/2 at every N, the second approaches the semicircular 2.

#include <cstdio>

#include "freeinv/homsum.hpp"
#include "freeinv/laws.hpp"

int main() {
  using namespace freeinv;
  std::printf("%4s %20s %20s\n", "N", "semicircular", "rademacher");
  for (int N : {2, 4, 8, 16, 32}) {
    const auto f = quadratic_star(N);
    const double s = qn_moment(f, Assignment::iid(N, Law::semicircular()), 4);
    const double r = qn_moment(f, Assignment::iid(N, Law::rademacher()), 4);
    std::printf("%4d %20.17g %20.17g\n", N, s, r);
  }
}

// Free central limit theorem for the normalized linear sum of Rademacher
// variables, with the Lindeberg replacement steps towards semicircular inputs.

#include <cstdio>

#include "freeinv/harness.hpp"

int main() {
  using namespace freeinv;
  const int N = 8;
  const auto f = constant_linear(N);
  const auto x = Assignment::iid(N, Law::rademacher());
  const auto y = Assignment::iid(N, Law::semicircular());
  for (unsigned m : {2U, 4U, 6U})
    std::printf("m = %u: rademacher %.17g, semicircular %.17g\n", m, qn_moment(f, x, m), qn_moment(f, y, m));

  const auto t = lindeberg_telescope(f, x, y, 4);
  std::printf("replacement steps for m = 4:\n");
  for (std::size_t i = 0; i < t.steps.size(); ++i) std::printf("  i = %zu: %.17g\n", i + 1, t.steps[i]);
  std::printf("sum %.17g, gap %.17g\n", t.sum(), t.moment_x - t.moment_y);
}

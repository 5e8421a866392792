// Standalone gate run by ctest before any convergence test.
#include "support/support.hpp"

#include <iostream>

int main() {
  using namespace dpshdg;
  bool ok = true;
  for (const UniformParams& p : {example1_params(), UniformParams{2.0, 0.5, 3.0, 0.9, 1.5}}) {
    for (const auto& c : testing::derivative_oracle(example1(p).exact, 100, 2024)) {
      const bool pass = c.max_error <= 1e-7;
      ok = ok && pass;
      std::cout << (pass ? "ok   " : "FAIL ") << c.name << " max relative error " << c.max_error << '\n';
    }
  }
  return ok ? 0 : 1;
}

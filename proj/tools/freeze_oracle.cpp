// Recomputes the brute-force oracle values of the pair suites and prints them
// in the frozen-value format read by the tests. With --hat only the 2x2 hat
// semi-norm is computed.
#include "oracle.hpp"
#include "pair_suite.hpp"

#include <cstdio>
#include <cstring>

namespace {

int failed = 0;

double run(const std::string& name, const mortar::Panel& P, const mortar::Panel& Q, int exponent,
           const mortar::Poly2& p, const mortar::Poly2& q, bool print = true) {
  auto r = oracle::pair_integral(P, Q, exponent, p, q, 1e-11, 1, 6);
  if (print) std::printf("%s %.17g %.3g\n", name.c_str(), r.value, r.error);
  std::fflush(stdout);
  if (!r.converged) {
    std::fprintf(stderr, "%s: not converged (error %.3g)\n", name.c_str(), r.error);
    ++failed;
  }
  return r.value;
}

}  // namespace

int main(int argc, char** argv) {
  const bool hat_only = argc > 1 && std::strcmp(argv[1], "--hat") == 0;
  std::printf("# name value error (oracle, 1/|x-y| without 1/4pi, or (p-q)^2/|x-y|^3)\n");
  if (!hat_only) {
    auto all = suite::single_layer_cases();
    for (auto& c : suite::slobodeckij_cases()) all.push_back(c);
    for (const auto& c : all) run(c.name, c.P, c.Q, c.exponent, c.p, c.q);
  }
  // The hat is invariant under the symmetries of the square: the 16 ordered
  // element pairs are 4 identical, 8 edge-adjacent and 4 vertex-adjacent copies.
  auto h = suite::hat_2x2_elements();
  double id = run("slob_hat_id", h[0].first, h[0].first, -3, h[0].second, h[0].second);
  double edge = run("slob_hat_edge", h[0].first, h[1].first, -3, h[0].second, h[1].second);
  double vert = run("slob_hat_vert", h[0].first, h[2].first, -3, h[0].second, h[2].second);
  std::printf("slob_hat_2x2 %.17g 0\n", 4 * id + 8 * edge + 4 * vert);
  // a(phi, phi): the same three copies of grad phi . grad phi / (4 pi |x-y|)
  double g = 0;
  const double copies[3] = {4, 8, 4};
  for (int k = 0; k < 3; ++k) {
    const auto& [P, p] = h[0];
    const auto& [Q, q] = h[k];
    for (int comp = 0; comp < 2; ++comp) {
      // derivatives of polynomials with degree <= 1 per variable
      mortar::Poly2 dp, dq;
      for (int i = 0; i < 2; ++i) {
        if (comp == 0) dp.c(0, i) = p.c(1, i), dq.c(0, i) = q.c(1, i);
        else dp.c(i, 0) = p.c(i, 1), dq.c(i, 0) = q.c(i, 1);
      }
      g += copies[k] * run("grad_hat_" + std::to_string(k) + "_" + std::to_string(comp), P, Q, -1, dp, dq);
    }
  }
  std::printf("a_hat_2x2 %.17g 0\n", g * 0.079577471545947667884441881686257181);
  return failed ? 1 : 0;
}

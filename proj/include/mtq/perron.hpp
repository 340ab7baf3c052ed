#pragma once

#include "mtq/core.hpp"

namespace mtq {

struct RadiusOptions {
  double tol = 1e-13;   // relative Collatz-Wielandt gap
  int max_iter = 100000;
};

// Spectral radius of a nonnegative matrix. Reducible inputs are split
// into strongly connected blocks; each block is handled by shifted power
// iteration with repeated squaring. 2x2 inputs use the closed form.
double spectral_radius(const Mat& M, const RadiusOptions& opt = {});
double spectral_radius_2x2(double a, double b, double c, double d);

struct PerronResult {
  Vec right, left;  // positive, each normalized to sum 1
  double radius = 0.0;
  double residual = 0.0;  // max(|Mv - rho v|_inf, |u^T M - rho u^T|_inf)
};

bool is_irreducible(const Mat& M);
// Throws InputError on reducible input.
PerronResult perron_vectors(const Mat& M, const RadiusOptions& opt = {});

// Strongly connected components (Tarjan); comp[v] is the component id.
std::vector<int> scc_ids(const Mat& M, int* count = nullptr);

}  // namespace mtq

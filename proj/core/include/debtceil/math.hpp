#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace debtceil {

double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail P(N(0,1) > x), accurate far into the tail.
double normal_ccdf(double x);
/// Inverse of normal_cdf on (0,1) (Wichura's PPND16 rational approximation).
double inv_normal_cdf(double p);

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadRule gauss_legendre(int n);
/// Gauss-Hermite rule for weight e^{-x^2} on (-inf, inf).
QuadRule gauss_hermite(int n);

/// L2 projection onto nondecreasing sequences (pool adjacent violators).
void isotonic_nondecreasing(std::vector<double>& y);

/// Brent root bracketing [a, b] with fa = f(a), fb = f(b) of opposite sign.
double brent_root(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                  double xtol, int max_iter = 128);

/// x - (3 - 4 e^{-x} + e^{-2x})/2, stable for small x (series) and large x.
/// Var[int_0^t Y] = sigma^2 * ou_var_int_shape(theta t) / theta^3.
double ou_var_int_shape(double x);

struct ParallelOptions {
    int max_threads = 0;  // 0 = hardware concurrency
};

/// Chunked parallel loop over [0, n). Results must not depend on the split.
void parallel_for(std::size_t n, int max_threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace debtceil

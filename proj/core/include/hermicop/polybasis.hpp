#pragma once

#include <cstdint>
#include <vector>

namespace hermicop {

/// Degrees above this erode double precision through factorial scaling.
inline constexpr int kMaxHermiteDegree = 16;

/// Probabilists' Hermite polynomial He_n(x) by the three-term recurrence
/// He_{n+1}(x) = x He_n(x) - n He_{n-1}(x).
double hermite(int n, double x);

/// Orthonormal version He_n(x) / sqrt(n!), unit norm under the standard
/// normal weight.
double hermite_orthonormal(int n, double x);

/// 2D tensor basis element: product of orthonormal polynomials in rotated
/// coordinates, degree split (i, n-i). Throws std::out_of_range unless
/// 0 <= i <= n.
double tensor_basis_2d(int n, int i, double v1, double v2);

/// Coefficients c_k of the shift identity
///   He_i(x + shift)/sqrt(i!) = sum_k c_k He_k(x)/sqrt(k!),
///   c_k = sqrt(i!/k!) shift^(i-k) / (i-k)!.
/// Returned vector has length i+1, index k.
std::vector<double> hermite_shift_expand(int i, double shift);

/// Integral of the orthonormal polynomial against a shifted standard normal
/// density: c^i / sqrt(i!).
double shifted_gaussian_moment(int i, double c);

/// Exact integer coefficient table for He_0 .. He_max_degree.
/// Row n holds coefficients of x^0 .. x^n; leading coefficient is 1.
struct HermiteTable {
  int max_degree = 0;
  std::vector<std::vector<std::int64_t>> rows;

  static HermiteTable build(int max_degree);
  double evaluate(int n, double x) const;
};

/// Symmetric factorization of the 2x2 correlation matrix [[1,rho],[rho,1]]:
///   Gamma = [[a1, -a2], [a1, a2]],  Gamma^-1 = [[b1, b1], [-b2, b2]],
/// with a1 = sqrt((1+rho)/2), a2 = sqrt((1-rho)/2), b_i = 1/(2 a_i).
struct RotationFactors {
  double rho = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;

  // x = Gamma v
  void to_x(double v1, double v2, double& x1, double& x2) const {
    x1 = alpha1 * v1 - alpha2 * v2;
    x2 = alpha1 * v1 + alpha2 * v2;
  }
  // v = Gamma^-1 x
  void to_v(double x1, double x2, double& v1, double& v2) const {
    v1 = beta1 * (x1 + x2);
    v2 = beta2 * (x2 - x1);
  }
};

/// Guard band: |rho| <= 1 - 1e-6 keeps Gamma^-1 bounded.
/// Throws std::domain_error outside it.
RotationFactors rotation_factors(double rho);

}  // namespace hermicop

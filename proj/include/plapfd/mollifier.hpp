#pragma once

namespace plapfd {

/// Bump profile tau(r) = exp(-1/(1-r^2)) on [0,1), zero for r >= 1.
double profile_tau(double r);
/// tau'(r) = -2r/(1-r^2)^2 tau(r).
double profile_tau_d1(double r);
/// tau''(r) = (6r^4-2)/(1-r^2)^4 tau(r).
double profile_tau_d2(double r);

/// Constants of the radial mollifier rho = (M/|S^{d-1}|) tau(|x|):
///
///   M  = (int_0^1 tau r^(d-1) dr)^-1
///   K1 = M int_0^1 |tau'| r^(d-1) dr
///   K2 = M int_0^1 (|tau'|/r + |tau''|) r^(d-1) dr
///
/// quad_error_estimate bounds the propagated absolute quadrature error of all three.
struct MollifierConstants {
  int d;
  double M_moll;
  double K1;
  double K2;
  double quad_error_estimate;
};

/// Computes the constants for d in {1, 2, 3} by adaptive Gauss-Kronrod
/// quadrature on [0, 1 - 1e-12]; throws NumericalError if the error estimate
/// exceeds 1e-8.
MollifierConstants mollifier_constants(int d);

/// Checks ||a+b|^(p-2)(a+b) - |a|^(p-2)a| <= (p-1) max(|a|,|a+b|)^(p-2) |b|
/// up to a relative slack of 1e-12.
bool check_jp_taylor_bound(double a, double b, double p);

}  // namespace plapfd

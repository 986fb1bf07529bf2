#pragma once

namespace bch {

/// Complete elliptic integral of the first kind K(k), modulus k in [0, 1).
/// Arithmetic-geometric mean; relative accuracy ~1e-15.
double ellip_k(double k);

/// K expressed through the complementary modulus k' = sqrt(1 - k^2). Use
/// this near k -> 1 where forming 1 - k^2 from k loses digits.
double ellip_k_complementary(double kp);

struct JacobiValues {
    double sn;
    double cn;
    double dn;
};

/// Jacobi elliptic functions sn, cn, dn of argument u and modulus k in
/// [0, 1], by descending Landen transformation (AGM). k == 1 gives the
/// hyperbolic limits tanh, sech, sech.
JacobiValues jacobi(double u, double k);

/// As jacobi(u, k) with the complementary modulus supplied alongside k.
JacobiValues jacobi(double u, double k, double kp);

double jacobi_sn(double u, double k);

} // namespace bch

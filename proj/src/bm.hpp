#pragma once
// Banach-Mazur distance estimates and the almost-isometric gluing that embeds
// two spaces into a common superspace with controlled openings.
#include <string>

#include "operator_opening.hpp"

namespace gapkit {

struct BmResult {
    double upper = kInf;  // certified upper bound on d(Y,Z); infinite marker on dim mismatch
    Mat T;                // best map found, domain coords -> codomain coords
};

// Upper bound on d(Y,Z) = inf ||T|| ||T^{-1}|| by seeded multistart over the
// k x k matrix entries; dims must match and be <= 4.
BmResult bm_upper(const Space& Y, const Space& Z, const ComputeCfg& cfg = {});

struct Prop61Report {
    bool applicable = false;  // needs r0(Y,Z) upper < 1 with a witness
    double u = 1.0;           // r0(Y,Z) certified upper
    double d_upper = kInf;    // bm_upper between the induced spaces
    double direct = kInf;     // ||C|_Y|| * ||(C|_Y)^{-1}|| from the witness
    double rhs = 0.0;         // (1+u)/(1-u) + tol
    bool ok = false;
};

Prop61Report prop61_check(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

struct Prop62Report {
    Space glued;
    Subspace imY, imZ;
    double u_inv = 1.0;        // certified ||U^{-1}|| after rescaling ||U|| = 1
    double bound_val = 0.0;    // u_inv - 1, the advertised opening bound
    double omega_lo = 0.0;     // certified lower end of Omega(imY, imZ)
    double omega_hi = 0.0;
    double r0_via_T = 0.0;     // row-wise certified ||T - I|| on the glued space
    double isometry_err = 0.0; // worst embedding error over the check samples
    bool omega_ok = false;
    bool r0_ok = false;
    bool isometry_ok = false;
    std::string note;
};

// Glues Y and Z along an invertible U: Y -> Z (rescaled to ||U|| = 1) via the
// seminorm p(y,z) = max{ ||z + Uy||_Z , sup_{z* in S(Z*)} |z*(z) + (U*z*)(y)/||U*z*||| },
// with the sup realized over dual-ball vertices (polyhedral Z) or a dual net,
// augmented by norming functionals of the isometry check samples. Quotients
// the zero-space and returns the embedded images plus the verified bounds.
Prop62Report prop62_embed(const Space& Y, const Space& Z, const Mat& U, double eps,
                          const ComputeCfg& cfg = {});

}  // namespace gapkit

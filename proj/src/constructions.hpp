#pragma once
// Named reference constructions: closed-form line pairs in the taxicab plane,
// near-pairs built from quotients, sphere-to-sphere power maps, glued norms
// that almost identify two spaces, and an exact sup-norm identity on grid
// functions. Each builder returns the spaces/subspaces plus the closed-form
// values the test suite checks against the generic solvers.
#include <cstdint>
#include <functional>
#include <utility>

#include "opnorm.hpp"

namespace gapkit {

using SphereMap = std::function<Vec(const Vec&)>;

// Three lines through the origin of the taxicab plane: the first axis and the
// lines of slope a and b. The pairwise symmetric openings have closed forms.
struct LinePairExample {
    Space space;          // l1^2
    Subspace y1, y2, y3;  // spans of (1,0), (1,a), (1,b)
    double theta_12 = 0;  // = a
    double theta_13 = 0;  // = b
    double theta_23 = 0;  // = (b - a) / (1 + a)
};
LinePairExample example_310(double a, double b);

// A tilted line against the first axis of the taxicab plane, where the
// spherical and ball openings exceed the subspace opening, together with the
// annihilator pair in the dual plane.
struct SphericalGapExample {
    Space primal;  // l1^2
    Subspace y;    // span (1, a)
    Subspace z;    // first axis
    Space dual;    // sup-norm plane
    Subspace y_perp, z_perp;
    double omega_primal = 0;   // = lambda_primal = 2a / (1 + a)
    double omega_dual = 0;     // = a
};
SphericalGapExample example_314(double a);

// In X (+)_1 (X/Y): the pair G0 = Y (+)_1 (X/Y) and Geps = {(eps x, proj x)},
// at symmetric opening <= eps, with Geps isomorphic to X through tau with
// ||tau|| <= 1 + eps and ||tau^{-1}|| <= 1/eps.
struct NearPairExample {
    Space ambient;       // X (+)_1 (X/Y)
    Subspace g0;         // Y (+)_1 (X/Y)
    Subspace geps;       // {(eps x, proj x) : x in X}
    Mat tau;             // x -> (eps x, proj x)
    Space geps_induced;  // pullback of the ambient norm through tau (coords = x)
};
NearPairExample douady_pair(const Space& X, const Mat& y_basis, double eps);

// Coordinatewise power maps t -> |t|^alpha sign t carrying the Euclidean unit
// sphere onto the l_p and l_q unit spheres (q conjugate to p), with certified
// moduli of continuity ||Tx - Ty|| <= lip_t ||x - y||_2^{exp_t} on the sphere.
struct MazurPair {
    SphereMap T;  // exponent 2/p, S(l2^n) -> S(lp^n)
    SphereMap D;  // exponent 2/q, S(l2^n) -> S(lq^n)
    double p = 2, q = 2;
    int n = 0;
    double lip_t = 1, exp_t = 1;
    double lip_d = 1, exp_d = 1;
};
MazurPair mazur_maps(double p, int n);

// Glued norm p(y,z) = max over a dual-sphere net of |y*(y) - (Dy*)(z)| on the
// direct sum of the coordinate spaces, quotiented by its zero-space. The
// images of Y and Z are isometric within the sampled tolerance, and the
// spherical opening between them is bounded by the net maximum of
// |y*(y) - (Dy*)(Ty)| plus an explicit net slack.
struct GlueConfig {
    double dual_mesh = 0.25;    // requested net mesh on S(Y*) (dual norm)
    double primal_mesh = 0.25;  // requested net mesh on S(Y)
    int samples = 200;          // isometry / surjectivity spot checks
    std::uint64_t seed = 1;
    long budget = 2000000;      // net point budget
    // Moduli of continuity of T (sphere to sphere, Y-norm to Z-norm) and of D
    // (dual sphere to dual sphere): ||Tx - Ty|| <= lip_t ||x - y||^{exp_t}.
    double lip_t = 1, exp_t = 1;
    double lip_d = 1, exp_d = 1;
};
struct GlueReport {
    Space glued;
    Subspace im_y, im_z;
    double kbound = 0;        // max over net pairs of |y*(y) - (Dy*)(Ty)|
    double kbound_slack = 0;  // pad making kbound + kbound_slack >= the true sup
    double kbound_upper = 0;  // kbound + kbound_slack, nonincreasing under refinement
    double slack = 0;         // embedding slack for the spherical-opening bound
    double omega_upper = 0;   // min(2, kbound + slack) >= Omega(im_y, im_z)
    double isometry_err = 0;  // worst sampled deviation of either image norm from 1
    double dual_mesh = 0;     // achieved net meshes
    double primal_mesh = 0;
    int rows = 0;             // functional rows defining the glued norm
};
GlueReport kadets_glue(const Space& Y, const Space& Z, const SphereMap& T, const SphereMap& D,
                       const GlueConfig& cfg = {});

// A norm-one grid function h0 on [0,1] with top level set A = {h0 >= eps},
// and an extension w of h0|_A with sup w = 1; the pair makes
// sup |h0 - b w| = max(1 - b, b + eps) exactly for every b in [0,1].
std::pair<Vec, Vec> peak_pair(double eps, int grid);

// Evaluates sup |h0 - b w| on the grid; equals max(1 - b, b + eps) exactly.
double identity_642(double eps, double b, int grid);

// Finite truncation of the coupled-sum space behind the identity: h-block
// functions h_0..h_{N-1} and g-block functions g_1..g_N on a common grid,
// normed by max( sum_i ||h_i - a g_{i+1}||_inf, sum_j ||g_j - a h_j||_inf )
// with coupling a = sqrt(2) - 1 (the value balancing 2a = 1 - a^2). Distances
// from the distinguished unit vectors to the ball of the g-block stay within
// 2 sqrt(2) - 2.
struct CoupledSumTruncation {
    Space space;      // dim = 2 * summands * grid
    Subspace y_sub;   // h-block
    Subspace z_sub;   // g-block
    Vec y0;           // (h0, 0, ..., 0) built from peak_pair(a, grid)
    Vec y1;           // (0, h1, 0, ..., 0), a norm-one grid function
    Vec w0;           // the extension paired with h0, as a g_1-block vector
    double a = 0;     // sqrt(2) - 1
    double bound = 0; // 2 sqrt(2) - 2
};
CoupledSumTruncation coupled_sum_truncation(int summands, int grid);

}  // namespace gapkit

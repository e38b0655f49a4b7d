#pragma once
// Composable finite-dimensional normed spaces.
//
// A space is a tree of norm constructors:
//   Lp             (R^n, ||x||_p)
//   WeightedLp     (R^n, ||x||_{p,w}),  w_i > 0
//   DirectSum      p-sum of child spaces on stacked coordinates
//   Quotient       coords c, norm(c) = min_w || lift*c - kernel*w ||_parent
//   Pullback       coords v, norm(v) = || map*v ||_parent   (map injective)
//   MaxFunctionals norm(v) = max_i | row_i . v |            (rows full column rank)
//   MaxOf          norm(v) = max_j child_j(v)               (children same dim)
//
// The set is closed under duality; dual_of() resolves duals structurally.
// Each node carries, computed on construction:
//   - polyhedral flag (unit ball is a polytope and LP-encodable),
//   - Euclidean factor G with ||x|| = |Gx|_2 when one exists,
//   - equivalence constants c_lo |x|_2 <= ||x|| <= c_hi |x|_2.
#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "interval.hpp"
#include "simplex.hpp"

namespace gapkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pinned tolerances.
constexpr double kLpTol = 1e-9;      // LP / polyhedral-exact enclosure padding
constexpr double kIterTol = 1e-6;    // iterative/descent default tolerance
constexpr double kRankTolFactor = 1e-10;

enum class NormKind { Lp, WeightedLp, DirectSum, Quotient, Pullback, MaxFunctionals, MaxOf };

struct SpaceImpl;
using Space = std::shared_ptr<const SpaceImpl>;

struct SpaceImpl {
    NormKind kind = NormKind::Lp;
    int dim = 0;
    double p = 2.0;              // Lp / WeightedLp / DirectSum
    Vec weights;                 // WeightedLp
    std::vector<Space> children; // DirectSum parts; Quotient/Pullback parent at [0]; MaxOf parts
    Mat kernel;                  // Quotient: parent_dim x k
    Mat lift;                    // Quotient: parent_dim x dim
    Mat proj;                    // Quotient: dim x parent_dim, proj*lift = I, proj*kernel = 0
    Mat map;                     // Pullback: parent_dim x dim; MaxFunctionals: rows m x dim

    bool polyhedral = false;
    double c_lo = 1.0, c_hi = 1.0;   // c_lo |x|_2 <= ||x|| <= c_hi |x|_2
    std::optional<Mat> euclid;       // G with ||x|| = |G x|_2

    mutable Space dual_cache;
    mutable std::weak_ptr<const SpaceImpl> dual_back;
    mutable std::optional<std::vector<Vec>> vertex_cache;
    mutable long vertex_cache_budget = 0;
};

// Constructors (validate inputs, run analysis).
Space make_lp(int dim, double p);
Space make_weighted_lp(double p, const Vec& weights);
Space make_direct_sum(double p, std::vector<Space> parts);
Space make_quotient(const Space& parent, const Mat& kernel);  // orthonormal lift
Space make_quotient_lift(const Space& parent, const Mat& kernel, const Mat& lift, const Mat& proj);
Space make_pullback(const Space& parent, const Mat& map);
Space make_max_functionals(const Mat& rows);
Space make_max_of(std::vector<Space> parts);

Space dual_of(const Space& s);

// Norm evaluation. norm() is the primal value (exact for closed-form kinds,
// an upper value for Quotient trees solved iteratively); norm_enclosure()
// returns a certified interval.
double norm(const Space& s, const Vec& x);
Bound norm_enclosure(const Space& s, const Vec& x);

// Norming functional: f with f.dot(x) == ||x|| and dual norm <= 1 (+1e-9).
Vec norming_functional(const Space& s, const Vec& x);

// Dual norm value of functional f (norm in dual_of(s)).
double dual_norm(const Space& s, const Vec& f);

// LP encoding of "norm_s(coords) <= bound" (polyhedral spaces only).
void encode_norm_le(LinearProgram& lp, const Space& s, const std::vector<LinExpr>& coords,
                    const LinExpr& bound);

// Number of inequality rows encode_norm_le() would emit for this space.
long encode_row_count(const Space& s);

// True when the space is polyhedral and its LP encoding is small enough for
// the exact simplex routes; callers must otherwise take a certified fallback.
bool lp_encodable(const Space& s);

// True when dual-norm evaluations on this space cost a closed form or a tiny
// subproblem; gates lower-bound certificates that price functionals in the
// dual (a functional-heavy dual would otherwise dominate the computation).
bool cheap_dual(const Space& s);

// Finite set V with conv(V) = unit ball (polyhedral spaces; respects budget).
std::optional<std::vector<Vec>> ball_vertex_span(const Space& s, long budget = 1200000);
// Functionals g with ball = {x : g.x <= 1 for all g} (possibly redundant rows).
std::optional<std::vector<Vec>> ball_facet_normals(const Space& s, long budget = 1200000);

// Vertices of {x in R^d : g.x <= 1, g in rows} by exhaustive enumeration.
std::optional<std::vector<Vec>> enumerate_polytope_vertices(const std::vector<Vec>& rows, int d,
                                                            long budget);

// Certified min_w || offset - span*w ||_s with the achieving w.
// Routes: closed form (Euclidean), LP (polyhedral), else pattern-search
// descent with a dual-certificate lower bound.
struct AffineMinResult {
    Bound bound{0.0, 0.0};
    Vec w;
};
AffineMinResult min_norm_over_affine(const Space& s, const Vec& offset, const Mat& span,
                                     double tol = kIterTol);

// Helpers.
std::vector<LinExpr> apply_matrix(const Mat& M, const std::vector<LinExpr>& v);
std::vector<LinExpr> vec_to_exprs(const Vec& x);
bool is_euclidean(const Space& s);

// JSON (nlohmann syntax lives in space_json.cpp).
Space parse_space_json(const std::string& text);
std::string space_to_json(const Space& s);
std::uint64_t space_hash(const Space& s);

}  // namespace gapkit

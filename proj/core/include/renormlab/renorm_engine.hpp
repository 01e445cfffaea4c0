#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "renormlab/field_ops.hpp"
#include "renormlab/geometry.hpp"
#include "renormlab/harmonic_expr.hpp"

namespace renormlab {

/// A metric space (V, d) with a nonnegative weight phi, as consumed by the
/// Zalcman-type selection. Either a finite enumeration of points, or the
/// closed Euclidean ball B(center, radius) explored by grid sampling.
struct MetricSpaceView {
  using Distance = std::function<double(const Point&, const Point&)>;

  Distance dist;
  ScalarField phi;
  std::vector<Point> points;  ///< nonempty for finite spaces
  Point ball_center;
  double ball_radius = 0.0;

  bool is_finite() const { return !points.empty(); }
  bool contains(const Point& x) const;

  static MetricSpaceView finite(std::vector<Point> points, ScalarField phi, Distance dist = {});
  static MetricSpaceView ball(Point center, double radius, ScalarField phi);
};

struct SelectionBudget {
  int max_iterations = 500;
  /// Grid nodes per search radius at the coarsest sampling level (continuous V).
  int base_points_per_radius = 16;
  /// Number of sampling levels; each doubles the nodes per radius.
  int refinement_levels = 3;
  /// Cap on (2J + 1)^m samples per level; J is reduced to respect it.
  std::size_t max_samples_per_level = 300000;
};

struct Selection {
  Point q;
  double phi_p = 0.0;
  double phi_q = 0.0;
  int iterations = 0;
  bool exhaustive = false;   ///< true for finite V: condition 3 checked on every point
  int points_per_radius = 0; ///< finest sampling level used for the certificate
  double sample_spacing = 0.0;
  double certified_radius = 0.0;  ///< 1 / (eps phi(q))
  std::size_t samples_checked = 0;
};

/// Finds q with
///   (1) d(p, q) <= tau / (eps phi(p) (tau - 1)),
///   (2) phi(q) >= phi(p),
///   (3) phi(x) <= tau phi(q) whenever d(x, q) <= 1 / (eps phi(q)).
/// Starting from p, while some point of the ball B(p_i, 1/(eps phi(p_i)))
/// violates (3) the search moves to the violator with the largest phi (ties:
/// nearest to p, then lexicographic). On a finite V the check is exhaustive;
/// on a ball it is certified on the sampling grid only, reported in the result.
/// Throws SelectionIncomplete carrying the current candidate when the
/// iteration budget runs out.
Selection zalcman_select(const MetricSpaceView& V, const Point& p, double tau, double eps,
                         const SelectionBudget& budget = {});

/// The probe grid [-1, 1]^m used by default for diagnostics and limits.
GridSpec default_probe(Eigen::Index dim);

struct RescalingOptions {
  double ball_radius = 1.0;  ///< radius of the closed ball V around r
  SelectionBudget budget;
  std::optional<GridSpec> probe;  ///< default_probe(m) when empty
  double growth_threshold = 10.0;
};

struct RenormStep {
  int n = 0;
  AffineChart chart;  ///< x -> a_n x + b_n
  double eps = 0.0;
  double tau = 0.0;
  double phi_start = 0.0;     ///< phi_n(r_n)
  double phi_selected = 0.0;  ///< phi_n(b_n) = 1 / a_n
  double gtilde0 = 0.0;       ///< rescaled derivative at 0, by an independent route when available
  double sup_bound = 0.0;     ///< max over the probe grid of the rescaled derivative
  double delta_grid = 0.0;    ///< sampling slack of the selection certificate, in probe units
  bool probe_certified = false;  ///< probe lies in |x| <= 1/eps and maps into V
  int iterations = 0;
  int points_per_radius = 0;
  bool exhaustive = false;
};

struct RenormTrace {
  Point base;
  std::vector<RenormStep> steps;
};

using HarmonicSequence = std::function<HarmonicExpr(int)>;
using PointSequence = std::function<Point(int)>;
/// phi_n for a family of objects (functions, maps, torus lifts, matrix maps).
using WeightSequence = std::function<ScalarField(int)>;

/// One rescaling step for an arbitrary weight phi_n (already homogeneous of
/// degree one under rescaling, i.e. the rescaled weight is a * phi(a x + b)).
/// eps = phi(r_n)^(-1/3), tau = 1 + eps; V is the closed ball around r.
/// `gtilde0_route`, when given, recomputes the rescaled derivative at 0 from
/// the chart through a different code path.
RenormStep rescale_step(int n, const ScalarField& phi, const Point& r, const Point& r_n,
                        const RescalingOptions& opts,
                        const std::function<double(const AffineChart&)>& gtilde0_route = {});

/// Rescaling of a sequence of weights along `indices`. Checks that
/// phi_n(r_n) is positive and strictly increasing once above the threshold,
/// and that it ends above the threshold.
RenormTrace make_rescaling(const WeightSequence& phiseq, const Point& r, const PointSequence& rseq,
                           const std::vector<int>& indices, const RescalingOptions& opts = {},
                           const std::function<double(int, const AffineChart&)>& gtilde0_route = {});

/// Rescaling of harmonic functions with phi_n = tilde derivative of f_n.
RenormTrace make_rescaling(const HarmonicSequence& fseq, const Point& r, const PointSequence& rseq,
                           const std::vector<int>& indices, const RescalingOptions& opts = {});

enum class LimitClass { AffineNonconstant, ConstantFinite, PlusInfinity, MinusInfinity, Undecided };

std::string to_string(LimitClass c);

struct LimitOptions {
  double res_max = 1e-2;
  double grad_min = 0.1;
  double divergence_threshold = 1e3;
  double finite_cap = 1e6;  ///< a final |g| above this is never classified finite
};

struct ConvergenceReport {
  LimitClass cls = LimitClass::Undecided;
  std::optional<AffineFunc> affine;
  std::vector<int> window;       ///< step indices n examined
  std::vector<double> residuals; ///< affine-fit residual per window step
  std::vector<double> gaps;      ///< sup |g_n - g_next| on the probe
};

/// Classifies sampled values g_n(nodes) for the steps of a window (in order).
ConvergenceReport classify_sequence(const std::vector<Point>& nodes,
                                    const std::vector<std::vector<double>>& values,
                                    const std::vector<int>& indices, const LimitOptions& opts = {});

/// Evaluates g_n = f_n o chart_n on the probe for the last `window` steps and
/// classifies the limit. Never guesses: inconclusive data gives Undecided.
ConvergenceReport limit_probe(const RenormTrace& trace, const HarmonicSequence& fseq, const GridSpec& probe,
                              std::size_t window = 5, const LimitOptions& opts = {});

struct EntireOptions {
  int steps = 16;
  /// f_j(z) = f(p + s_j z) with s_j = s_0 growth^j and s_0 chosen so that
  /// the starting weight s_0 * tilde f(p) reaches the growth threshold.
  double growth = 1.5;
  std::size_t window = 5;
  RescalingOptions rescaling;
  LimitOptions limit;
};

struct EntireResult {
  RenormTrace trace;
  ConvergenceReport report;
  std::vector<double> parameters;          ///< s_j per step
  std::vector<AffineChart> original_charts;///< A_j z + B_j in the coordinates of f
};

/// Renormalizes an entire nonconstant harmonic function at a point with
/// nonzero gradient, through the family f(p + s z).
EntireResult renormalize_entire(const HarmonicExpr& f, const Point& p, const EntireOptions& opts = {});

}  // namespace renormlab

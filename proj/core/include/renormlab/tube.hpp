#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "renormlab/domain_expr.hpp"

namespace renormlab {

struct Evidence {
  std::string kind;
  std::string detail;
  std::vector<Vec2> points;
};

/// True iff [-k, k] x {b} lies in d.
bool seg_fits(const DomainExpr& d, double k, double b);

struct BoundedSchedule {
  int max_level = 10;             ///< k_j = 2^j, delta_j = 2^-j for j = 0..max_level
  int samples_per_window = 64;
  int vertical_probes = 65;       ///< abscissae tried for a blocking vertical slice
};

enum class PointStatus { Bounded, Unbounded, Undecided };
std::string to_string(PointStatus s);

struct BoundedPointResult {
  PointStatus status = PointStatus::Undecided;
  std::vector<double> ks;       ///< levels with a fitting segment
  std::vector<double> heights;  ///< the witness heights b_k
  double blocking_k = 0.0;      ///< Bounded: level of the certificate
  double blocking_x = 0.0;      ///< Bounded: x* whose vertical slice misses the window
  bool approximate = false;     ///< a slice used bisection
};

/// Semi-decision of the bounded-point property for a domain inside {y > 0}.
/// Unbounded when every level has a height b within delta_j of a_2 with
/// seg_fits(d, k_j, b); Bounded when for some level an abscissa x* in
/// [-k_j, k_j] has a vertical slice disjoint from [a_2 - delta_j, a_2 + delta_j].
BoundedPointResult bounded_point(const DomainExpr& d, const Vec2& a, const BoundedSchedule& schedule = {});

enum class Ternary { Yes, No, Undecided };
std::string to_string(Ternary t);

struct LineResult {
  Ternary answer = Ternary::Undecided;
  std::optional<Line> witness;
};

/// Whether d contains a whole affine line. Exact for union-free trees whose
/// admissible directions are finite; unions can only answer Yes.
LineResult contains_affine_line(const DomainExpr& d);

enum class HullClass { InHalfPlane, FullPlane, Undecided };
std::string to_string(HullClass c);

struct HullResult {
  HullClass cls = HullClass::Undecided;
  Vec2 normal = Vec2::Zero();  ///< InHalfPlane: d lies in {<normal, x> < offset}
  double offset = 0.0;
  std::vector<Vec2> bounded_normals;  ///< every tested direction with finite support
  std::vector<Vec2> hull_vertices;    ///< FullPlane: sampled points spanning the largest scale
  double disk_radius = 0.0;           ///< FullPlane: radius certified at the largest scale
};

struct HullOptions {
  int grid_directions = 72;
  std::vector<double> scales{10.0, 100.0, 1000.0};
};

HullResult hull_classify(const DomainExpr& d, const HullOptions& opts = {});

/// The image of d under the rotation taking `normal` to (0, -1), followed by
/// the vertical shift by `offset`; lies in {y > 0} when d lies in
/// {<normal, x> < offset}.
DomainExpr normalize_halfplane(const DomainExpr& d, const Vec2& normal, double offset);

enum class EscapeClass { Property1, Property2, Neither, NotApplicable };
std::string to_string(EscapeClass c);

struct EscapeVariant {
  std::string name;  ///< e.g. "x:+inf:literal"
  bool holds = false;
  bool literal = false;          ///< windows shrink with the scale (y_k -> t)
  double coverage = 0.0;         ///< fraction of the t grid with escape points at every scale
};

struct EscapeOptions {
  std::vector<double> scales{10.0, 100.0, 1000.0};
  std::vector<double> t_grid{-4.0, -3.0, -2.0, -1.5, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
  double neighbourhood = 0.1;   ///< fixed window of the non-literal reading
  double line_tol = 1e-9;
  int line_samples = 201;
  int grid_directions = 12;
};

struct EscapeResult {
  EscapeClass cls = EscapeClass::NotApplicable;
  std::optional<Line> adherent_line;
  std::vector<Line> adherent_lines;
  double best_line_gap = 0.0;   ///< smallest sampled distance bound over candidate lines (largest scale)
  std::vector<EscapeVariant> variants;
};

/// Checks the two alternatives for planar bases whose convex hull is the plane:
/// (1) an adherent line, sampled on L within B(0, R) for each scale R;
/// (2) for every t, points of d with one coordinate beyond R and the other
/// within the window of t, for the 4 geometric variants under 2 readings.
/// Property 2 is decided on the literal readings.
EscapeResult corollary_escape_check(const DomainExpr& d, const EscapeOptions& opts = {},
                                    const HullOptions& hull_opts = {});

enum class Verdict { Hyperbolic, NotHyperbolic, CertifiedByCorollary, Undecided };
std::string to_string(Verdict v);

struct TubeConfig {
  HullOptions hull;
  BoundedSchedule schedule;
  EscapeOptions escape;
  std::vector<double> witness_heights{0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  int random_probes = 32;
  double probe_max_height = 8.0;
  std::uint64_t seed = 0;
};

struct TubeReport {
  HullResult hull;
  Verdict brody = Verdict::Undecided;
  Verdict kobayashi = Verdict::Undecided;
  std::optional<LineResult> line;
  std::optional<EscapeResult> escape;
  std::optional<std::string> normalized;  ///< normalized base in the domain grammar
  std::vector<Evidence> evidence;
};

TubeReport classify_tube(const DomainExpr& d, const TubeConfig& config = {});

}  // namespace renormlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "optdp/mdp.hpp"

namespace optdp {

// ---------------------------------------------------------------------------
// Structural classes
// ---------------------------------------------------------------------------

enum class ClassTag {
  finite,
  countable_compact,
  continuous,
  continuous_concave,
  monotone,
  /// Bounded u.s.c. value functions. Not finitely checkable.
  usc_unverifiable,
  /// Bounded upper semianalytic value functions. Not finitely checkable.
  semianalytic_unverifiable,
};

enum class Verifier {
  bellman_identities,
  lipschitz_preservation,
  concavity_preservation,
  monotone_preservation,
  monotone_selection,
};

/// Which invariant set D a model claims T maps into itself, and the numeric
/// checks that probe the claim on a grid.
struct StructuralClass {
  ClassTag tag;
  std::vector<Verifier> verifiers;
};

StructuralClass structural_class(ClassTag tag);
std::string_view to_string(ClassTag tag);
std::string_view to_string(Verifier v);
std::optional<ClassTag> parse_class_tag(std::string_view name);

// ---------------------------------------------------------------------------
// Continuous models and their discretization
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct Atom {
  double point = 0.0;
  double prob = 0.0;
};

/// Uniform next-state law on [lo, hi]; lo == hi is a point mass.
struct UniformLaw {
  double lo = 0.0;
  double hi = 0.0;
};

using NextStateLaw = std::variant<std::vector<Atom>, UniformLaw>;

/// One-dimensional state and action intervals with reward, next-state law and
/// an optional feasibility predicate (empty means Gamma(s) = A).
struct ContinuousModelSpec {
  Interval states;
  Interval actions;
  std::function<double(double s, double a)> reward;
  std::function<NextStateLaw(double s, double a)> transition;
  std::function<bool(double s, double a)> feasible;
  double beta = 0.9;
  ClassTag claimed_class = ClassTag::continuous;
  /// Coefficient c of the c*h^2 allowance added to the concavity tolerance.
  double concavity_allowance = 0.0;
};

struct GridModel {
  std::vector<double> state_grid;
  std::vector<double> action_grid;
  FiniteMdp mdp;
  double concavity_allowance = 0.0;

  /// Piecewise-linear read-off of grid values at x, clamped to the grid ends.
  double interpolate(const ValueFunction& values, double x) const;
};

std::vector<double> uniform_grid(Interval interval, std::size_t n);

/// Grid model of a finite MDP whose coordinates are the state and action
/// indices themselves.
GridModel index_grid(FiniteMdp model);

/// Projects a next-state law onto `grid` by splitting each atom between its
/// two bracketing grid points in proportion to distance (the hat-function
/// weights), which preserves the mean. Mass outside the grid is clamped to the
/// nearest end. Uniform laws are projected by exact integration of the hat
/// functions. The result is sorted by index with duplicates merged.
std::vector<Transition> project_onto_grid(std::span<const double> grid,
                                          const NextStateLaw& law);

/// Uniform state and action grids with n_state and n_action points, rewards
/// tabulated at grid pairs, transitions projected by `project_onto_grid`.
/// Throws std::invalid_argument for n < 2, degenerate intervals, beta outside
/// (0,1), a state with no feasible grid action, or a reward that is not
/// finite at a grid pair or at the sampled cell midpoints.
GridModel discretize(const ContinuousModelSpec& spec, std::size_t n_state,
                     std::size_t n_action);

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

inline constexpr double kMonotoneTolerance = 1e-10;
inline constexpr double kConcavityTolerance = 1e-8;
inline constexpr double kLipschitzTolerance = 1e-10;

struct StructureReport {
  std::string check;
  std::size_t trials = 0;
  std::size_t passed = 0;
  /// Largest amount by which a sampled Tf broke the property (0 if none).
  double worst_violation = 0.0;
  /// Sampled f whose image broke the property worst, and where.
  std::optional<ValueFunction> witness;
  std::optional<StateIndex> witness_state;
  /// Selection found by check_greedy_monotone, when one exists.
  std::optional<StationaryPolicy> selection;
  std::string detail;

  bool ok() const noexcept { return passed == trials; }
};

/// Samples nondecreasing f on the state grid (trial 0 is constant) and checks
/// Tf(x_i) <= Tf(x_{i+1}) + 1e-10 for all adjacent grid points.
StructureReport check_preserves_monotone(const GridModel& grid, std::size_t trials,
                                         std::uint64_t seed);

/// Samples concave piecewise-linear f (minimum of random affine functions;
/// trial 0 is affine) and checks three-point concavity of Tf on the grid with
/// tolerance 1e-8 + concavity_allowance * h^2.
StructureReport check_preserves_concave(const GridModel& grid, std::size_t trials,
                                        std::uint64_t seed);

/// Samples Lipschitz f and checks |Tf(x_{i+1}) - Tf(x_i)| against the bound
/// obtained by coupling each action at one grid point with the nearest
/// feasible action at its neighbour: |r - r'| + beta * Lip(f) * W1(p, p').
StructureReport check_preserves_lipschitz(const GridModel& grid, std::size_t trials,
                                          std::uint64_t seed);

/// Algebraic identities on sampled inputs: discounting, monotonicity and
/// beta-contraction of T.
StructureReport check_bellman_identities(const FiniteMdp& model, std::size_t trials,
                                         std::uint64_t seed);

/// Whether the lowest-index greedy policy for `v` is nondecreasing in the
/// state index and, if not, whether some selection from the per-state argmax
/// sets is. Argmax sets use a tie tolerance of 1e-9 * max(1, |Tv(s)|).
StructureReport check_greedy_monotone(const GridModel& grid, const ValueFunction& v);

/// Runs every verifier of `tag` on `grid`. Monotone selection solves the grid
/// model first (tol 1e-8). Unverifiable tags return an empty list.
std::vector<StructureReport> verify_class(const GridModel& grid, ClassTag tag,
                                          std::size_t trials, std::uint64_t seed);

}  // namespace optdp

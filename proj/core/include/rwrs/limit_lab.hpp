#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rwrs/lattice_walk.hpp"
#include "rwrs/occupation.hpp"
#include "rwrs/report.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/spectral.hpp"

namespace rwrs {

/// Paper: increments are divided by sqrt(n ln n). Exact: every tested
/// statistic is divided by its exact conditional standard deviation.
enum class Normalization { kPaper, kExact };

struct ExperimentConfig {
  StepDistribution walk = StepDistribution::simple_symmetric();
  SceneryModel model = IidLaw::gaussian();
  std::size_t n = 10000;
  std::vector<double> time_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t replicates = 1000;       // sceneries per fixed walk
  std::size_t omega_replicates = 10;   // walks
  std::uint64_t master_seed = 1;
  Normalization normalization = Normalization::kPaper;
  double c0 = kNotApplicable;
  int correlation_radius = 20;
  unsigned workers = 1;

  double alpha = 0.01;                 // per-test KS level
  double ks_pass_fraction = 0.95;
  std::array<double, 2> variance_band{0.75, 1.25};
};

/// Throws ValidationError: "grid" (t not strictly increasing from 0 to 1),
/// "replicates" (R < 100 when `distributional`), "n", "c0_missing", "workers".
void validate_config(const ExperimentConfig& cfg, bool distributional);

/// Stream of walk number `omega`.
RandomStream walk_stream(std::uint64_t master_seed, std::size_t omega);
/// Stream of scenery `replicate` under walk `omega`.
RandomStream scenery_stream(std::uint64_t master_seed, std::size_t omega, std::size_t replicate);
RandomStream auxiliary_stream(std::uint64_t master_seed, std::uint64_t tag);

/// Runs body(i) for i in [0, count) on `workers` threads. Callers write
/// results by index, so output never depends on scheduling.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/// Walks 0 .. count-1 of length n on their dedicated streams.
std::vector<WalkPath> sample_walks(const StepDistribution& walk, std::size_t n, std::size_t count,
                                   std::uint64_t master_seed, unsigned workers);

/// Intervals [floor(n t_{j-1}), floor(n t_j)).
std::vector<Interval> grid_intervals(std::size_t n, std::span<const double> grid);

/// Finite-dimensional FCLT test: per walk, variance ratios of the increments,
/// KS tests of three Cramer-Wold projections (Bonferroni over the three) and
/// pairwise increment correlations.
StatReport fclt_experiment(const ExperimentConfig& cfg);

struct CrossTerm {
  double value = 0.0;            // cross count / (C0 n ln n)
  std::uint64_t cross_count = 0;  // V(I, J, p) + V(J, I, p)
  bool additive = false;          // V([0,n), p) - V(I, p) - V(J, p) == cross_count
};

/// Split [0, n) at floor(n a), 0 < a < 1.
CrossTerm cross_term_diagnostic(const WalkPath& path, double a, Point p, double c0);

/// Newman-Wright maximal inequality per walk. A mixed-sign moving average is
/// checked on its positive and negative filters separately.
StatReport newman_wright_check(const ExperimentConfig& cfg, double lambda);

/// (1 - 2^{-1/4})^{-4}.
double moricz_constant();

struct MoriczOptions {
  Interval interval{0, 0};  // length 0 means [0, n)
  std::size_t superadditivity_splits = 1000;
};

/// IID only: exact E S^4 against Monte Carlo, E M^4 <= C_max G0^2 with
/// G0 = sqrt(3 (E X^2)^2 + E X^4) V, and exact super-additivity of G0 on
/// random adjacent splits.
StatReport moricz_check(const ExperimentConfig& cfg, const MoriczOptions& options = {});

/// E S^4 = 3 (E X^2)^2 (V^2 - U4) + E X^4 U4 for S = sum_l w(l) X_l.
double iid_fourth_moment(const IidLaw& law, const OccupationField& w);

struct TruncationSplit {
  IidLaw law;
  TruncationMoments moments;

  double bounded(double x) const;  // X 1{X <= L} - E[X 1{X <= L}]
  double tail(double x) const;     // X 1{X > L} - E[X 1{X > L}]
};

TruncationSplit truncation_split(const IidLaw& law, double level);

/// Closed-form tail moments against Monte Carlo at 4 sigma, centering of both
/// parts, recomposition, and monotonicity of E[X^2 1{X > L}] over the levels.
StatReport truncation_report(const IidLaw& law, std::span<const double> levels,
                             std::size_t samples, std::uint64_t master_seed);

/// Least-squares slope of mean V_n against n ln n. Needs >= 4 grid points and
/// an aperiodic walk ("not_aperiodic").
StatReport estimate_c0(const StepDistribution& walk, std::span<const std::size_t> n_grid,
                       std::size_t paths, std::uint64_t master_seed, unsigned workers);

/// Exact conditional variance of S_n against Monte Carlo, per walk, and the
/// ratio Var(S_n) / (n ln n) against phi_f(0) C0.
StatReport variance_experiment(const ExperimentConfig& cfg);

/// Empirical E[X_l X_0] over uniform rational points against
/// exact_correlation, for every |l| <= radius.
StatReport toral_agreement(const ToralModel& model, int radius, std::size_t points,
                           std::uint64_t master_seed);

}  // namespace rwrs

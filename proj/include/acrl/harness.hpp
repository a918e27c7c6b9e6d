#pragma once

#include "acrl/actor_critic.hpp"
#include "acrl/critic.hpp"
#include "acrl/finite_mdp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace acrl {

/// I/O failure with the offending path in the message.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class EnvKind { nav, finite };
enum class Variant { practical, generic };

struct ExperimentConfig {
  EnvKind env = EnvKind::nav;
  CriticMethod method = CriticMethod::td0;
  Variant variant = Variant::practical;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::filesystem::path out = "results";
  int threads = 0;  // 0: hardware concurrency

  long iterations = 2000;
  std::string eta_schedule = "constant";
  double eta = 1e-4;
  double eta_exponent = 0.5;
  std::string critic_effort = "linear_plus_one";
  long critic_budget = 1;
  CriticClock critic_clock = CriticClock::per_iteration;
  bool reset_critic = false;
  double freeze_norm = 100.0;
  int eval_every = 10;
  int eval_trajectories = 10;
  long eval_length = 200;
  int critic_rollouts = 10;
  long rollout_length = 200;
  long burn_in = 200;

  double critic_radius = 20.0;
  std::string td_schedule = "constant";
  double td_alpha = 0.05;
  double td_exponent = 0.5;
  double gtd_alpha_scale = 1.0;
  double agtd_alpha_scale = 1.0;
  double lambda_reg = 0.0;

  double gamma = 0.9;
  double policy_variance = 0.5;
  int grid_per_axis = 10;
  double grid_lower = -5.0;
  double grid_upper = 5.0;
  double bandwidth = 1.0;
  std::string nav_critic_features = "afterstate";
  std::string tracker_layout = "region";  // nav: pooled or region

  std::string finite_file;  // empty: built-in reference instance
  std::uint64_t finite_seed = 7;

  /// Apply one key=value setting; throws ConfigError for unknown keys or
  /// malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  /// Critic settings for `method` derived from this configuration.
  CriticConfig critic_config(std::optional<double> omega = std::nullopt) const;
  ActorConfig actor_config(std::optional<double> omega = std::nullopt) const;
};

/// Flat "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// "a..b" (inclusive) or a comma separated list.
std::vector<std::uint64_t> parse_seeds(const std::string& text);
EnvKind parse_env(const std::string& name);
std::string to_string(EnvKind env);
/// Plot legend label: TD(0), GTD, A-GTD.
std::string display_name(CriticMethod method);

// ---------------------------------------------------------------------------
// Runs and CSV files
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceHeader =
    "k,grad_proxy,eval_reward,theta_norm,xi_norm,critic_steps,seed";
inline constexpr const char* kAggregateHeader =
    "method,k,n,grad_proxy_mean,grad_proxy_stderr,eval_reward_mean,eval_reward_stderr,"
    "theta_norm_mean,xi_norm_mean,critic_steps_mean";

/// One actor-critic run for one seed.
RunTrace run_single(const ExperimentConfig& cfg, std::uint64_t seed);

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::uint64_t seed);

struct TraceRow {
  long k = 0;
  double grad_proxy = 0.0;
  double eval_reward = 0.0;
  double theta_norm = 0.0;
  double xi_norm = 0.0;
  long critic_steps = 0;
  std::uint64_t seed = 0;
};
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

struct AggregateRow {
  std::string method;
  long k = 0;
  long n = 0;
  double grad_proxy_mean = 0.0;
  double grad_proxy_stderr = 0.0;
  double eval_reward_mean = 0.0;
  double eval_reward_stderr = 0.0;
  double theta_norm_mean = 0.0;
  double xi_norm_mean = 0.0;
  double critic_steps_mean = 0.0;
};

/// Mean and standard error per evaluation index across seeds.
std::vector<AggregateRow> aggregate(const std::vector<std::vector<TraceRow>>& seeds,
                                    const std::string& method);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path);

struct ExperimentResult {
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path aggregate_file;
  std::vector<RunTrace> traces;  // in seed order
  long aborted_runs = 0;
};

/// Runs every seed (in parallel), writes <method>_seed<N>.csv per seed and
/// <method>_aggregate.csv into cfg.out.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Re-aggregates existing per-seed trace files.
std::filesystem::path aggregate_files(const std::vector<std::filesystem::path>& traces,
                                      const std::string& method,
                                      const std::filesystem::path& out);

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual = 0.0;  // root mean squared residual in log space
  long points = 0;
};

/// Least squares of log(value) on log(t) over t in [lo, hi]. Requires at
/// least 10 points and positive values inside the window.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& value, double lo,
                 double hi);

/// Roughly log-spaced integer checkpoints in [1, last], always including last.
std::vector<long> log_checkpoints(long last, int per_decade = 12);

/// Critic-only runs on a finite instance with exact stationary sampling.
struct CriticRateSetup {
  FiniteMdp mdp;
  TabularFeatureMap features;
  Vector policy_logits;
  Vector xi_star;
  double omega = 0.0;   // feature covariance modulus
  double sigma = 0.0;   // growth modulus of the Bellman objective
};

CriticRateSetup reference_rate_setup(std::uint64_t instance_seed = 7);

/// The step schedule used for each method in the rate experiments:
/// TD(0) alpha = beta_c / (lambda_c + t); GTD and A-GTD alpha = 1 / (sigma t).
StepSchedule rate_schedule(const CriticRateSetup& setup, CriticMethod method);

struct CriticRateSeries {
  std::vector<std::uint64_t> seeds;
  std::vector<long> checkpoints;
  std::vector<std::vector<double>> errors;  // per seed, |xi_t - xi*| at checkpoints
  std::vector<double> mean;
};

CriticRateSeries critic_rate_series(const CriticRateSetup& setup, CriticMethod method,
                                    const StepSchedule& schedule,
                                    const std::vector<std::uint64_t>& seeds, long steps,
                                    int threads = 0);

void write_rate_csv(std::ostream& out, const CriticRateSeries& series, const std::string& method);

// ---------------------------------------------------------------------------
// Plots
// ---------------------------------------------------------------------------

/// Writes grad_proxy.svg and eval_reward.svg into `out`, one curve per
/// method. Throws ConfigError when `series` is empty.
std::vector<std::filesystem::path> emit_plots(
    const std::map<std::string, std::vector<AggregateRow>>& series,
    const std::filesystem::path& out);

}  // namespace acrl

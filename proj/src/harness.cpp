#include "acrl/harness.hpp"

#include "acrl/nav_env.hpp"
#include "acrl/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace acrl {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(1, n);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), jobs));
}

/// Runs job(i) for i in [0, count) on a small pool; rethrows the first error.
template <class Job>
void parallel_for(std::size_t count, int threads, Job job) {
  if (count == 0) return;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n = worker_count(threads, count);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

std::vector<std::uint64_t> parse_seeds(const std::string& raw) {
  const std::string text = trim(raw);
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long a = parse_long("seeds", trim(text.substr(0, dots)));
    const long b = parse_long("seeds", trim(text.substr(dots + 2)));
    if (a < 0 || b < a) throw ConfigError("seeds: need 0 <= a <= b in 'a..b'");
    for (long s = a; s <= b; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const long s = parse_long("seeds", trim(item));
      if (s < 0) throw ConfigError("seeds must be nonnegative");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

EnvKind parse_env(const std::string& name) {
  if (name == "nav") return EnvKind::nav;
  if (name == "finite") return EnvKind::finite;
  throw ConfigError("unknown environment '" + name + "' (nav or finite)");
}

std::string to_string(EnvKind env) { return env == EnvKind::nav ? "nav" : "finite"; }

std::string display_name(CriticMethod method) {
  switch (method) {
    case CriticMethod::td0: return "TD(0)";
    case CriticMethod::gtd: return "GTD";
    case CriticMethod::agtd: return "A-GTD";
  }
  return "?";
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "env") env = parse_env(v);
  else if (key == "method") method = parse_critic_method(v);
  else if (key == "variant") {
    if (v == "practical") variant = Variant::practical;
    else if (v == "generic") variant = Variant::generic;
    else throw ConfigError("variant must be practical or generic");
  }
  else if (key == "seeds") seeds = parse_seeds(v);
  else if (key == "out") out = v;
  else if (key == "threads") threads = static_cast<int>(parse_long(key, v));
  else if (key == "iterations") iterations = parse_long(key, v);
  else if (key == "eta_schedule") eta_schedule = v;
  else if (key == "eta") eta = parse_double(key, v);
  else if (key == "eta_exponent") eta_exponent = parse_double(key, v);
  else if (key == "critic_effort") critic_effort = v;
  else if (key == "critic_budget") critic_budget = parse_long(key, v);
  else if (key == "critic_clock") {
    if (v == "global") critic_clock = CriticClock::global;
    else if (v == "per_iteration") critic_clock = CriticClock::per_iteration;
    else throw ConfigError("critic_clock must be global or per_iteration");
  }
  else if (key == "reset_critic") reset_critic = parse_bool(key, v);
  else if (key == "freeze_norm") freeze_norm = parse_double(key, v);
  else if (key == "eval_every") eval_every = static_cast<int>(parse_long(key, v));
  else if (key == "eval_trajectories") eval_trajectories = static_cast<int>(parse_long(key, v));
  else if (key == "eval_length") eval_length = parse_long(key, v);
  else if (key == "critic_rollouts") critic_rollouts = static_cast<int>(parse_long(key, v));
  else if (key == "rollout_length") rollout_length = parse_long(key, v);
  else if (key == "burn_in") burn_in = parse_long(key, v);
  else if (key == "critic_radius") critic_radius = parse_double(key, v);
  else if (key == "td_schedule") td_schedule = v;
  else if (key == "td_alpha") td_alpha = parse_double(key, v);
  else if (key == "td_exponent") td_exponent = parse_double(key, v);
  else if (key == "gtd_alpha_scale") gtd_alpha_scale = parse_double(key, v);
  else if (key == "agtd_alpha_scale") agtd_alpha_scale = parse_double(key, v);
  else if (key == "lambda_reg") lambda_reg = parse_double(key, v);
  else if (key == "gamma") gamma = parse_double(key, v);
  else if (key == "policy_variance") policy_variance = parse_double(key, v);
  else if (key == "grid_per_axis") grid_per_axis = static_cast<int>(parse_long(key, v));
  else if (key == "grid_lower") grid_lower = parse_double(key, v);
  else if (key == "grid_upper") grid_upper = parse_double(key, v);
  else if (key == "bandwidth") bandwidth = parse_double(key, v);
  else if (key == "nav_critic_features") nav_critic_features = v;
  else if (key == "tracker_layout") tracker_layout = v;
  else if (key == "finite_file") finite_file = v;
  else if (key == "finite_seed") finite_seed = static_cast<std::uint64_t>(parse_long(key, v));
  else throw ConfigError("config: unknown key '" + key + "'");
}

CriticConfig ExperimentConfig::critic_config(std::optional<double> omega) const {
  CriticConfig c;
  c.method = method;
  c.radius = critic_radius;
  c.lambda_reg = lambda_reg;
  switch (method) {
    case CriticMethod::td0:
      if (td_schedule == "constant") c.schedule = StepSchedule::constant(td_alpha);
      else if (td_schedule == "td_continuous") c.schedule = StepSchedule::td_continuous(td_exponent);
      else if (td_schedule == "td_finite") c.schedule = StepSchedule::td_finite(omega, gamma);
      else throw ConfigError("td_schedule must be constant, td_continuous or td_finite");
      break;
    case CriticMethod::gtd: c.schedule = StepSchedule::gtd(gtd_alpha_scale); break;
    case CriticMethod::agtd: c.schedule = StepSchedule::agtd(agtd_alpha_scale); break;
  }
  return c;
}

ActorConfig ExperimentConfig::actor_config(std::optional<double> omega) const {
  ActorConfig a;
  if (eta_schedule == "constant") a.eta = EtaSchedule::constant(eta);
  else if (eta_schedule == "power") a.eta = EtaSchedule::power(eta_exponent, eta);
  else throw ConfigError("eta_schedule must be constant or power");
  a.effort = TcSchedule::parse(critic_effort, critic_budget);
  a.critic = critic_config(omega);
  a.clock = critic_clock;
  a.iterations = iterations;
  a.freeze_norm = freeze_norm;
  a.reset_critic = reset_critic;
  a.eval_every = eval_every;
  a.eval_trajectories = eval_trajectories;
  a.eval_length = eval_length;
  a.critic_rollouts = critic_rollouts;
  a.rollout_length = rollout_length;
  return a;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seed list is empty");
  validate_discount(gamma);
  if (!(policy_variance > 0.0)) throw ConfigError("policy variance must be positive");
  if (grid_per_axis < 1 || !(grid_lower < grid_upper))
    throw ConfigError("grid needs per_axis >= 1 and lower < upper");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (burn_in < 0) throw ConfigError("burn_in must be nonnegative");
  if (nav_critic_features != "afterstate" && nav_critic_features != "state")
    throw ConfigError("nav_critic_features must be afterstate or state");
  if (tracker_layout != "pooled" && tracker_layout != "region")
    throw ConfigError("tracker_layout must be pooled or region");
  // td_finite needs omega, which only exists for finite instances.
  if (method == CriticMethod::td0 && td_schedule == "td_finite" && env == EnvKind::nav)
    throw ConfigError("td_finite schedule needs a finite environment");
  actor_config(env == EnvKind::finite ? std::optional<double>(1.0) : std::nullopt).validate();
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  return parse_config(in, std::move(base));
}

// ---------------------------------------------------------------------------
// Single runs
// ---------------------------------------------------------------------------

namespace {

RunTrace run_nav(const ExperimentConfig& cfg, Rng& rng) {
  NavConfig nav;
  nav.gamma = cfg.gamma;
  const NavEnvironment env(nav);
  auto state_features = std::make_shared<RbfFeatureMap>(RbfFeatureMap::grid(
      cfg.grid_lower, cfg.grid_upper, cfg.grid_per_axis, cfg.bandwidth, true));
  const GaussianLinearPolicy policy(state_features, 2, cfg.policy_variance);
  std::unique_ptr<StateActionFeatures> critic_features;
  if (cfg.nav_critic_features == "afterstate")
    critic_features = std::make_unique<AfterstateFeatures>(state_features, nav.step_length);
  else
    critic_features = std::make_unique<StateOnlyFeatures>(*state_features);

  const ActorConfig actor = cfg.actor_config();
  const TrackerLayout layout = cfg.method == CriticMethod::td0 || cfg.tracker_layout == "pooled"
                                   ? TrackerLayout::pooled()
                                   : nav_region_layout(*state_features, nav.step_length);
  Evaluator evaluator = rollout_evaluator(env, policy, cfg.eval_trajectories, cfg.eval_length);
  if (cfg.variant == Variant::practical)
    return run_practical(env, policy, *critic_features, actor, rng, std::move(evaluator), layout);
  const BurnInSampler sampler(env, cfg.burn_in);
  return run_generic(env, policy, *critic_features, sampler, actor, rng, std::move(evaluator),
                     layout);
}

RunTrace run_finite(const ExperimentConfig& cfg, Rng& rng) {
  FiniteMdp mdp;
  std::optional<TabularFeatureMap> features;
  if (cfg.finite_file.empty()) {
    ReferenceInstance inst = make_reference_instance(cfg.finite_seed, 4, 2, 3, cfg.gamma);
    mdp = std::move(inst.mdp);
    features.emplace(std::move(inst.features));
  } else {
    FiniteMdpFile file = load_finite_mdp(cfg.finite_file);
    mdp = std::move(file.mdp);
    if (file.features)
      features.emplace(mdp.num_states, mdp.num_actions, std::move(*file.features));
    else
      features.emplace(TabularFeatureMap::one_hot(mdp.num_states, mdp.num_actions));
  }
  const FiniteMdpEnvironment env(mdp);
  const SoftmaxTabularPolicy policy(mdp.num_states, mdp.num_actions);
  const FiniteMdp& m = env.mdp();

  std::optional<double> omega;
  if (cfg.method == CriticMethod::td0 && cfg.td_schedule == "td_finite")
    omega = min_eig_omega(m, TabularPolicy::uniform(m.num_states, m.num_actions), *features);
  const ActorConfig actor = cfg.actor_config(omega);

  // Exact evaluation: gradient norm and objective of the current policy.
  Evaluator evaluator = [&m, &policy](const Vector& params, Rng&) {
    return Evaluation{exact_gradient(m, policy, params).norm(), objective(m, policy, params)};
  };
  if (cfg.variant == Variant::practical)
    return run_practical(env, policy, *features, actor, rng, std::move(evaluator));
  const StationarySampler sampler(m);
  const TrackerLayout layout =
      cfg.method == CriticMethod::td0 ? TrackerLayout::pooled() : m.pair_layout();
  return run_generic(env, policy, *features, sampler, actor, rng, std::move(evaluator), layout);
}

}  // namespace

RunTrace run_single(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  try {
    return cfg.env == EnvKind::nav ? run_nav(cfg, rng) : run_finite(cfg, rng);
  } catch (const NumericalError& e) {
    RunTrace trace;
    trace.aborted = true;
    trace.abort_reason = e.what();
    return trace;
  }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::uint64_t seed) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    if (!r.evaluated) continue;
    out << r.k << ',' << format_number(r.grad_proxy) << ',' << format_number(r.eval_reward) << ','
        << format_number(r.theta_norm) << ',' << format_number(r.xi_norm) << ','
        << r.critic_steps << ',' << seed << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTraceHeader)
    throw IoError(path.string() + ": header must be '" + kTraceHeader + "'");
  std::vector<TraceRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 7)
      throw IoError(path.string() + ":" + std::to_string(number) + ": expected 7 columns");
    try {
      TraceRow r;
      r.k = std::stol(cells[0]);
      r.grad_proxy = std::stod(cells[1]);
      r.eval_reward = std::stod(cells[2]);
      r.theta_norm = std::stod(cells[3]);
      r.xi_norm = std::stod(cells[4]);
      r.critic_steps = std::stol(cells[5]);
      r.seed = std::stoull(cells[6]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(number) + ": malformed number");
    }
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<std::vector<TraceRow>>& seeds,
                                    const std::string& method) {
  std::map<long, std::vector<const TraceRow*>> by_k;
  for (const auto& rows : seeds)
    for (const TraceRow& r : rows) by_k[r.k].push_back(&r);

  auto mean_stderr = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return std::pair<double, double>{mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{mean, std::sqrt(ss / (n - 1.0) / n)};
  };

  std::vector<AggregateRow> out;
  for (const auto& [k, rows] : by_k) {
    std::vector<double> proxy, reward, theta, xi, steps;
    for (const TraceRow* r : rows) {
      proxy.push_back(r->grad_proxy);
      reward.push_back(r->eval_reward);
      theta.push_back(r->theta_norm);
      xi.push_back(r->xi_norm);
      steps.push_back(static_cast<double>(r->critic_steps));
    }
    AggregateRow a;
    a.method = method;
    a.k = k;
    a.n = static_cast<long>(rows.size());
    std::tie(a.grad_proxy_mean, a.grad_proxy_stderr) = mean_stderr(proxy);
    std::tie(a.eval_reward_mean, a.eval_reward_stderr) = mean_stderr(reward);
    a.theta_norm_mean = mean_stderr(theta).first;
    a.xi_norm_mean = mean_stderr(xi).first;
    a.critic_steps_mean = mean_stderr(steps).first;
    out.push_back(a);
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const AggregateRow& a : rows)
    out << a.method << ',' << a.k << ',' << a.n << ',' << format_number(a.grad_proxy_mean) << ','
        << format_number(a.grad_proxy_stderr) << ',' << format_number(a.eval_reward_mean) << ','
        << format_number(a.eval_reward_stderr) << ',' << format_number(a.theta_norm_mean) << ','
        << format_number(a.xi_norm_mean) << ',' << format_number(a.critic_steps_mean) << '\n';
}

std::vector<AggregateRow> read_aggregate_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw IoError(path.string() + ": empty file");
  const auto header = split_csv(line);
  const auto expected = split_csv(kAggregateHeader);
  for (const std::string& col : expected)
    if (std::find(header.begin(), header.end(), col) == header.end())
      throw IoError(path.string() + ": missing column '" + col + "'");
  if (header != expected) throw IoError(path.string() + ": unexpected column layout");
  std::vector<AggregateRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != expected.size())
      throw IoError(path.string() + ":" + std::to_string(number) + ": wrong column count");
    try {
      AggregateRow a;
      a.method = c[0];
      a.k = std::stol(c[1]);
      a.n = std::stol(c[2]);
      a.grad_proxy_mean = std::stod(c[3]);
      a.grad_proxy_stderr = std::stod(c[4]);
      a.eval_reward_mean = std::stod(c[5]);
      a.eval_reward_stderr = std::stod(c[6]);
      a.theta_norm_mean = std::stod(c[7]);
      a.xi_norm_mean = std::stod(c[8]);
      a.critic_steps_mean = std::stod(c[9]);
      rows.push_back(a);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(number) + ": malformed number");
    }
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_directory(cfg.out);
  const std::string method = to_string(cfg.method);

  ExperimentResult result;
  result.traces.resize(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.threads,
               [&](std::size_t i) { result.traces[i] = run_single(cfg, cfg.seeds[i]); });

  std::vector<std::vector<TraceRow>> rows;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const RunTrace& trace = result.traces[i];
    if (trace.aborted) ++result.aborted_runs;
    const fs::path path = cfg.out / (method + "_seed" + std::to_string(cfg.seeds[i]) + ".csv");
    {
      std::ofstream out = open_output(path);
      write_trace_csv(out, trace, cfg.seeds[i]);
      if (!out) throw IoError("failed writing " + path.string());
    }
    result.trace_files.push_back(path);
    rows.push_back(read_trace_csv(path));
  }
  result.aggregate_file = cfg.out / (method + "_aggregate.csv");
  std::ofstream out = open_output(result.aggregate_file);
  write_aggregate_csv(out, aggregate(rows, method));
  if (!out) throw IoError("failed writing " + result.aggregate_file.string());
  return result;
}

fs::path aggregate_files(const std::vector<fs::path>& traces, const std::string& method,
                         const fs::path& out_dir) {
  if (traces.empty()) throw ConfigError("no trace files to aggregate");
  std::vector<std::vector<TraceRow>> rows;
  for (const fs::path& p : traces) rows.push_back(read_trace_csv(p));
  ensure_directory(out_dir);
  const fs::path path = out_dir / (method + "_aggregate.csv");
  std::ofstream out = open_output(path);
  write_aggregate_csv(out, aggregate(rows, method));
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

// ---------------------------------------------------------------------------
// Rates
// ---------------------------------------------------------------------------

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& value, double lo,
                 double hi) {
  if (t.size() != value.size()) throw ConfigError("fit_rate: series lengths differ");
  if (!(lo > 0.0 && lo < hi)) throw ConfigError("fit_rate: need 0 < lo < hi");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo || t[i] > hi) continue;
    if (!(value[i] > 0.0) || !(t[i] > 0.0))
      throw ConfigError("fit_rate: nonpositive value inside the window");
    x.push_back(std::log(t[i]));
    y.push_back(std::log(value[i]));
  }
  if (x.size() < 10) throw ConfigError("fit_rate: fewer than 10 points inside the window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit_rate: window holds a single abscissa");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.window_lo = lo;
  fit.window_hi = hi;
  fit.points = static_cast<long>(x.size());
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

std::vector<long> log_checkpoints(long last, int per_decade) {
  if (last < 1 || per_decade < 1) throw ConfigError("log_checkpoints: need last, per_decade >= 1");
  std::vector<long> out;
  for (int i = 0;; ++i) {
    const long t = std::lround(std::pow(10.0, static_cast<double>(i) / per_decade));
    if (t > last) break;
    if (out.empty() || t != out.back()) out.push_back(t);
  }
  if (out.back() != last) out.push_back(last);
  return out;
}

CriticRateSetup reference_rate_setup(std::uint64_t instance_seed) {
  ReferenceInstance inst = make_reference_instance(instance_seed);
  const TabularPolicy pi = TabularPolicy::softmax(inst.reference_logits,
                                                  inst.mdp.num_states, inst.mdp.num_actions);
  CriticRateSetup setup{inst.mdp, inst.features, inst.reference_logits,
                        td_fixed_point(inst.mdp, pi, inst.features), 0.0, 0.0};
  setup.omega = min_eig_omega(setup.mdp, pi, setup.features);
  setup.sigma = bellman_growth_modulus(bellman_terms(setup.mdp, pi, setup.features));
  return setup;
}

StepSchedule rate_schedule(const CriticRateSetup& setup, CriticMethod method) {
  switch (method) {
    case CriticMethod::td0: return StepSchedule::td_finite(setup.omega, setup.mdp.gamma);
    case CriticMethod::gtd: return StepSchedule::gtd(1.0 / setup.sigma);
    case CriticMethod::agtd: return StepSchedule::agtd(1.0 / setup.sigma);
  }
  return StepSchedule::constant(0.05);
}

CriticRateSeries critic_rate_series(const CriticRateSetup& setup, CriticMethod method,
                                    const StepSchedule& schedule,
                                    const std::vector<std::uint64_t>& seeds, long steps,
                                    int threads) {
  if (seeds.empty()) throw ConfigError("critic_rate_series: no seeds");
  CriticRateSeries series;
  series.seeds = seeds;
  series.checkpoints = log_checkpoints(steps);
  series.errors.assign(seeds.size(), std::vector<double>(series.checkpoints.size(), 0.0));
  const SoftmaxTabularPolicy policy(setup.mdp.num_states, setup.mdp.num_actions);
  const TrackerLayout layout =
      method == CriticMethod::td0 ? TrackerLayout::pooled() : setup.mdp.pair_layout();

  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    Rng rng(seeds[i]);
    const StationarySampler sampler(setup.mdp);
    CriticConfig config;
    config.method = method;
    config.schedule = schedule;
    Critic critic(config, setup.features.dim(), setup.mdp.gamma, layout);
    std::size_t next = 0;
    for (long t = 1; t <= steps; ++t) {
      critic.update(sampler.sample(policy, setup.policy_logits, rng), setup.features);
      if (t == series.checkpoints[next]) {
        series.errors[i][next] = (critic.xi() - setup.xi_star).norm();
        ++next;
      }
    }
  });

  series.mean.assign(series.checkpoints.size(), 0.0);
  for (const auto& e : series.errors)
    for (std::size_t j = 0; j < e.size(); ++j) series.mean[j] += e[j] / seeds.size();
  return series;
}

void write_rate_csv(std::ostream& out, const CriticRateSeries& s, const std::string& method) {
  out << "method,t,mean_error";
  for (std::uint64_t seed : s.seeds) out << ",seed_" << seed;
  out << '\n';
  for (std::size_t j = 0; j < s.checkpoints.size(); ++j) {
    out << method << ',' << s.checkpoints[j] << ',' << format_number(s.mean[j]);
    for (const auto& e : s.errors) out << ',' << format_number(e[j]);
    out << '\n';
  }
}

}  // namespace acrl

#include "acrl/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace acrl;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3 };

std::vector<std::string> read_header(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cols.push_back(c);
  return cols;
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError("window must look like lo..hi");
  return {std::stod(text.substr(0, dots)), std::stod(text.substr(dots + 2))};
}

int cmd_run(const std::string& config_path, const std::string& seeds, const std::string& out,
            const std::string& method, const std::string& env,
            const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (!env.empty()) cfg.set("env", env);
  if (!method.empty()) cfg.set("method", method);
  if (!seeds.empty()) cfg.set("seeds", seeds);
  if (!out.empty()) cfg.set("out", out);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const ExperimentResult result = run_experiment(cfg);
  std::cout << "wrote " << result.trace_files.size() << " traces and "
            << result.aggregate_file.string() << '\n';
  if (result.aborted_runs > 0) {
    for (std::size_t i = 0; i < result.traces.size(); ++i)
      if (result.traces[i].aborted)
        std::cerr << "seed " << cfg.seeds[i] << " aborted: " << result.traces[i].abort_reason
                  << '\n';
    return kRuntime;
  }
  return kOk;
}

int cmd_fit(const std::string& csv, const std::string& xcol, const std::string& ycol,
            const std::string& window, const std::string& method_filter) {
  const auto cols = read_header(csv);
  auto index = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return i;
    throw IoError(csv + ": missing column '" + name + "'");
  };
  const std::size_t xi = index(xcol);
  const std::size_t yi = index(ycol);
  const auto mcol = std::find(cols.begin(), cols.end(), "method");
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> x, y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (cells.size() != cols.size()) throw IoError(csv + ": ragged row");
    if (!method_filter.empty() && mcol != cols.end() &&
        cells[static_cast<std::size_t>(mcol - cols.begin())] != method_filter)
      continue;
    x.push_back(std::stod(cells[xi]));
    y.push_back(std::stod(cells[yi]));
  }
  const auto [lo, hi] = parse_window(window);
  const RateFit fit = fit_rate(x, y, lo, hi);
  std::cout << "slope=" << fit.slope << " intercept=" << fit.intercept << " points=" << fit.points
            << " residual=" << fit.residual << " window=[" << lo << ", " << hi << "]\n";
  return kOk;
}

int cmd_rates(const std::string& method, const std::string& seeds, long steps,
              const std::string& out, std::uint64_t instance_seed, const std::string& window) {
  const CriticMethod m = parse_critic_method(method);
  const CriticRateSetup setup = reference_rate_setup(instance_seed);
  const CriticRateSeries series =
      critic_rate_series(setup, m, rate_schedule(setup, m), parse_seeds(seeds), steps);
  fs::create_directories(out);
  const fs::path path = fs::path(out) / (method + "_rates.csv");
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  write_rate_csv(file, series, method);
  const auto [lo, hi] = parse_window(window);
  std::vector<double> t(series.checkpoints.begin(), series.checkpoints.end());
  const RateFit fit = fit_rate(t, series.mean, lo, hi);
  std::cout << "wrote " << path.string() << "\nomega=" << setup.omega
            << " sigma=" << setup.sigma << " slope=" << fit.slope << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Actor-critic experiments with TD(0), GTD and A-GTD critics"};
  app.require_subcommand(1);

  std::string config, seeds, out, method, env;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "run an actor-critic experiment over seeds");
  run->add_option("--config", config, "flat key=value config file");
  run->add_option("--seeds", seeds, "seed range a..b or list a,b,c");
  run->add_option("--out", out, "output directory");
  run->add_option("--method", method, "critic: td0|gtd|agtd");
  run->add_option("--env", env, "environment: nav|finite");
  run->add_option("--set", overrides, "extra key=value override (repeatable)");

  std::vector<std::string> traces;
  std::string agg_method = "td0", agg_out = ".";
  auto* agg = app.add_subcommand("aggregate", "aggregate per-seed trace CSVs");
  agg->add_option("traces", traces, "per-seed trace CSV files")->required();
  agg->add_option("--method", agg_method, "method label");
  agg->add_option("--out", agg_out, "output directory");

  std::string fit_csv, fit_x = "k", fit_y = "grad_proxy_mean", fit_window = "100..100000",
                       fit_method;
  auto* fit = app.add_subcommand("fit", "log-log slope of a CSV column");
  fit->add_option("csv", fit_csv, "CSV file")->required();
  fit->add_option("--x", fit_x, "abscissa column");
  fit->add_option("--y", fit_y, "value column");
  fit->add_option("--window", fit_window, "fit window lo..hi");
  fit->add_option("--method", fit_method, "keep only rows of this method");

  std::vector<std::string> aggregates;
  std::string plot_out = ".";
  auto* plot = app.add_subcommand("plot", "SVG plots from aggregate CSVs");
  plot->add_option("aggregates", aggregates, "aggregate CSV files");
  plot->add_option("--out", plot_out, "output directory");

  std::string rate_method = "td0", rate_seeds = "1..30", rate_out = ".",
              rate_window = "100..100000";
  long rate_steps = 100000;
  std::uint64_t rate_instance = 7;
  auto* rates = app.add_subcommand("rates", "critic error decay on the finite reference MDP");
  rates->add_option("--method", rate_method, "critic: td0|gtd|agtd");
  rates->add_option("--seeds", rate_seeds, "seed range");
  rates->add_option("--steps", rate_steps, "critic updates per seed");
  rates->add_option("--out", rate_out, "output directory");
  rates->add_option("--instance-seed", rate_instance, "seed of the reference MDP");
  rates->add_option("--window", rate_window, "fit window lo..hi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run) return cmd_run(config, seeds, out, method, env, overrides);
    if (*agg) {
      std::vector<fs::path> paths(traces.begin(), traces.end());
      std::cout << "wrote " << aggregate_files(paths, agg_method, agg_out).string() << '\n';
      return kOk;
    }
    if (*fit) return cmd_fit(fit_csv, fit_x, fit_y, fit_window, fit_method);
    if (*plot) {
      std::map<std::string, std::vector<AggregateRow>> series;
      for (const std::string& p : aggregates)
        for (const AggregateRow& row : read_aggregate_csv(p)) series[row.method].push_back(row);
      for (const fs::path& p : emit_plots(series, plot_out)) std::cout << "wrote " << p.string() << '\n';
      return kOk;
    }
    if (*rates)
      return cmd_rates(rate_method, rate_seeds, rate_steps, rate_out, rate_instance, rate_window);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "run aborted: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

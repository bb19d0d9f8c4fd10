#include "cli_app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "bteb/bteb.hpp"
#include "run_config.hpp"

namespace bteb::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Context {
  std::string command;
  Settings settings;
  fs::path out_dir;
  unsigned threads = 1;
  std::ostream* out = nullptr;
  std::vector<std::string> extra;  // command-specific k=v for the metadata line
};

// CSV file with a metadata comment line and a header.
class CsvWriter {
 public:
  CsvWriter(const Context& ctx, const std::string& name, const std::vector<std::string>& header)
      : path_(ctx.out_dir / name), file_(path_) {
    if (!file_) throw UsageError("cannot write " + path_.string());
    file_ << metadata_line(ctx) << '\n';
    write_row(header);
  }

  static std::string metadata_line(const Context& ctx) {
    std::string line = "# bteb " BTEB_VERSION " command=" + ctx.command + " " +
                       ctx.settings.echo(Settings::known_keys());
    for (const auto& e : ctx.extra) line += " " + e;
    return line;
  }

  void comment(const std::string& text) { file_ << "# " << text << '\n'; }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) file_ << (i ? "," : "") << cells[i];
    file_ << '\n';
  }

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream file_;
};

SupportCap table_cap(const Settings& s, const Prior& prior, int r) {
  if (const auto cap = s.find("cap")) {
    const std::int64_t c = s.get_int64("cap");
    if (c < r) throw UsageError("cap must be >= r");
    return SupportCap{r, c, prior.support_hi(), 1.0};
  }
  if (!(prior.support_hi() < 1.0)) {
    throw UsageError("prior support reaches 1; set cap explicitly (--cap)");
  }
  return support_cap(r, prior.support_hi(), s.get_double("tail_eps"));
}

ExperimentConfig experiment_config(const Context& ctx, std::int64_t n) {
  const Settings& s = ctx.settings;
  ExperimentConfig cfg;
  cfg.r = s.get_int("r");
  cfg.prior = s.prior();
  cfg.n = n;
  cfg.reps = s.get_int("reps");
  cfg.seed = s.get_uint64("seed");
  cfg.grid_m = s.get_int("grid_m");
  cfg.tail_eps = s.get_double("tail_eps");
  cfg.qzero = s.qzero();
  cfg.threads = ctx.threads;
  cfg.validate();
  return cfg;
}

// History from --history, or one simulated replication (stream (seed, 1)).
std::vector<std::int64_t> load_or_simulate_history(const Context& ctx, const std::string& history,
                                                   const BayesTable& bayes) {
  if (!history.empty()) return read_history_file(history);
  auto ns = ctx.settings.get_int_list("n");
  ExperimentConfig cfg = experiment_config(ctx, *std::max_element(ns.begin(), ns.end()));
  Rng rng = Rng::stream(cfg.seed, 1);
  const std::int64_t sampling_cap =
      std::min(bayes.cap(), support_cap(cfg.r, cfg.prior.support_hi(), kSamplingTailEps).cap);
  std::vector<std::int64_t> obs;
  for (std::int64_t i = 0; i < cfg.n; ++i) {
    obs.push_back(sample_inverse(BTParams(cfg.r, cfg.prior.sample(rng)), rng, sampling_cap));
  }
  return obs;
}

int cmd_dist(Context& ctx, double theta, std::optional<std::int64_t> x_from, std::optional<std::int64_t> x_to) {
  const int r = ctx.settings.get_int("r");
  const BTParams p(r, theta);
  const std::int64_t lo = x_from.value_or(r);
  const std::int64_t hi = x_to.value_or(r + 20);
  if (lo < r) throw UsageError("x range must start at or above r");
  if (hi < lo) throw UsageError("x range is empty");
  ctx.extra = {"theta=" + fmt_real(theta), "x_from=" + std::to_string(lo), "x_to=" + std::to_string(hi)};
  CsvWriter csv(ctx, "dist.csv", {"x", "pmf", "cdf"});
  CompensatedSum running;
  if (lo > r) running.add(cdf(p, lo - 1));
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double pmf = std::exp(log_pmf(p, x));
    running.add(pmf);
    csv.write_row({std::to_string(x), fmt_real(pmf), fmt_real(std::min(running.value(), 1.0))});
  }
  *ctx.out << "wrote " << csv.path().string() << '\n';
  return kExitOk;
}

int cmd_bayes_table(Context& ctx) {
  const int r = ctx.settings.get_int("r");
  const Prior prior = ctx.settings.prior();
  const BayesTable table = build_bayes_table(prior, table_cap(ctx.settings, prior, r), ctx.threads);
  CsvWriter csv(ctx, "bayes_table.csv", {"x", "theta_bayes", "posterior_second_moment", "marginal"});
  for (std::int64_t x = table.r(); x <= table.cap(); ++x) {
    csv.write_row({std::to_string(x), fmt_real(table.theta(x)), fmt_real(table.second_moment(x)),
                   fmt_real(table.marginal(x))});
  }
  *ctx.out << "bayes_risk=" << fmt_real(bayes_risk(table)) << " cap=" << table.cap()
           << " missing_mass=" << fmt_real(table.missing_mass()) << '\n'
           << "wrote " << csv.path().string() << '\n';
  return kExitOk;
}

struct EbSetup {
  BayesTable bayes;
  EBHistory history;
  EstimatorTable eb;
};

EbSetup eb_setup(Context& ctx, const std::string& history_path) {
  const int r = ctx.settings.get_int("r");
  const Prior prior = ctx.settings.prior();
  BayesTable bayes = build_bayes_table(prior, table_cap(ctx.settings, prior, r), ctx.threads);
  const auto obs = load_or_simulate_history(ctx, history_path, bayes);
  EBHistory history(r, obs);
  if (history.max_observation() > bayes.cap()) {
    throw UsageError("history contains x=" + std::to_string(history.max_observation()) +
                     " beyond the table cap " + std::to_string(bayes.cap()) + "; raise --cap");
  }
  EstimatorTable eb = eb_table(history, bayes.cap(), ctx.settings.qzero());
  if (!history_path.empty()) ctx.extra.push_back("history=" + history_path);
  return {std::move(bayes), std::move(history), std::move(eb)};
}

int cmd_eb(Context& ctx, const std::string& history_path) {
  const EbSetup s = eb_setup(ctx, history_path);
  CsvWriter csv(ctx, "eb_table.csv", {"x", "count", "psi", "q", "theta_eb"});
  for (std::int64_t x = s.eb.r(); x <= s.eb.cap(); ++x) {
    csv.write_row({std::to_string(x), std::to_string(s.history.count(x)), fmt_real(psi(s.history, x)),
                   fmt_real(q(s.history, x)), fmt_real(s.eb.at(x))});
  }
  *ctx.out << "n=" << s.history.n() << " regret_eb=" << fmt_real(regret_exact(s.eb, s.bayes)) << '\n'
           << "wrote " << csv.path().string() << '\n';
  return kExitOk;
}

int cmd_monotonize(Context& ctx, const std::string& history_path, const std::vector<std::int64_t>& dstar_x) {
  const EbSetup s = eb_setup(ctx, history_path);
  const MonotoneRule rule = monotonize(s.eb, ActionGrid::uniform(ctx.settings.get_int("grid_m")));
  for (const auto x : dstar_x) {
    if (x < s.eb.r() || x > s.eb.cap()) throw UsageError("--dstar-x value outside [r, cap]");
  }
  CsvWriter csv(ctx, "monotone.csv", {"x", "count", "theta_eb", "theta_monotone"});
  csv.comment("max_cdf_adjustment=" + fmt_real(rule.max_adjustment));
  for (std::int64_t x = s.eb.r(); x <= s.eb.cap(); ++x) {
    csv.write_row({std::to_string(x), std::to_string(s.history.count(x)), fmt_real(s.eb.at(x)),
                   fmt_real(rule.result.at(x))});
  }
  CsvWriter alpha(ctx, "alpha.csv", {"a", "alpha"});
  const auto& points = rule.grid.points();
  for (std::size_t i = 0; i < points.size(); ++i) alpha.write_row({fmt_real(points[i]), fmt_real(rule.alpha[i])});
  if (!dstar_x.empty()) {
    std::vector<std::string> header{"a"};
    for (const auto x : dstar_x) header.push_back("dstar_x" + std::to_string(x));
    CsvWriter dstar(ctx, "dstar.csv", header);
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::vector<std::string> row{fmt_real(points[i])};
      for (const auto x : dstar_x) row.push_back(fmt_real(rule.dstar_at_grid(i, x)));
      dstar.write_row(row);
    }
  }
  *ctx.out << "regret_eb=" << fmt_real(regret_exact(s.eb, s.bayes))
           << " regret_monotone=" << fmt_real(regret_exact(rule.result, s.bayes)) << '\n'
           << "wrote " << csv.path().string() << '\n';
  return kExitOk;
}

int cmd_reproduce_study(Context& ctx) {
  const auto ns = ctx.settings.get_int_list("n");
  const ExperimentConfig base = experiment_config(ctx, ns.front());
  const SupportCap cap = support_cap(base.r, base.prior.support_hi(), base.tail_eps);
  const BayesTable bayes = build_bayes_table(base.prior, cap, ctx.threads);

  std::vector<ExperimentReport> reports;
  for (const auto n : ns) reports.push_back(run_experiment(experiment_config(ctx, n), bayes));

  CsvWriter table(ctx, "table1.csv",
                  {"r", "n", "reps", "S_eb_mean", "S_eb_se", "S_mono_mean", "S_mono_se", "S_mle"});
  CsvWriter reps(ctx, "replications.csv", {"n", "replication", "regret_eb", "regret_mono"});
  for (const auto& rep : reports) {
    const auto& c = rep.config;
    table.write_row({std::to_string(c.r), std::to_string(c.n), std::to_string(c.reps), fmt_real(rep.s_eb_mean),
                     fmt_real(rep.s_eb_se), fmt_real(rep.s_mono_mean), fmt_real(rep.s_mono_se),
                     fmt_real(rep.s_mle)});
    for (const auto& one : rep.replications) {
      reps.write_row({std::to_string(c.n), std::to_string(one.index), fmt_real(one.regret_eb),
                      fmt_real(one.regret_mono)});
    }
    reps.write_row({std::to_string(c.n), "mean", fmt_real(rep.s_eb_mean), fmt_real(rep.s_mono_mean)});
    reps.write_row({std::to_string(c.n), "se", fmt_real(rep.s_eb_se), fmt_real(rep.s_mono_se)});
  }

  std::ostringstream summary;
  const ExperimentReport& first = reports.front();
  summary << CsvWriter::metadata_line(ctx) << '\n'
          << "prior=" << base.prior.describe() << '\n'
          << "r=" << base.r << '\n'
          << "cap=" << cap.cap << '\n'
          << "marginal_missing_mass=" << fmt_real(first.marginal_missing_mass) << '\n'
          << "bayes_risk=" << fmt_real(first.bayes_risk) << '\n'
          << "S_mle_squared=" << fmt_real(first.s_mle) << '\n'
          << "S_mle_unsquared=" << fmt_real(first.mle_signed_gap) << '\n';
  for (const auto& rep : reports) {
    summary << "n=" << rep.config.n << " reps=" << rep.config.reps << " S_eb_mean=" << fmt_real(rep.s_eb_mean)
            << " S_eb_se=" << fmt_real(rep.s_eb_se) << " S_mono_mean=" << fmt_real(rep.s_mono_mean)
            << " S_mono_se=" << fmt_real(rep.s_mono_se) << " truncated_draws=" << rep.truncation.truncated
            << "/" << rep.truncation.draws << " max_cdf_adjustment=" << fmt_real(rep.max_adjustment) << '\n';
  }
  std::ofstream file(ctx.out_dir / "study_summary.txt");
  if (!file) throw UsageError("cannot write study_summary.txt");
  file << summary.str();
  *ctx.out << summary.str();
  return kExitOk;
}

int cmd_figure1(Context& ctx) {
  const auto ns = ctx.settings.get_int_list("n");
  const ExperimentConfig cfg = experiment_config(ctx, *std::max_element(ns.begin(), ns.end()));
  const BayesTable bayes =
      build_bayes_table(cfg.prior, support_cap(cfg.r, cfg.prior.support_hi(), cfg.tail_eps), ctx.threads);
  const ReplicationResult rep = run_replication(cfg, 1, bayes);
  const EBHistory history(cfg.r, rep.observations);
  const std::int64_t last = std::min(bayes.cap(), history.max_observation() + 10);
  ctx.extra = {"figure_n=" + std::to_string(cfg.n)};
  CsvWriter csv(ctx, "estimates.csv", {"x", "count_n", "theta_eb", "theta_monotone", "theta_bayes"});
  for (std::int64_t x = cfg.r; x <= last; ++x) {
    csv.write_row({std::to_string(x), std::to_string(history.count(x)), fmt_real(rep.eb->at(x)),
                   fmt_real(rep.monotone->at(x)), fmt_real(bayes.theta(x))});
  }
  *ctx.out << "n=" << cfg.n << " eb_descents=" << rep.eb->descents() << " regret_eb=" << fmt_real(rep.regret_eb)
           << " regret_monotone=" << fmt_real(rep.regret_mono) << '\n'
           << "wrote " << csv.path().string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayes, empirical Bayes and monotone EB estimation for the Borel-Tanner distribution", "bteb"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  std::map<std::string, std::string> overrides;
  const auto override_opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };

  app.add_option("--config", config_path, "Key-value config file");
  app.add_option("--out", out_dir, "Output directory (default $BTEB_OUT_DIR or .)");
  app.add_option("--threads", threads, "Worker threads, 0 = auto");
  override_opt("--seed", "seed", "Base seed");
  override_opt("--r", "r", "Number of ancestors r");
  override_opt("--n", "n", "History size, or comma-separated list");
  override_opt("--reps", "reps", "Replications per n");
  override_opt("--grid-m", "grid_m", "Action grid intervals");
  override_opt("--tail-eps", "tail_eps", "Tail mass bound of the support cap");
  override_opt("--prior", "prior.kind", "uniform | beta");
  override_opt("--prior-a", "prior.a", "Uniform lower end");
  override_opt("--prior-b", "prior.b", "Uniform upper end");
  override_opt("--prior-v", "prior.v", "Beta first shape");
  override_opt("--prior-w", "prior.w", "Beta second shape");
  override_opt("--qzero", "qzero_convention", "Value where q_n(x)=0: one | zero | mle");
  override_opt("--cap", "cap", "Explicit support cap");

  auto* dist = app.add_subcommand("dist", "Borel-Tanner pmf and cdf over an x range")->fallthrough();
  double theta = 0.0;
  std::optional<std::int64_t> x_from;
  std::optional<std::int64_t> x_to;
  dist->add_option("--theta", theta, "Offspring mean in (0, 1)")->required();
  dist->add_option("--x-from", x_from, "First x (default r)");
  dist->add_option("--x-to", x_to, "Last x (default r + 20)");

  auto* bayes = app.add_subcommand("bayes-table", "Tabulate the Bayes rule, second moment and marginal")->fallthrough();
  std::string history_path;
  auto* eb = app.add_subcommand("eb", "Empirical Bayes table from a history file")->fallthrough();
  eb->add_option("--history", history_path, "One observation per line (default: simulate)");
  auto* mono = app.add_subcommand("monotonize", "Monotone EB table plus alpha/D* diagnostics")->fallthrough();
  std::vector<std::int64_t> dstar_x;
  mono->add_option("--history", history_path, "One observation per line (default: simulate)");
  mono->add_option("--dstar-x", dstar_x, "x values whose D*(a; x) columns are dumped")->delimiter(',');
  auto* study = app.add_subcommand("reproduce-study", "Bayes risk, MLE regret and the regret table (table1.csv)")->fallthrough();
  auto* fig = app.add_subcommand("figure1", "EB, monotone EB and Bayes estimates for one replication")->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("bteb");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.out = &out;
  ctx.threads = threads;
  try {
    ctx.settings = default_settings();
    if (!config_path.empty()) {
      load_config_file(config_path, ctx.settings);
    } else if (study->parsed()) {
      throw UsageError("reproduce-study requires --config");
    }
    for (const auto& [k, v] : overrides) ctx.settings.set(k, v);
    if (out_dir.empty()) {
      const char* env = std::getenv("BTEB_OUT_DIR");
      out_dir = env && *env ? env : ".";
    }
    ctx.out_dir = out_dir;
    fs::create_directories(ctx.out_dir);

    if (dist->parsed()) return cmd_dist(ctx, theta, x_from, x_to);
    if (bayes->parsed()) return cmd_bayes_table(ctx);
    if (eb->parsed()) return cmd_eb(ctx, history_path);
    if (mono->parsed()) return cmd_monotonize(ctx, history_path, dstar_x);
    if (study->parsed()) return cmd_reproduce_study(ctx);
    if (fig->parsed()) return cmd_figure1(ctx);
  } catch (const NumericError& e) {
    err << "numeric error in " << ctx.command << ": " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace bteb::cli

// evtinfo: max-score calculus for extreme-value limits.
// Subcommands: converge | check | score | kl | norming | sample.
// Exit codes: 0 success, 1 identity failure, 2 usage, 3 numerical divergence.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "evt/information.hpp"
#include "evt/montecarlo.hpp"
#include "evt/specfun.hpp"

using json = nlohmann::json;
using namespace evt;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct Table {
  std::vector<std::string> columns;
  json meta = json::object();
  std::vector<std::vector<json>> rows;
};

void write_csv(std::ostream& os, const Table& t) {
  for (auto it = t.meta.begin(); it != t.meta.end(); ++it) {
    os << "# " << it.key() << ": "
       << (it.value().is_string() ? it.value().get<std::string>()
                                  : it.value().dump())
       << "\n";
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << csv_quote(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      const json& cell = row[i];
      if (cell.is_null())
        ;  // empty field
      else if (cell.is_number_float())
        os << csv_quote(format_real(cell.get<double>()));
      else if (cell.is_number())
        os << cell.dump();
      else
        os << csv_quote(cell.get<std::string>());
    }
    os << "\n";
  }
}

void write_json_table(std::ostream& os, const Table& t) {
  json doc;
  doc["meta"] = t.meta;
  doc["rows"] = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = row[i];
    doc["rows"].push_back(std::move(obj));
  }
  os << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Shared options
// ---------------------------------------------------------------------------

struct Common {
  std::string format = "csv";
  std::string output;     // empty = stdout
  std::string spec_file;  // custom von Mises config
  double tol = kDefaultQuadTol;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    if (const char* env = std::getenv("EVTINFO_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && v > 0.0) tol = v;  // flag below still overrides
    }
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", output, "write to a file instead of stdout");
    cmd->add_option("--spec", spec_file, "von Mises spec file for dist 'custom'");
    cmd->add_option("--tol", tol, "quadrature tolerance (overrides EVTINFO_TOL)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Monte Carlo seed");
  }

  void emit(const Table& t) const {
    if (output.empty()) {
      format == "json" ? write_json_table(std::cout, t) : write_csv(std::cout, t);
      return;
    }
    std::ofstream os(output, std::ios::binary);
    if (!os) throw UsageError("cannot open output file: " + output);
    format == "json" ? write_json_table(os, t) : write_csv(os, t);
  }

  json base_meta(const std::string& command) const {
    json m = json::object();
    m["tool"] = "evtinfo";
    m["version"] = kVersion;
    m["command"] = command;
    m["tol"] = tol;
    return m;
  }
};

struct DistParams {
  double lambda = 1.0;
  double mu = 0.0;
  double beta = 1.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "exponential rate")->check(CLI::PositiveNumber);
    cmd->add_option("--mu", mu, "Gumbel location");
    cmd->add_option("--beta", beta, "Gumbel scale")->check(CLI::PositiveNumber);
  }
};

Distribution resolve_distribution(const std::string& name, const DistParams& p,
                                  const std::string& spec_file) {
  if (name == "exponential") return make_exponential(p.lambda);
  if (name == "gumbel") return make_gumbel(p.mu, p.beta);
  if (name == "gnedenko") return make_gnedenko();
  if (name == "custom") {
    if (spec_file.empty())
      throw UsageError("dist 'custom' needs --spec <file>");
    return load_von_mises_file(spec_file);
  }
  if (std::filesystem::exists(name)) return load_von_mises_file(name);
  throw UsageError("unknown distribution '" + name +
                   "' (expected exponential|gumbel|gnedenko|custom|<spec file>)");
}

void write_plot_data(const std::string& path, const std::string& xlabel,
                     const std::string& ylabel,
                     const std::vector<std::pair<double, double>>& points) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open plot-data file: " + path);
  os << "# " << xlabel << " " << ylabel << "\n";
  for (const auto& [x, y] : points)
    os << format_real(x) << " " << format_real(y) << "\n";
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

struct ConvergeArgs {
  std::string dist;
  DistParams params;
  std::vector<std::uint64_t> ns;
  std::string method = "quadrature";
  std::uint64_t samples = 100000;
  int threads = 1;
  std::string plot_data;
};

int run_converge(const Common& common, const ConvergeArgs& args) {
  const Distribution dist =
      resolve_distribution(args.dist, args.params, common.spec_file);
  Table table;
  table.columns = {"n",          "a_n",       "b_n",
                   "entropy",    "entropy_target", "kl",
                   "score_gap",  "harmonic_gap",   "mean_term",
                   "mgf_bracket", "error"};
  table.meta = common.base_meta("converge");
  table.meta["dist"] = dist.name;
  table.meta["method"] = args.method;
  if (args.method == "mc") {
    table.meta["seed"] = common.seed;
    table.meta["samples"] = args.samples;
    table.meta["generator"] = kGeneratorName;
    table.meta["chunk_size"] = kChunkSize;
  }

  bool diverged = false;
  std::vector<std::pair<double, double>> plot;
  for (std::size_t row_index = 0; row_index < args.ns.size(); ++row_index) {
    const std::uint64_t n = args.ns[row_index];
    std::vector<json> row(table.columns.size(), json());
    row[0] = n;
    try {
      const NormalizedMax nm = normalized_max(dist, n);
      row[1] = nm.norming.a;
      row[2] = nm.norming.b;
      const double n_real = static_cast<double>(n);
      double entropy, score_gap, mean_term, mgf_bracket;
      const double harmonic_gap = std::log(n_real) - harmonic(n);
      if (!nm.base.von_mises)
        throw unsupported_error(dist.name + ": converge needs a von Mises spec");
      const VonMisesSpec& vm = *nm.base.von_mises;
      if (args.method == "mc") {
        const SeededStream stream{common.seed, row_index};
        const auto zs =
            sample_normalized_max(nm, stream, args.samples, args.threads);
        long double s_score = 0, s_logg = 0, s_mean = 0, s_mgf = 0;
        for (const double z : zs) {
          const double y = nm.norming.a * z + nm.norming.b;
          s_score += normalized_max_score(nm, z);
          s_logg += std::log(vm.g(y));
          s_mean += z;
          s_mgf += std::exp(-z);
        }
        const long double count = static_cast<long double>(zs.size());
        entropy = static_cast<double>(1.0L - s_score / count);
        score_gap = static_cast<double>(
            std::log(vm.g(nm.norming.b)) - static_cast<double>(s_logg / count));
        mean_term = static_cast<double>(s_mean / count);
        mgf_bracket = static_cast<double>(s_mgf / count) - 1.0;
      } else {
        entropy = entropy_via_score(as_distribution(nm), common.tol);
        const KlDecomposition dec = kl_decomposition(nm, {0.0, 1.0}, common.tol);
        score_gap = dec.score_gap;
        mean_term = dec.mean_term;
        mgf_bracket = dec.mgf_bracket;
      }
      const double kl =
          (score_gap + harmonic_gap + 1.0 / n_real + mean_term) + mgf_bracket;
      row[3] = entropy;
      row[4] = 1.0 + kEulerGamma;
      row[5] = kl;
      row[6] = score_gap;
      row[7] = harmonic_gap;
      row[8] = mean_term;
      row[9] = mgf_bracket;
      plot.emplace_back(n_real, kl);
    } catch (const error& e) {
      row[10] = std::string(e.what());
      diverged = true;
    }
    table.rows.push_back(std::move(row));
  }
  common.emit(table);
  if (!args.plot_data.empty()) write_plot_data(args.plot_data, "n", "kl", plot);
  return diverged ? 3 : 0;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int run_check(const Common& common, const std::string& dist_name,
              const DistParams& params) {
  std::vector<Distribution> laws;
  if (dist_name.empty()) {
    laws.push_back(make_exponential(1.0));
    laws.push_back(make_gumbel(0.0, 1.0));
    laws.push_back(make_gnedenko());
  } else {
    laws.push_back(resolve_distribution(dist_name, params, common.spec_file));
  }
  const double tol = 1e-8;
  std::ostream* osp = &std::cout;
  std::ofstream file;
  if (!common.output.empty()) {
    file.open(common.output, std::ios::binary);
    if (!file) throw UsageError("cannot open output file: " + common.output);
    osp = &file;
  }
  std::ostream& os = *osp;

  int failures = 0;
  std::string first_failure;
  auto report = [&](const std::string& label, double measured, double target,
                    double tolerance) {
    const bool ok = std::fabs(measured - target) <= tolerance;
    char line[160];
    std::snprintf(line, sizeof(line), "%s: %.6f target %.6f %s", label.c_str(),
                  measured, target, ok ? "ok" : "FAIL");
    os << line << "\n";
    if (!ok && ++failures == 1) first_failure = label;
  };

  for (const auto& law : laws) {
    os << "== " << law.name << " ==\n";
    report("E log F(X)",
           expectation(law, [&law](double x) { return law.log_cdf(x); },
                       common.tol)
               .value,
           -1.0, tol);
    report("E log(1-F(X))",
           expectation(law, [&law](double x) { return log_survival(law, x); },
                       common.tol)
               .value,
           -1.0, tol);
    for (std::uint64_t n : {1, 2, 5, 10}) {
      report("E log F(M_" + std::to_string(n) + ")",
             expected_log_cdf_at_max(law, n, common.tol),
             -1.0 / static_cast<double>(n), tol);
    }
    for (std::uint64_t n : {1, 2, 5, 10}) {
      report("-E log(1-F(M_" + std::to_string(n) + "))",
             expected_log_tail_at_max(law, n, common.tol), harmonic(n), tol);
    }
    const double h_score = entropy_via_score(law, common.tol);
    const double h_direct = entropy_direct(law, common.tol);
    report("entropy via score vs direct", h_score, h_direct, 1e-7);
  }
  os << (failures == 0 ? "all identities ok"
                       : "FAILED: " + std::to_string(failures) +
                             " identity check(s), first: " + first_failure)
     << "\n";
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::string dist;
  DistParams params;
  std::vector<double> xs;
  std::string grid;  // lo:hi:count
  std::uint64_t normalized = 0;
  std::string plot_data;
};

int run_score(const Common& common, const ScoreArgs& args) {
  const Distribution dist =
      resolve_distribution(args.dist, args.params, common.spec_file);
  std::vector<double> xs = args.xs;
  if (!args.grid.empty()) {
    double lo, hi;
    int count;
    if (std::sscanf(args.grid.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
        count < 2 || !(lo < hi))
      throw UsageError("bad --grid (expected lo:hi:count): " + args.grid);
    for (int i = 0; i < count; ++i)
      xs.push_back(lo + (hi - lo) * i / (count - 1));
  }
  if (xs.empty()) throw UsageError("score: no points (use --x or --grid)");

  Table table;
  table.columns = {"x", "theta", "hazard", "error"};
  table.meta = common.base_meta("score");
  table.meta["dist"] = dist.name;
  std::optional<NormalizedMax> nm;
  std::optional<Distribution> law_n;
  if (args.normalized > 0) {
    nm = normalized_max(dist, args.normalized);
    law_n = as_distribution(*nm);
    table.meta["normalized_n"] = args.normalized;
  }
  std::vector<std::pair<double, double>> plot;
  for (const double x : xs) {
    std::vector<json> row(table.columns.size(), json());
    row[0] = x;
    try {
      double theta, hz;
      if (nm) {
        theta = normalized_max_score(*nm, x);
        hz = hazard(*law_n, x);
      } else {
        theta = max_score(dist, x);
        hz = hazard(dist, x);
      }
      row[1] = theta;
      row[2] = hz;
      plot.emplace_back(x, theta);
    } catch (const error& e) {
      row[3] = std::string(e.what());
    }
    table.rows.push_back(std::move(row));
  }
  common.emit(table);
  if (!args.plot_data.empty())
    write_plot_data(args.plot_data, "x", "theta", plot);
  return 0;
}

// ---------------------------------------------------------------------------
// kl
// ---------------------------------------------------------------------------

struct KlArgs {
  std::string dist;
  DistParams params;
  std::vector<std::uint64_t> ns;  // empty: the base law itself
  double target_mu = 0.0;
  double target_beta = 1.0;
};

int run_kl(const Common& common, const KlArgs& args) {
  const Distribution dist =
      resolve_distribution(args.dist, args.params, common.spec_file);
  const GumbelParams target{args.target_mu, args.target_beta};
  const bool standard = target.mu == 0.0 && target.beta == 1.0;

  Table table;
  table.columns = {"n",         "target_mu",    "target_beta", "kl",
                   "score_gap", "harmonic_gap", "inv_n",       "mean_term",
                   "mgf_bracket", "error"};
  table.meta = common.base_meta("kl");
  table.meta["dist"] = dist.name;

  bool diverged = false;
  auto make_row = [&](std::optional<std::uint64_t> n) {
    std::vector<json> row(table.columns.size(), json());
    if (n) row[0] = *n;
    row[1] = target.mu;
    row[2] = target.beta;
    try {
      if (!n) {
        row[3] = kl_to_gumbel(dist, target, common.tol);
      } else if (standard && dist.von_mises) {
        const KlDecomposition dec =
            kl_decomposition(normalized_max(dist, *n), target, common.tol);
        row[3] = dec.total;
        row[4] = dec.score_gap;
        row[5] = dec.harmonic_gap;
        row[6] = dec.inv_n;
        row[7] = dec.mean_term;
        row[8] = dec.mgf_bracket;
      } else {
        row[3] = kl_to_gumbel(as_distribution(normalized_max(dist, *n)),
                              target, common.tol);
      }
    } catch (const error& e) {
      row[9] = std::string(e.what());
      diverged = true;
    }
    table.rows.push_back(std::move(row));
  };

  if (args.ns.empty())
    make_row(std::nullopt);
  else
    for (std::uint64_t n : args.ns) make_row(n);
  common.emit(table);
  return diverged ? 3 : 0;
}

// ---------------------------------------------------------------------------
// norming
// ---------------------------------------------------------------------------

int run_norming(const Common& common, const std::string& dist_name,
                const DistParams& params, const std::vector<std::uint64_t>& ns) {
  const Distribution dist =
      resolve_distribution(dist_name, params, common.spec_file);
  Table table;
  table.columns = {"n", "a_n", "b_n", "error"};
  table.meta = common.base_meta("norming");
  table.meta["dist"] = dist.name;
  bool diverged = false;
  for (std::uint64_t n : ns) {
    std::vector<json> row(table.columns.size(), json());
    row[0] = n;
    try {
      const NormingConstants c = norming_constants(dist, n);
      row[1] = c.a;
      row[2] = c.b;
    } catch (const error& e) {
      row[3] = std::string(e.what());
      diverged = true;
    }
    table.rows.push_back(std::move(row));
  }
  common.emit(table);
  return diverged ? 3 : 0;
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

struct SampleArgs {
  std::string dist;
  DistParams params;
  std::uint64_t count = 1000;
  std::uint64_t normalized = 0;
  std::uint64_t stream = 0;
  int threads = 1;
  bool max_of_n = false;
};

int run_sample(const Common& common, const SampleArgs& args) {
  const Distribution dist =
      resolve_distribution(args.dist, args.params, common.spec_file);
  std::vector<double> values;
  if (args.normalized > 0) {
    const NormalizedMax nm = normalized_max(dist, args.normalized);
    values = args.max_of_n
                 ? sample_normalized_max_by_maximum(
                       nm, {common.seed, args.stream}, args.count)
                 : sample_normalized_max(nm, {common.seed, args.stream},
                                         args.count, args.threads);
  } else {
    if (args.max_of_n) throw UsageError("--max-of-n needs --normalized");
    values = sample(dist, {common.seed, args.stream}, args.count, args.threads);
  }
  Table table;
  table.columns = {"value"};
  table.meta = common.base_meta("sample");
  table.meta["dist"] = dist.name;
  table.meta["generator"] = kGeneratorName;
  table.meta["seed"] = common.seed;
  table.meta["stream"] = args.stream;
  table.meta["chunk_size"] = kChunkSize;
  table.meta["count"] = args.count;
  if (args.normalized > 0) table.meta["normalized_n"] = args.normalized;
  if (args.max_of_n) table.meta["path"] = "max-of-n";
  for (const double v : values) table.rows.push_back({json(v)});
  common.emit(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-score calculus for extreme-value limits (Gumbel domain)"};
  app.require_subcommand(1);

  Common common;
  ConvergeArgs conv;
  ScoreArgs score;
  KlArgs kl;
  SampleArgs smp;
  std::string check_dist;
  DistParams check_params;
  std::string norming_dist;
  DistParams norming_params;
  std::vector<std::uint64_t> norming_ns;

  CLI::App* c_conv = app.add_subcommand(
      "converge", "per-n norming constants, entropy and KL decomposition");
  c_conv->add_option("dist", conv.dist, "distribution name or spec file")->required();
  conv.params.add_to(c_conv);
  common.add_to(c_conv);
  c_conv->add_option("--n", conv.ns, "block sizes")->required()->delimiter(',');
  c_conv->add_option("--method", conv.method, "quadrature or mc")
      ->check(CLI::IsMember({"quadrature", "mc"}));
  c_conv->add_option("--samples", conv.samples, "Monte Carlo sample count");
  c_conv->add_option("--threads", conv.threads, "Monte Carlo workers")
      ->check(CLI::PositiveNumber);
  c_conv->add_option("--plot-data", conv.plot_data,
                     "write gnuplot-compatible n-vs-kl data to a file");

  CLI::App* c_check =
      app.add_subcommand("check", "distribution-free identity suite");
  c_check->add_option("dist", check_dist, "optional single distribution");
  check_params.add_to(c_check);
  common.add_to(c_check);

  CLI::App* c_score =
      app.add_subcommand("score", "pointwise max-score and hazard table");
  c_score->add_option("dist", score.dist)->required();
  score.params.add_to(c_score);
  common.add_to(c_score);
  c_score->add_option("--x", score.xs, "evaluation points")->delimiter(',');
  c_score->add_option("--grid", score.grid, "lo:hi:count");
  c_score->add_option("--normalized", score.normalized,
                      "score of the normalized maximum N_n");
  c_score->add_option("--plot-data", score.plot_data,
                      "write gnuplot-compatible x-vs-theta data to a file");

  CLI::App* c_kl = app.add_subcommand("kl", "relative entropy to a Gumbel");
  c_kl->add_option("dist", kl.dist)->required();
  kl.params.add_to(c_kl);
  common.add_to(c_kl);
  c_kl->add_option("--n", kl.ns, "block sizes (omit for the base law)")
      ->delimiter(',');
  c_kl->add_option("--target-mu", kl.target_mu, "Gumbel target location");
  c_kl->add_option("--target-beta", kl.target_beta, "Gumbel target scale")
      ->check(CLI::PositiveNumber);

  CLI::App* c_norm = app.add_subcommand("norming", "norming constants a_n, b_n");
  c_norm->add_option("dist", norming_dist)->required();
  norming_params.add_to(c_norm);
  common.add_to(c_norm);
  c_norm->add_option("--n", norming_ns, "block sizes")->required()->delimiter(',');

  CLI::App* c_smp = app.add_subcommand("sample", "seeded reproducible sampling");
  c_smp->add_option("dist", smp.dist)->required();
  smp.params.add_to(c_smp);
  common.add_to(c_smp);
  c_smp->add_option("--count", smp.count, "number of samples");
  c_smp->add_option("--normalized", smp.normalized, "sample N_n instead");
  c_smp->add_option("--stream", smp.stream, "stream id");
  c_smp->add_option("--threads", smp.threads, "workers")->check(CLI::PositiveNumber);
  c_smp->add_flag("--max-of-n", smp.max_of_n,
                  "literal max over n draws (self-check path)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_conv->parsed()) return run_converge(common, conv);
    if (c_check->parsed()) return run_check(common, check_dist, check_params);
    if (c_score->parsed()) return run_score(common, score);
    if (c_kl->parsed()) return run_kl(common, kl);
    if (c_norm->parsed())
      return run_norming(common, norming_dist, norming_params, norming_ns);
    if (c_smp->parsed()) return run_sample(common, smp);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

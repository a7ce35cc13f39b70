#pragma once

// Command-line front end. Exit codes: 0 ok, 1 verification failure,
// 2 usage error, 3 I/O error.

#include "blochflow/blochflow.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace blochflow::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FamilyArgs {
  std::string name;
  double gamma = 0.1;
  double f = 4.0;
  double omega = 1.25;
  double shift = 0.0;
  double rate = 1.0;
  std::string file;
};

inline void add_family_options(CLI::App& cmd, FamilyArgs& fa) {
  cmd.add_option("--family", fa.name, "gad | isotropic | spin | collapse | custom")->required();
  cmd.add_option("--gamma", fa.gamma, "decay rate (gad, isotropic)");
  cmd.add_option("--f", fa.f, "bath oscillation frequency (gad)");
  cmd.add_option("--omega", fa.omega, "spin coupling frequency (spin)");
  cmd.add_option("--c", fa.shift, "collapse target z (collapse)");
  cmd.add_option("--k", fa.rate, "collapse rate (collapse)");
  cmd.add_option("--file", fa.file, "CSV table of (t, T, c) rows (custom)");
}

inline ChannelFamily build_family(const FamilyArgs& fa) {
  try {
    if (fa.name == "gad") return family_gad(fa.gamma, fa.f);
    if (fa.name == "isotropic") return family_isotropic_decay(fa.gamma);
    if (fa.name == "spin") return family_spin_cosine(fa.omega);
    if (fa.name == "collapse") return family_collapse_shift(fa.shift, fa.rate);
    if (fa.name == "custom") {
      if (fa.file.empty()) throw UsageError("--family custom requires --file");
      std::ifstream in(fa.file);
      if (!in) throw IoError("cannot read " + fa.file);
      return family_from_samples(read_channel_samples(in));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown family '" + fa.name + "'");
}

inline BlochVector parse_bloch(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("bad Bloch vector component '" + cell + "'");
    }
  }
  if (v.size() != 3) throw UsageError("Bloch vector needs 3 comma-separated components: '" + text + "'");
  BlochVector r(v[0], v[1], v[2]);
  if (!is_physical(r)) throw UsageError("Bloch vector '" + text + "' lies outside the unit ball");
  return r;
}

/// Writes text to path, or to `out` when path is "-". All output is produced
/// before this is called.
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path);
  file << text;
  if (!file.flush()) throw IoError("write failed for " + path);
}

/// Reads a flat key=value file and turns it into `--key value` tokens.
inline std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    tokens.push_back("--" + trim(line.substr(0, eq)));
    tokens.push_back(trim(line.substr(eq + 1)));
  }
  return tokens;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"traj", "figure", "classify", "verify"};
  return names;
}

/// Pulls `--config FILE` out of args and splices the file's tokens in right after
/// the subcommand, so explicit flags (which come later) take precedence.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config.empty()) return args;
  auto extra = config_tokens(config);
  auto cmd = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(command_names().begin(), command_names().end(), a) != command_names().end();
  });
  if (cmd == args.end()) throw UsageError("--config requires a subcommand");
  args.insert(std::next(cmd), extra.begin(), extra.end());
  return args;
}

inline std::string series_to_json(const DistanceSeries& s) {
  json j;
  json t = json::array(), d = json::array();
  for (std::size_t k = 0; k < s.size(); ++k) {
    t.push_back(json_number(s.times[k]));
    d.push_back(json_number(s.values[k]));
  }
  j["t"] = std::move(t);
  j["D"] = std::move(d);
  return j.dump(2) + "\n";
}

inline std::string series_to_csv(const DistanceSeries& s) {
  std::ostringstream os;
  write_series_csv(os, s);
  return os.str();
}

struct FigureCurve {
  std::string file;
  DistanceSeries series;
};

/// Curves of figure n with the published parameters.
inline std::vector<FigureCurve> figure_curves(int n, std::size_t points = 500) {
  constexpr double p = 0.25;
  std::vector<FigureCurve> out;
  if (n == 1) {
    const auto fam = family_gad(0.1, 4.0);
    const auto grid = time_grid(5.0, points);
    out.push_back({"fig1_text_pair.csv", distance_trajectory(fam, {1, 0, 0}, {0, 1, 0}, p, grid)});
    out.push_back({"fig1_caption_pair.csv", distance_trajectory(fam, {0, 0, 1}, {1, 0, 0}, p, grid)});
  } else if (n == 2) {
    const auto fam = family_isotropic_decay(0.1);
    const auto grid = time_grid(20.0, points);
    for (const auto& [label, r] : std::vector<std::pair<std::string, double>>{
             {"0.25", 0.25}, {"0.5", 0.5}, {"0.75", 0.75}, {"1.0", 1.0}})
      out.push_back({"fig2_r" + label + ".csv", distance_trajectory(fam, {0, 0, r}, {0, 0, -r}, p, grid)});
  } else if (n == 3) {
    const auto fam = family_spin_cosine(1.25);
    const auto grid = time_grid(10.0, points);
    out.push_back({"fig3_equatorial.csv", distance_trajectory(fam, {1, 0, 0}, {-1, 0, 0}, p, grid)});
    out.push_back({"fig3_zaxis.csv", distance_trajectory(fam, {0, 0, 1}, {0, 0, -1}, p, grid)});
  } else {
    throw UsageError("figure must be 1, 2 or 3");
  }
  return out;
}

inline json suites_to_json(const std::vector<SuiteResult>& suites, std::uint64_t seed) {
  json j;
  j["seed"] = seed;
  bool all = true;
  json arr = json::array();
  for (const auto& s : suites) {
    json props = json::array();
    for (const auto& p : s.properties)
      props.push_back({{"name", p.name}, {"passed", p.passed}, {"worst", json_number(p.worst)}, {"detail", p.detail}});
    arr.push_back({{"suite", s.suite}, {"passed", s.passed()}, {"properties", std::move(props)}});
    all &= s.passed();
  }
  j["passed"] = all;
  j["suites"] = std::move(arr);
  return j;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"blochflow: qubit channel distinguishability and divisibility toolkit", "blochflow"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "flat key=value file with subcommand flags (flags on the command line win)");
  const unsigned threads = threads_from_env();

  FamilyArgs traj_family;
  std::string r1_text = "1,0,0", r2_text = "0,1,0", traj_out = "-", traj_format = "csv";
  double traj_p = 0.5, traj_tmax = 10.0;
  std::size_t traj_n = 500;
  auto* traj = app.add_subcommand("traj", "distance trajectory of one state pair");
  add_family_options(*traj, traj_family);
  traj->add_option("--r1", r1_text, "first Bloch vector x,y,z");
  traj->add_option("--r2", r2_text, "second Bloch vector x,y,z");
  traj->add_option("--p", traj_p, "preparation probability of the first state")->check(CLI::Range(0.0, 1.0));
  traj->add_option("--tmax", traj_tmax, "final time")->check(CLI::PositiveNumber);
  traj->add_option("--n", traj_n, "number of grid points")->check(CLI::Range(2, 10000000));
  traj->add_option("--out", traj_out, "output file, - for stdout");
  traj->add_option("--format", traj_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  int fig_n = 0;
  std::string fig_dir = ".";
  std::size_t fig_points = 500;
  auto* figure = app.add_subcommand("figure", "write the data behind figure 1, 2 or 3");
  figure->add_option("number", fig_n, "figure number (1, 2 or 3)")->required()->check(CLI::IsMember({1, 2, 3}));
  figure->add_option("--out-dir", fig_dir, "directory for the CSV files");
  figure->add_option("--n", fig_points, "grid points per curve")->check(CLI::Range(2, 10000000));

  FamilyArgs cls_family;
  double cls_tmax = 10.0;
  std::size_t cls_intervals = kDefaultIntervals, cls_samples = kDefaultSphereSamples;
  std::string cls_out = "-";
  auto* classify = app.add_subcommand("classify", "CP/P divisibility report as JSON");
  add_family_options(*classify, cls_family);
  classify->add_option("--tmax", cls_tmax, "final time (custom families default to the table's last time)");
  classify->add_option("--intervals", cls_intervals, "uniform grid intervals")->check(CLI::Range(2, 1000000));
  classify->add_option("--samples", cls_samples, "sphere samples for the positivity test")->check(CLI::PositiveNumber);
  classify->add_option("--out", cls_out, "output file, - for stdout");

  std::string suite = "all", verify_out = "-";
  std::uint64_t seed = 42;
  auto* verify = app.add_subcommand("verify", "run verification suites; exit 1 on failure");
  verify->add_option("suite", suite, "oracle | theorem1 | theorem2 | contraction | all")
      ->check(CLI::IsMember({"oracle", "theorem1", "theorem2", "contraction", "all"}));
  verify->add_option("--seed", seed, "seed for randomized suites");
  verify->add_option("--out", verify_out, "summary file, - for stdout");

  try {
    args = expand_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }

  try {
    if (*traj) {
      const auto fam = build_family(traj_family);
      const auto r1 = parse_bloch(r1_text), r2 = parse_bloch(r2_text);
      const auto series = distance_trajectory(fam, r1, r2, traj_p, time_grid(traj_tmax, traj_n));
      emit(traj_out, traj_format == "json" ? series_to_json(series) : series_to_csv(series), out);
      return kOk;
    }
    if (*figure) {
      const auto curves = figure_curves(fig_n, fig_points);
      std::error_code ec;
      std::filesystem::create_directories(fig_dir, ec);
      if (ec) throw IoError("cannot create " + fig_dir + ": " + ec.message());
      for (const auto& c : curves) {
        const auto path = (std::filesystem::path(fig_dir) / c.file).string();
        emit(path, series_to_csv(c.series), out);
        out << path << "\n";
      }
      return kOk;
    }
    if (*classify) {
      const auto fam = build_family(cls_family);
      double t_max = cls_tmax;
      if (cls_family.name == "custom" && classify->count("--tmax") == 0) t_max = *fam.param("t_last");
      ClassifyOptions opt;
      opt.sphere_samples = cls_samples;
      opt.threads = threads;
      DivisibilityReport report;
      try {
        report = classify_family(fam, uniform_grid(t_max, cls_intervals), opt);
      } catch (const std::out_of_range& e) {
        throw UsageError(std::string("classification grid leaves the family's time range: ") + e.what());
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      json j = to_json(report);
      j["family"] = fam.name;
      json params = json::object();
      for (const auto& [k, v] : fam.params) params[k] = json_number(v);
      j["params"] = std::move(params);
      emit(cls_out, j.dump(2) + "\n", out);
      return kOk;
    }
    if (*verify) {
      const auto suites = run_verify(suite, seed, threads);
      const json j = suites_to_json(suites, seed);
      emit(verify_out, j.dump(2) + "\n", out);
      return j["passed"].get<bool>() ? kOk : kVerifyFailed;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const UndeterminedClassification& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace blochflow::cli

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dnls/errors.hpp"
#include "dnls/experiment.hpp"

namespace {

struct Common {
  std::string out;
  std::int64_t seed = -1;
  bool quiet = false;
};

struct Inline {
  double omega = 1.0;
  double alpha = 0.0;
  double L = 20.0;
  int n = 2001;
  double dt = 5e-4;
  double t_end = 10.0;
  double delta = 0.0;
  int sample_every = 20;
  std::string name;
  std::string gs_mode = "halfline";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output root; artifacts go to <out>/<name>/");
  app->add_option("--seed", c.seed, "RNG seed (overrides rng_seed)")->check(CLI::NonNegativeNumber);
  app->add_flag("--quiet", c.quiet, "Suppress progress output");
}

void add_inline(CLI::App* app, Inline& in, bool dynamic) {
  app->add_option("--omega", in.omega, "Frequency omega")->capture_default_str();
  app->add_option("--alpha", in.alpha, "Robin coefficient alpha")->capture_default_str();
  app->add_option("--L", in.L, "Box length")->capture_default_str();
  app->add_option("--n", in.n, "Node count (odd)")->capture_default_str();
  app->add_option("--name", in.name, "Experiment name (defaults to the verb)");
  if (dynamic) {
    app->add_option("--dt", in.dt, "Time step")->capture_default_str();
    app->add_option("--t-end", in.t_end, "Final time")->capture_default_str();
    app->add_option("--delta", in.delta, "Initial data (1 + delta) phi")->capture_default_str();
    app->add_option("--sample-every", in.sample_every, "Accepted steps between records")->capture_default_str();
  }
}

dnls::ExperimentConfig inline_config(const Inline& in, dnls::ExperimentKind kind) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "name = " << (in.name.empty() ? dnls::to_string(kind) : in.name) << '\n'
     << "kind = " << dnls::to_string(kind) << '\n'
     << "omega = " << in.omega << '\n'
     << "alpha = " << in.alpha << '\n'
     << "L = " << in.L << '\n'
     << "n = " << in.n << '\n';
  if (kind == dnls::ExperimentKind::groundstate) os << "gs_mode = " << in.gs_mode << '\n';
  if (kind == dnls::ExperimentKind::evolve) {
    os << "dt = " << in.dt << '\n'
       << "t_end = " << in.t_end << '\n'
       << "delta = " << in.delta << '\n'
       << "sample_every = " << in.sample_every << '\n';
  }
  std::istringstream is(os.str());
  return dnls::parse_config(is);
}

dnls::RunOptions options(const Common& c) {
  dnls::RunOptions o;
  if (!c.out.empty()) o.output_dir = c.out;
  if (c.seed >= 0) o.seed = static_cast<std::uint64_t>(c.seed);
  o.quiet = c.quiet;
  return o;
}

void print_summary(const dnls::ExperimentSummary& s) {
  std::cout << s.to_json() << '\n';
}

int report(const dnls::Diagnostics& d) {
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : d.errors) std::cerr << "error: " << e << '\n';
  if (d.ok()) std::cout << "ok (" << d.warnings.size() << " warnings)\n";
  return d.ok() ? 0 : 2;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw dnls::ParameterError("bad sweep value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the derivative NLS on the half-line with a Robin boundary"};
  app.require_subcommand(1);

  Common common;
  Inline in;
  std::string config_path;
  std::string param;
  std::string values;

  auto* profile = app.add_subcommand("profile", "Sample the standing-wave profile and check its residuals");
  add_inline(profile, in, false);
  add_common(profile, common);

  auto* gs = app.add_subcommand("groundstate", "Minimize the action on the Nehari manifold");
  add_inline(gs, in, false);
  gs->add_option("--mode", in.gs_mode, "halfline or line_even")
      ->check(CLI::IsMember({"halfline", "line_even"}))
      ->capture_default_str();
  add_common(gs, common);

  auto* ev = app.add_subcommand("evolve", "Evolve (1 + delta) phi and record diagnostics");
  add_inline(ev, in, true);
  add_common(ev, common);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  add_common(run, common);

  auto* val = app.add_subcommand("validate", "Check a config file without running it");
  val->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  auto* sw = app.add_subcommand("sweep", "Run a config once per parameter value");
  sw->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", param, "omega, alpha, lambda, delta or A")
      ->required()
      ->check(CLI::IsMember({"omega", "alpha", "lambda", "delta", "A"}));
  sw->add_option("--values", values, "Comma-separated values")->required();
  add_common(sw, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*val) return report(dnls::validate(dnls::load_config(config_path)));

    if (*sw) {
      const auto cfg = dnls::load_config(config_path);
      const auto summaries = dnls::sweep(cfg, param, parse_values(values), options(common));
      bool all = true;
      for (const auto& s : summaries) {
        std::cout << (s.pass() ? "PASS " : "FAIL ") << s.name << " (" << s.status << ")\n";
        all = all && s.pass();
      }
      return all ? 0 : 1;
    }

    dnls::ExperimentConfig cfg;
    if (*run) {
      cfg = dnls::load_config(config_path);
    } else if (*profile) {
      cfg = inline_config(in, dnls::ExperimentKind::profile);
    } else if (*gs) {
      cfg = inline_config(in, dnls::ExperimentKind::groundstate);
    } else {
      cfg = inline_config(in, dnls::ExperimentKind::evolve);
    }
    const dnls::Diagnostics d = dnls::validate(cfg);
    if (!d.ok()) return report(d);
    if (!common.quiet) {
      for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
    }
    const auto s = dnls::run(cfg, options(common));
    print_summary(s);
    return s.pass() ? 0 : 1;
  } catch (const dnls::ParseError& e) {
    std::cerr << "parse error: " << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const dnls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pustat/error.hpp"
#include "pustat/experiment.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  int workers = 1;
  std::string format = "csv";
};

int run(const Options& opt, std::optional<pustat::ExperimentKind> kind) {
  pustat::ExperimentConfig config = pustat::load_config(opt.config);
  if (kind) {
    if (config.kind != *kind) {
      throw pustat::ConfigError("kind", std::string("subcommand expects kind '") +
                                            pustat::kind_name(*kind) + "', config has '" +
                                            pustat::kind_name(config.kind) + "'");
    }
  }
  if (opt.seed) config.seed = *opt.seed;
  const auto result = pustat::run_experiment(config, opt.workers);
  const auto format =
      opt.format == "jsonl" ? pustat::OutputFormat::jsonl : pustat::OutputFormat::csv;
  pustat::write_results(result, opt.out, format, config.plot);
  std::cout << pustat::report_summary(result.rows);
  std::cout << "config hash " << result.config_hash << ", wrote " << opt.out << '\n';
  return 0;
}

int report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool jsonl = !text.empty() && text.front() == '{';
  const auto rows = jsonl ? pustat::parse_jsonl(text) : pustat::parse_csv(text);
  std::cout << pustat::report_summary(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for Poisson U-statistics"};
  app.require_subcommand(1);
  Options opt;
  std::string report_path;

  struct Sub {
    const char* name;
    const char* help;
    std::optional<pustat::ExperimentKind> kind;
  };
  const Sub subs[] = {
      {"simulate", "run the experiment named in the config", std::nullopt},
      {"moments", "empirical and theoretical moments", pustat::ExperimentKind::moments},
      {"clt-rate", "distance to the normal along a t schedule",
       pustat::ExperimentKind::clt_rate},
      {"regimes", "variance orders along a v_t schedule", pustat::ExperimentKind::regimes},
      {"concentration", "empirical tails against the median inequality",
       pustat::ExperimentKind::concentration},
      {"chaos-check", "pathwise chaos identity residuals",
       pustat::ExperimentKind::chaos_identity},
  };
  std::vector<std::pair<CLI::App*, std::optional<pustat::ExperimentKind>>> runners;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", opt.config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--workers", opt.workers, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();
    runners.emplace_back(sub, s.kind);
  }
  CLI::App* rep = app.add_subcommand("report", "summarize a results file");
  rep->add_option("file", report_path, "results.csv or results.jsonl")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rep->parsed()) return report(report_path);
    for (const auto& [sub, kind] : runners) {
      if (sub->parsed()) return run(opt, kind);
    }
  } catch (const pustat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pustat::NumericalInstability& e) {
    std::cerr << "numerical instability: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

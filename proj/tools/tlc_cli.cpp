#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tlc/tlc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;

// Flag values as strings; only flags the user passed override the config file.
struct Flags {
  std::map<std::string, std::string> values;
  std::string config_path;
};

void add_flags(CLI::App* cmd, Flags& flags, const std::vector<std::string>& keys) {
  static const std::map<std::string, std::string> help = {
      {"n", "full sample size"},
      {"u", "test set size"},
      {"trials", "Monte Carlo trials"},
      {"seed", "master seed"},
      {"x", "comma-separated confidence exponents"},
      {"class", "function table CSV"},
      {"losses", "loss table CSV"},
      {"data", "data points CSV, one point per row"},
      {"kernel", "linear | gaussian:<width> | dot_product_power:<p>"},
      {"mu", "RKHS ball radius"},
      {"alpha", "power-law spectrum exponent"},
      {"out", "output CSV path (default stdout)"},
      {"workers", "worker threads"},
      {"mode", "test-train | sup"},
      {"u-rule", "fraction:<f> | power:<beta> | fixed:<k>"},
      {"n-grid", "comma-separated n values"},
      {"K-peel", "peeling constant"},
      {"B", "override for the measured B"},
      {"estimation", "exact | monte_carlo | automatic"},
      {"exact-cap", "largest enumeration done exactly"},
      {"curve", "curve CSV r,psi_hat[,stderr]"},
      {"a", "coefficient a in psi(r) = a*sqrt(r) + b"},
      {"b", "offset b in psi(r) = a*sqrt(r) + b"},
      {"tolerance", "fixed-point tolerance"},
  };
  for (const auto& key : keys) {
    std::string config_key = key;
    for (auto& c : config_key) {
      if (c == '-') c = '_';
    }
    cmd->add_option_function<std::string>(
        "--" + key, [&flags, config_key](const std::string& v) { flags.values[config_key] = v; },
        help.at(key));
  }
  cmd->add_option("--config", flags.config_path, "key = value config file");
}

tlc::ExperimentConfig resolve(const Flags& flags) {
  tlc::ExperimentConfig cfg;
  if (!flags.config_path.empty()) tlc::apply_config(cfg, tlc::load_config(flags.config_path));
  tlc::apply_config(cfg, flags.values);
  return cfg;
}

void emit(const tlc::ExperimentConfig& cfg, const std::function<void(std::ostream&)>& write) {
  if (cfg.out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(cfg.out_path);
  if (!out) throw tlc::ConfigError("cannot open output file '" + cfg.out_path + "'");
  write(out);
  if (!out) throw tlc::ConfigError("failed writing '" + cfg.out_path + "'");
}

void emit_report(const tlc::ExperimentConfig& cfg, const tlc::Report& rep) {
  emit(cfg, [&](std::ostream& os) { tlc::write_report(os, rep, cfg.seed, cfg.build); });
}

std::string required(const std::string& value, const char* what) {
  if (value.empty()) throw tlc::ConfigError(std::string(what) + " is required");
  return value;
}

std::optional<tlc::Spectrum> spectrum_from(const tlc::ExperimentConfig& cfg) {
  if (cfg.data_path.empty()) return std::nullopt;
  const auto csv = tlc::read_numeric_csv_file(cfg.data_path, false);
  return tlc::gram_and_spectrum(csv.rows, tlc::parse_kernel_spec(cfg.kernel));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transductive local complexity bounds and experiments"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::string> common = {"trials", "seed", "x", "out", "workers", "estimation", "exact-cap"};
  auto with = [&](std::vector<std::string> extra) {
    extra.insert(extra.end(), common.begin(), common.end());
    return extra;
  };

  auto* validate = app.add_subcommand("validate-concentration", "empirical violation rates of the concentration bound");
  add_flags(validate, flags, with({"u", "class", "mode"}));
  auto* tkl = app.add_subcommand("compare-tkl", "kernel bound against the prior bound over n");
  add_flags(tkl, flags, with({"u", "alpha", "data", "kernel", "u-rule", "n-grid"}));
  auto* erm = app.add_subcommand("erm", "per-split ERM excess risk and its bound");
  add_flags(erm, flags, with({"u", "losses", "K-peel", "B", "tolerance"}));
  auto* complexity = app.add_subcommand("complexity", "transductive complexities against 2x inductive");
  add_flags(complexity, flags, with({"u", "class"}));
  auto* fixed = app.add_subcommand("fixed-point", "fixed point of a sub-root function");
  add_flags(fixed, flags, with({"curve", "a", "b", "tolerance"}));
  auto* spectrum = app.add_subcommand("kernel-spectrum", "normalized Gram spectrum and tail sums");
  add_flags(spectrum, flags, with({"n", "data", "kernel", "alpha", "mu"}));
  auto* split = app.add_subcommand("split", "sample test sets with RANDPERM");
  add_flags(split, flags, with({"n", "u"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto cfg = resolve(flags);
    if (validate->parsed()) {
      const auto cls = tlc::load_function_table(required(cfg.class_path, "--class"));
      emit_report(cfg, tlc::run_validate_concentration(cfg, cls));
    } else if (tkl->parsed()) {
      emit_report(cfg, tlc::run_compare_tkl(cfg, spectrum_from(cfg)));
    } else if (erm->parsed()) {
      const auto losses = tlc::load_loss_table(required(cfg.losses_path, "--losses"));
      emit_report(cfg, tlc::erm_report(tlc::run_erm_experiment(cfg, losses)));
    } else if (complexity->parsed()) {
      const auto cls = tlc::load_function_table(required(cfg.class_path, "--class"));
      emit_report(cfg, tlc::run_complexity_report(cfg, cls));
    } else if (fixed->parsed()) {
      std::optional<tlc::LocalizedCurve> curve;
      if (!cfg.curve_path.empty()) {
        std::ifstream in(cfg.curve_path);
        if (!in) throw tlc::ParseError(cfg.curve_path, 0, "cannot open file");
        curve = tlc::read_curve_csv(in, cfg.curve_path);
      }
      emit_report(cfg, tlc::run_fixed_point(cfg, curve));
    } else if (spectrum->parsed()) {
      auto spec = spectrum_from(cfg);
      if (!spec) {
        if (!cfg.n) throw tlc::ConfigError("kernel-spectrum needs --data or --n with --alpha");
        spec = tlc::synthetic_spectrum(*cfg.n, cfg.alpha);
      }
      emit_report(cfg, tlc::spectrum_report(*spec));
    } else if (split->parsed()) {
      if (!cfg.n || !cfg.u) throw tlc::ConfigError("split needs --n and --u");
      std::vector<tlc::SplitPlan> plans;
      plans.reserve(cfg.trials);
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        tlc::CounterRng rng(cfg.seed, t);
        plans.push_back(tlc::randperm_prefix(*cfg.n, *cfg.u, rng).second);
      }
      emit(cfg, [&](std::ostream& os) { tlc::write_splits_csv(os, plans); });
    }
  } catch (const tlc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tlc::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tlc::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const tlc::InvalidClass& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const tlc::InvalidKernel& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const tlc::NotRepresentable& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const tlc::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

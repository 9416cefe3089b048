// Command-line front end: eigenvalue sweeps, steady-state branches and
// finite-difference cross-checks, emitted as CSV.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specfrac/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral fractional Neumann Laplacian: eigenvalues and logistic steady states"};
  app.fallthrough();

  std::vector<std::string> flag_L, flag_s, flag_weight;
  std::string flag_sgrid, flag_out, flag_config;
  std::string flag_K, flag_lambda_max, flag_nx, flag_ny, flag_Y;

  app.add_option("--L", flag_L, "interval length(s), comma lists allowed");
  app.add_option("--s", flag_s, "fractional power(s) in (0,1], comma lists allowed");
  app.add_option("--s-grid", flag_sgrid, "fractional power grid min:max:step");
  app.add_option("--weight", flag_weight, "weight spec: m1 | m2 | const:<c> | series:<c>;<j>=<a>,...");
  app.add_option("--K", flag_K, "number of cosine modes (default 64)");
  app.add_option("--lambda-max", flag_lambda_max, "continuation endpoint for branch (default 5)");
  app.add_option("--out", flag_out, "output CSV path (default stdout)");
  app.add_option("--oracle-nx", flag_nx, "oracle grid cells in x");
  app.add_option("--oracle-ny", flag_ny, "oracle grid cells in y (cylinder)");
  app.add_option("--oracle-Y", flag_Y, "cylinder truncation height (default 8/sqrt(mu_1))");
  app.add_option("--config", flag_config, "key=value config file; flags override file entries");

  app.require_subcommand(0, 1);
  for (const char* name : {"eigen", "sweep", "branch", "compare", "extend"})
    app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);

  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    std::cerr << "error: expected a command (eigen | sweep | branch | compare | extend)\n";
    return 2;
  }
  const std::string command = subs.front()->get_name();

  try {
    std::map<std::string, std::vector<std::string>> kv;
    if (!flag_config.empty()) {
      std::ifstream in(flag_config);
      if (!in) {
        std::cerr << "error: cannot open config file '" << flag_config << "'\n";
        return 2;
      }
      kv = specfrac::parse_config_file(in);
    }
    auto override_key = [&kv](const char* key, const std::vector<std::string>& values) {
      if (!values.empty()) kv[key] = values;
    };
    override_key("L", flag_L);
    override_key("s", flag_s);
    override_key("weight", flag_weight);
    if (!flag_sgrid.empty()) kv["s-grid"] = {flag_sgrid};
    if (!flag_K.empty()) kv["K"] = {flag_K};
    if (!flag_lambda_max.empty()) kv["lambda-max"] = {flag_lambda_max};
    if (!flag_out.empty()) kv["out"] = {flag_out};
    if (!flag_nx.empty()) kv["oracle-nx"] = {flag_nx};
    if (!flag_ny.empty()) kv["oracle-ny"] = {flag_ny};
    if (!flag_Y.empty()) kv["oracle-Y"] = {flag_Y};
    if (kv.count("s") && kv.count("s-grid")) {
      // a flag for one form silently retires the other coming from the file
      if (!flag_s.empty() && flag_sgrid.empty()) kv.erase("s-grid");
      if (flag_s.empty() && !flag_sgrid.empty()) kv.erase("s");
    }

    const specfrac::RunConfig cfg = specfrac::make_run_config(command, kv);
    const specfrac::RunOutput result = specfrac::run_command(cfg);

    if (cfg.out.empty()) {
      std::cout << result.csv;
    } else {
      std::ofstream out(cfg.out, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot open output file '" << cfg.out << "'\n";
        return 2;
      }
      out << result.csv;
    }
    return result.any_error ? 1 : 0;
  } catch (const specfrac::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const specfrac::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

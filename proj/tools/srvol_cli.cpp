// Command-line front end: builds a run configuration from an optional config
// file plus flag overrides, then dispatches one of the four commands.
// Exit codes: 0 success, 1 verification/computation failure, 2 input error.
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srvol/acceptance.hpp"
#include "srvol/config.hpp"
#include "srvol/errors.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_flag_number(const std::string& tok, const char* flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw srvol::ConfigError(std::string(flag) + ": expected a number, got '" +
                             tok + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Small-radius ball volumes and local invariants of 3D contact "
      "structures"};
  app.require_subcommand(0, 1);

  std::string config_path, family, beta, gamma, eps_csv, quad_csv, out_path,
      format;
  double tol = 0.0;
  unsigned long long seed = 0;

  auto* opt_config = app.add_option(
      "--config", config_path, "configuration file (flat key = value text)");
  auto* opt_family = app.add_option(
      "--family", family, "structure family: heisenberg | normal_form | frame");
  auto* opt_beta =
      app.add_option("--beta", beta, "normal-form polynomial data beta");
  auto* opt_gamma =
      app.add_option("--gamma", gamma, "normal-form polynomial data gamma");
  auto* opt_eps = app.add_option(
      "--eps", eps_csv,
      "comma-separated radii, strictly decreasing within (0, 0.3]");
  auto* opt_quad = app.add_option(
      "--quad", quad_csv, "quadrature node counts n_rho,n_theta,n_w");
  auto* opt_tol =
      app.add_option("--tol", tol, "ODE tolerance in [1e-13, 1e-6]");
  auto* opt_seed = app.add_option(
      "--seed", seed, "seed for the randomized verification checks");
  auto* opt_out =
      app.add_option("--out", out_path, "output path (default: stdout)");
  auto* opt_format =
      app.add_option("--format", format, "output format: csv | json");

  CLI::App* subs[] = {
      app.add_subcommand("invariants",
                         "print chi, kappa, the intrinsic volume density, and "
                         "the curvature-identity residual at the base point"),
      app.add_subcommand("ball-volume",
                         "tabulate ball volumes over the eps ladder against "
                         "the two-term prediction"),
      app.add_subcommand("fit",
                         "fit the two-term volume expansion over the eps "
                         "ladder"),
      app.add_subcommand("verify", "run the end-to-end verification suite"),
  };
  for (CLI::App* sub : subs) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help and --version are not errors
  }

  try {
    srvol::RunConfig cfg;
    if (opt_config->count() > 0) cfg = srvol::parse_config_file(config_path);
    if (opt_family->count() > 0) cfg.family = family;
    if (opt_beta->count() > 0) cfg.beta = beta;
    if (opt_gamma->count() > 0) cfg.gamma = gamma;
    if (opt_out->count() > 0) cfg.out = out_path;
    if (opt_format->count() > 0) cfg.format = format;
    if (opt_tol->count() > 0) cfg.quad.tol_ode = tol;
    if (opt_seed->count() > 0) {
      if (seed > 4294967295ull)
        throw srvol::ConfigError("--seed: must be below 2^32");
      cfg.seed = static_cast<unsigned>(seed);
    }
    if (opt_eps->count() > 0) {
      cfg.eps_list.clear();
      for (const std::string& tok : split_commas(eps_csv))
        cfg.eps_list.push_back(parse_flag_number(tok, "--eps"));
    }
    if (opt_quad->count() > 0) {
      const auto parts = split_commas(quad_csv);
      if (parts.size() != 3)
        throw srvol::ConfigError("--quad: expected n_rho,n_theta,n_w");
      const double counts[] = {parse_flag_number(parts[0], "--quad"),
                               parse_flag_number(parts[1], "--quad"),
                               parse_flag_number(parts[2], "--quad")};
      for (double c : counts)
        if (c < 0 || c != static_cast<long long>(c))
          throw srvol::ConfigError("--quad: counts must be integers");
      cfg.quad.n_rho = static_cast<int>(counts[0]);
      cfg.quad.n_theta = static_cast<int>(counts[1]);
      cfg.quad.n_w = static_cast<int>(counts[2]);
    }

    const auto chosen = app.get_subcommands();
    if (!chosen.empty()) cfg.command = chosen.front()->get_name();
    if (cfg.command.empty())
      throw srvol::ConfigError(
          "no command: pass a subcommand (invariants, ball-volume, fit, "
          "verify) or set command = ... in the config file");
    srvol::validate(cfg);

    std::ofstream out_file;
    std::ostream* out = &std::cout;
    if (!cfg.out.empty()) {
      out_file.open(cfg.out);
      if (!out_file)
        throw srvol::ConfigError("cannot open output file '" + cfg.out + "'");
      out = &out_file;
    }

    if (cfg.command == "verify") {
      const int failures = srvol::run_acceptance(cfg.seed, *out);
      return failures == 0 ? 0 : 1;
    }
    std::string result;
    if (cfg.command == "invariants") result = srvol::cmd_invariants(cfg);
    else if (cfg.command == "ball-volume") result = srvol::cmd_ball_volume(cfg);
    else result = srvol::cmd_fit(cfg);
    *out << result;
    return 0;
  } catch (const srvol::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const srvol::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const srvol::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

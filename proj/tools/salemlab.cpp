// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "salem_c.h"

namespace {

struct Handle {
  salem_config* config = nullptr;
  ~Handle() { salem_config_free(config); }
};

std::string flag_name(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

int config_error(const char* what) {
  std::fprintf(stderr, "salemlab: %s: %s\n", what, salem_last_error());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random smooth perturbations of Cantor-type sets and their Fourier decay"};
  app.require_subcommand(1);
  app.set_version_flag("--version", salem_version());

  std::string config_file;
  std::optional<unsigned> workers;
  std::string output;
  std::map<std::string, std::string> overrides;
  std::vector<CLI::Option*> key_options;

  const char* commands[] = {"build",      "sample",  "push",    "spectrum", "dim",
                            "verify-psi", "modulus", "moments", "pipeline"};
  const char* descriptions[] = {
      "write the gap table, measure and construction summary",
      "draw the random map and check monotonicity",
      "write the pushed-forward measure",
      "Fourier transforms of the base and pushed measures",
      "Fourier decay exponents from dyadic band maxima",
      "certify the gap-count lower bound",
      "check the modulus of continuity of the m-th derivative",
      "Monte-Carlo moments of the pushed transform",
      "run every stage and write report.json"};

  for (std::size_t c = 0; c < std::size(commands); ++c) {
    CLI::App* sub = app.add_subcommand(commands[c], descriptions[c]);
    sub->add_option("-c,--config", config_file, "JSON config file; flags override it")
        ->check(CLI::ExistingFile);
    sub->add_option("-j,--workers", workers, "worker threads (never changes outputs)");
    sub->add_option("-o,--out", output,
                    "output directory (default: $SALEMLAB_OUTPUT_ROOT/<config hash>)");
    for (std::size_t k = 0; k < salem_config_key_count(); ++k) {
      const std::string key = salem_config_key(k);
      sub->add_option_function<std::string>(
          flag_name(key), [&overrides, key](const std::string& v) { overrides[key] = v; },
          "config field " + key);
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  Handle h;
  if (salem_config_new(&h.config) != SALEM_OK) return config_error("config");
  if (!config_file.empty() && salem_config_load(h.config, config_file.c_str()) != SALEM_OK) {
    return config_error(config_file.c_str());
  }
  for (const auto& [key, value] : overrides) {
    if (salem_config_set(h.config, key.c_str(), value.c_str()) != SALEM_OK) {
      return config_error(flag_name(key).c_str());
    }
  }
  if (workers && salem_config_set(h.config, "workers", std::to_string(*workers).c_str()) != SALEM_OK) {
    return config_error("--workers");
  }
  if (!output.empty() && salem_config_set(h.config, "output", output.c_str()) != SALEM_OK) {
    return config_error("--out");
  }

  int exit_code = 2;
  char dir[4096] = {0};
  if (salem_run(h.config, command.c_str(), &exit_code, dir, sizeof dir) != SALEM_OK) {
    return config_error(command.c_str());
  }
  if (dir[0] != '\0') std::printf("%s\n", dir);
  if (exit_code != 0) {
    std::fprintf(stderr, "salemlab %s: %s\n", command.c_str(), salem_last_error());
  }
  return exit_code;
}

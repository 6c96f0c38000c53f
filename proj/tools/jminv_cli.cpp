#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "jminv/commands.hpp"

using namespace jminv;

namespace {

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::string> hamiltonians;
};

void add_config_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON configuration file");
  for (const auto& [key, kind] : config_keys()) {
    (void)kind;
    sub->add_option_function<std::string>(
        "--" + key, [&f, k = key](const std::string& v) { f.values[k] = v; }, "config key " + key);
  }
}

RunConfig build_config(const Flags& f) {
  json j = json::object();
  if (!f.config_path.empty()) j = read_json_file(f.config_path);
  if (!j.is_object()) throw InputError("config: top level must be an object");
  if (const char* env = std::getenv("JMINV_OUTPUT_DIR"); env && *env) j["output_dir"] = env;
  for (const auto& [k, v] : f.values) j[k] = parse_flag_value(k, v);
  RunConfig c = config_from_json(j);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-channel J-matrix direct and inverse scattering"};
  app.require_subcommand(1);
  Flags f;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct H from S-matrix data and write tables");
  auto* fwd = app.add_subcommand("forward", "eigenphase curves and bound states of Hamiltonians");
  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  auto* tab = app.add_subcommand("tables", "reconstruct and print the tables");
  for (auto* s : {rec, fwd, ver, tab}) add_config_flags(s, f);
  fwd->add_option("--hamiltonian", f.hamiltonians, "Hamiltonian JSON file (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  return run_guarded(
      [&] {
        const RunConfig cfg = build_config(f);
        if (rec->parsed()) return cmd_reconstruct(cfg, std::cout);
        if (fwd->parsed()) return cmd_forward(cfg, f.hamiltonians, std::cout);
        if (ver->parsed()) return cmd_verify(cfg, std::cout);
        return cmd_tables(cfg, std::cout);
      },
      std::cerr);
}

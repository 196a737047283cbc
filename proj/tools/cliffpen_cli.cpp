// Command line front end: run configs and presets, check module files.
// Exit codes: 0 PASS, 2 theorem-bound shortfall, 1 error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cliffpen/experiment.hpp"

namespace {

using cliffpen::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct RunArgs {
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--starts", args.starts, "override the search budget")->check(CLI::PositiveNumber);
}

int run_document(json doc, const RunArgs& args) {
  if (args.seed) doc["seed"] = *args.seed;
  if (args.starts) {
    if (!doc.contains("search")) doc["search"] = json::object();
    doc["search"]["starts"] = *args.starts;
  }
  try {
    const cliffpen::ResultBundle b = cliffpen::run_experiment(doc);
    cliffpen::write_bundle(b, args.out);
    const json& v = b.result["verdict"];
    std::cout << doc.value("name", std::string("config")) << ": " << v.value("label", b.status);
    if (v.contains("count") && !v["count"].is_null())
      std::cout << " (" << v["count"] << " records, bound " << v["bound"].get<std::string>() << " = "
                << v["required"] << ")";
    std::cout << "\nwrote " << args.out << "/{result.json,records.json,ladder.csv}\n";
    return b.exit_code;
  } catch (const cliffpen::StageError& e) {
    std::cerr << "error at stage " << e.stage() << ": " << e.what() << "\n";
    std::filesystem::create_directories(args.out);
    std::ofstream(std::filesystem::path(args.out) / "result.json")
        << cliffpen::canonical_dump({{"config", doc}, {"error", {{"stage", e.stage()}, {"message", e.what()}}}});
    return 1;
  }
}

int check_module(const std::string& path) {
  const json doc = load_json(path);
  const cliffpen::CliffordModule m = cliffpen::module_from_json(doc);
  const cliffpen::ModuleReport rep = cliffpen::verify_module(m);
  json out = {{"dim_v", m.dim_v},
              {"rank", m.rank},
              {"radon_hurwitz_max_rank", cliffpen::radon_hurwitz_max_rank(m.dim_v)},
              {"orthogonal", rep.orthogonal},
              {"square_minus_identity", rep.square_minus_id},
              {"anticommute", rep.anticommute},
              {"max_violation", rep.max_violation},
              {"clifford", rep.ok()}};
  if (!rep.ok()) {
    try {
      const cliffpen::Pencil p = cliffpen::pencil_of(m);
      const cliffpen::CompatibilityReport c = cliffpen::is_compatible(p);
      out["compatible_pencil"] = c.compatible;
      if (c.compatible) out["cliffordized"] = cliffpen::module_to_json(cliffpen::cliffordize(p));
    } catch (const std::exception& e) {
      out["pencil_error"] = e.what();
    }
  }
  std::cout << cliffpen::canonical_dump(out);
  return rep.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical points of Dirac-type action functionals on tori"};
  app.require_subcommand(1);

  RunArgs run_args, preset_args;
  std::string config_path, preset_name, module_path;
  bool print_only = false, list = false;

  auto* run = app.add_subcommand("run", "run a JSON experiment config");
  run->add_option("config", config_path, "config file")->required();
  add_run_options(run, run_args);

  auto* pre = app.add_subcommand("preset", "run (or print) a named preset");
  pre->add_option("name", preset_name, "preset name");
  pre->add_flag("--print", print_only, "print the preset config instead of running it");
  pre->add_flag("--list", list, "list preset names");
  add_run_options(pre, preset_args);

  auto* chk = app.add_subcommand("check-module", "verify a module JSON file");
  chk->add_option("json", module_path, "module file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_document(load_json(config_path), run_args);
    if (*pre) {
      if (list || preset_name.empty()) {
        for (const auto& [name, doc] : cliffpen::presets()) std::cout << name << "\n";
        return 0;
      }
      const json doc = cliffpen::preset(preset_name);
      if (print_only) {
        std::cout << cliffpen::canonical_dump(doc);
        return 0;
      }
      return run_document(doc, preset_args);
    }
    if (*chk) return check_module(module_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

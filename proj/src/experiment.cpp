#include "cliffpen/experiment.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "cliffpen/quaternion.hpp"

namespace cliffpen {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return j.get<int>();
}

double positive(const json& j, const std::string& key) {
  const double v = number(j, key);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

TrigTerm term(std::vector<int> m, std::vector<int> n, double c, double s) {
  return TrigTerm{std::move(m), std::move(n), c, s};
}

json base_preset(const std::string& name, int rank, int dim_v, const std::vector<TrigTerm>& terms,
                 int cutoff, int starts, std::optional<int> ladder_cutoff = std::nullopt) {
  ExperimentConfig c;
  c.name = name;
  c.rank = rank;
  c.dim_v = dim_v;
  c.frame = Matrix::Identity(rank, rank);
  c.lattice = Matrix::Identity(dim_v, dim_v);
  c.terms = terms;
  c.cutoff = cutoff;
  c.starts = starts;
  c.seed = 1;
  c.ladder_cutoff = ladder_cutoff;
  return config_to_json(c);
}

std::string csv(const std::vector<LadderRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "N,N_excl,q,h_norm,iters\n";
  for (const LadderRow& r : rows)
    out << r.threshold << ',' << r.excluded_gap << ',' << r.q << ',' << r.h_norm << ',' << r.iters << '\n';
  return out.str();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ResultBundle run_su2(const ExperimentConfig& cfg, const json& source) {
  const Su2Residual r = su2_counterexample_residual(cfg.su2_weights);
  const bool zero = r.max_norm2 == 0;
  ResultBundle b;
  b.status = zero ? "PASS" : "SHORTFALL";
  b.exit_code = zero ? 0 : 2;
  b.records = json::array();
  b.ladder_csv = csv({});
  b.result = {
      {"config", source},
      {"su2",
       {{"weights", cfg.su2_weights},
        {"points", su2_sample_points().size()},
        {"max_norm", r.max_norm},
        {"max_norm2_exact", r.max_norm2.str()}}},
      {"verdict",
       {{"status", b.status},
        {"label", zero ? "inclusion lies in the kernel: frame is not regular"
                       : "nonzero residual: inclusion is not in the kernel"}}}};
  return b;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, {"name", "kind", "rank", "dim_v", "frame", "lattice", "module", "hamiltonian",
                 "truncation", "cutoff", "tolerances", "search", "ladder", "seed",
                 "h_nondegenerate", "su2_weights"},
             "config");
  ExperimentConfig c;
  try {
    if (!j.contains("name") || !j["name"].is_string()) throw ConfigError("'name' must be a string");
    c.name = j["name"].get<std::string>();
    if (j.contains("kind")) {
      if (!j["kind"].is_string()) throw ConfigError("'kind' must be a string");
      c.kind = j["kind"].get<std::string>();
      if (c.kind != "reduction" && c.kind != "su2-check")
        throw ConfigError("'kind' must be 'reduction' or 'su2-check'");
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
        throw ConfigError("'seed' must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("su2_weights")) {
      const json& w = j["su2_weights"];
      if (!w.is_array() || w.size() != 3) throw ConfigError("'su2_weights' must hold 3 numbers");
      for (int a = 0; a < 3; ++a) c.su2_weights[a] = number(w[a], "su2_weights");
    }
    if (c.kind == "su2-check") return c;

    if (!j.contains("rank") || !j.contains("dim_v")) throw ConfigError("'rank' and 'dim_v' are required");
    c.rank = integer(j["rank"], "rank");
    c.dim_v = integer(j["dim_v"], "dim_v");
    if (c.rank < 1 || c.rank > 8) throw ConfigError("'rank' must be in 1..8");
    if (c.dim_v < 1 || c.dim_v > 16) throw ConfigError("'dim_v' must be in 1..16");
    if (radon_hurwitz_max_rank(c.dim_v) < c.rank)
      throw ConfigError("rank " + std::to_string(c.rank) + " exceeds the Radon-Hurwitz bound " +
                        std::to_string(radon_hurwitz_max_rank(c.dim_v)) + " of dim_v " +
                        std::to_string(c.dim_v));
    c.frame = j.contains("frame") ? matrix_from_json(j["frame"], "frame")
                                  : Matrix(Matrix::Identity(c.rank, c.rank));
    if (c.frame.rows() != c.rank || c.frame.cols() != c.rank)
      throw ConfigError("'frame' must be rank x rank");
    c.lattice = j.contains("lattice") ? matrix_from_json(j["lattice"], "lattice")
                                      : Matrix(Matrix::Identity(c.dim_v, c.dim_v));
    if (c.lattice.rows() != c.dim_v || c.lattice.cols() != c.dim_v)
      throw ConfigError("'lattice' must be dim_v x dim_v");
    if (std::abs(c.lattice.determinant()) < 1e-12) throw ConfigError("'lattice' basis is singular");
    if (j.contains("module")) {
      c.module = module_from_json(j["module"]);
      if (c.module->rank != c.rank || c.module->dim_v != c.dim_v)
        throw ConfigError("'module' shape differs from rank and dim_v");
    }
    if (!j.contains("hamiltonian")) throw ConfigError("'hamiltonian' is required");
    c.terms = terms_from_json(j["hamiltonian"], c.rank, c.dim_v);
    if (j.contains("truncation")) {
      const json& t = j["truncation"];
      if (t.is_string()) {
        if (t.get<std::string>() != "auto") throw ConfigError("'truncation' must be \"auto\" or {\"N\": value}");
      } else {
        check_keys(t, {"N"}, "truncation");
        if (!t.contains("N")) throw ConfigError("'truncation' object needs N");
        const double n = number(t["N"], "truncation.N");
        if (!(n >= 0.0)) throw ConfigError("'truncation.N' must be non-negative");
        c.truncation = n;
      }
    }
    if (j.contains("cutoff")) c.cutoff = integer(j["cutoff"], "cutoff");
    if (c.cutoff < 1 || std::pow(2.0 * c.cutoff + 1, c.rank) > 4e6)
      throw ConfigError("'cutoff' must be positive with at most 4e6 modes in the box");
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      check_keys(t, {"fiber", "gradient", "neumann", "q_max", "max_fiber_iter"}, "tolerances");
      if (t.contains("fiber")) c.fiber_tol = positive(t["fiber"], "tolerances.fiber");
      if (t.contains("gradient")) c.gradient_tol = positive(t["gradient"], "tolerances.gradient");
      if (t.contains("neumann")) c.neumann_tol = positive(t["neumann"], "tolerances.neumann");
      if (t.contains("q_max")) c.q_max = positive(t["q_max"], "tolerances.q_max");
      if (c.q_max >= 1.0) throw ConfigError("'tolerances.q_max' must be below 1");
      if (t.contains("max_fiber_iter")) c.max_fiber_iter = integer(t["max_fiber_iter"], "tolerances.max_fiber_iter");
      if (c.max_fiber_iter < 1) throw ConfigError("'tolerances.max_fiber_iter' must be positive");
    }
    if (j.contains("search")) {
      const json& s = j["search"];
      check_keys(s, {"starts", "fiber_radius", "max_iter"}, "search");
      if (s.contains("starts")) c.starts = integer(s["starts"], "search.starts");
      if (c.starts < 1) throw ConfigError("'search.starts' must be positive");
      if (s.contains("fiber_radius")) c.fiber_radius = number(s["fiber_radius"], "search.fiber_radius");
      if (c.fiber_radius < 0) throw ConfigError("'search.fiber_radius' must be non-negative");
      if (s.contains("max_iter")) c.max_newton_iter = integer(s["max_iter"], "search.max_iter");
      if (c.max_newton_iter < 1) throw ConfigError("'search.max_iter' must be positive");
    }
    if (j.contains("ladder")) {
      const json& l = j["ladder"];
      check_keys(l, {"multipliers", "cutoff"}, "ladder");
      if (l.contains("cutoff")) {
        c.ladder_cutoff = integer(l["cutoff"], "ladder.cutoff");
        if (*c.ladder_cutoff < c.cutoff || std::pow(2.0 * *c.ladder_cutoff + 1, c.rank) > 4e6)
          throw ConfigError("'ladder.cutoff' must be at least cutoff with at most 4e6 modes in the box");
      }
      if (l.contains("multipliers")) {
        if (!l["multipliers"].is_array()) throw ConfigError("'ladder.multipliers' must be an array");
        c.ladder_multipliers.clear();
        for (const json& m : l["multipliers"]) c.ladder_multipliers.push_back(positive(m, "ladder.multipliers"));
      }
    }
    if (j.contains("h_nondegenerate")) {
      if (!j["h_nondegenerate"].is_boolean()) throw ConfigError("'h_nondegenerate' must be a boolean");
      c.h_nondegenerate = j["h_nondegenerate"].get<bool>();
    }
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["kind"] = c.kind;
  j["seed"] = c.seed;
  j["su2_weights"] = c.su2_weights;
  if (c.kind == "su2-check") return j;
  j["rank"] = c.rank;
  j["dim_v"] = c.dim_v;
  j["frame"] = matrix_to_json(c.frame);
  j["lattice"] = matrix_to_json(c.lattice);
  if (c.module) j["module"] = module_to_json(*c.module);
  j["hamiltonian"] = terms_to_json(c.terms);
  j["truncation"] = c.truncation ? json{{"N", *c.truncation}} : json("auto");
  j["cutoff"] = c.cutoff;
  j["tolerances"] = {{"fiber", c.fiber_tol}, {"gradient", c.gradient_tol}, {"neumann", c.neumann_tol},
                     {"q_max", c.q_max}, {"max_fiber_iter", c.max_fiber_iter}};
  j["search"] = {{"starts", c.starts}, {"fiber_radius", c.fiber_radius}, {"max_iter", c.max_newton_iter}};
  j["ladder"] = {{"multipliers", c.ladder_multipliers}};
  if (c.ladder_cutoff) j["ladder"]["cutoff"] = *c.ladder_cutoff;
  if (c.h_nondegenerate) j["h_nondegenerate"] = *c.h_nondegenerate;
  return j;
}

std::vector<std::pair<std::string, json>> presets() {
  std::vector<std::pair<std::string, json>> out;
  out.emplace_back("classical-T2",
                   base_preset("classical-T2", 1, 2,
                               {term({0}, {1, 0}, 0.1, 0.0), term({0}, {0, 1}, 0.1, 0.0)}, 8, 32, 80));
  out.emplace_back("hyperkahler-T4",
                   base_preset("hyperkahler-T4", 3, 4,
                               {term({0, 0, 0}, {1, 0, 0, 0}, 0.05, 0.0),
                                term({0, 0, 0}, {0, 1, 0, 0}, 0.05, 0.0),
                                term({0, 0, 0}, {0, 0, 1, 0}, 0.05, 0.0),
                                term({0, 0, 0}, {0, 0, 0, 1}, 0.05, 0.0)},
                               6, 64));
  // 0.2 sin(pi x1) sin(pi x2) sin(pi (x1 + x2)): maximum, minimum and a
  // degenerate monkey saddle at the origin.
  out.emplace_back("degenerate-T1",
                   base_preset("degenerate-T1", 1, 2,
                               {term({0}, {1, 0}, 0.0, 0.05), term({0}, {0, 1}, 0.0, 0.05),
                                term({0}, {1, 1}, 0.0, -0.05)},
                               8, 32));
  // 0.05 cos(2 pi t) cos(2 pi x1).
  out.emplace_back("timedep-T2",
                   base_preset("timedep-T2", 1, 2,
                               {term({1}, {1, 0}, 0.025, 0.0), term({1}, {-1, 0}, 0.025, 0.0)}, 8, 200));
  ExperimentConfig su2;
  su2.name = "su2-counterexample";
  su2.kind = "su2-check";
  out.emplace_back("su2-counterexample", config_to_json(su2));
  return out;
}

json preset(const std::string& name) {
  for (auto& [n, j] : presets())
    if (n == name) return j;
  std::string known;
  for (auto& [n, j] : presets()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

json record_to_json(const CriticalRecord& r) {
  return {{"x", std::vector<double>(r.x.begin(), r.x.end())},
          {"phi", r.phi},
          {"residual", r.residual},
          {"margin", r.margin},
          {"signature", r.signature},
          {"nondegenerate", r.nondegenerate}};
}

ResultBundle run_experiment(const json& source) {
  ExperimentConfig cfg;
  try {
    cfg = config_from_json(source);
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  if (cfg.kind == "su2-check") return run_su2(cfg, source);

  json result;
  result["config"] = source;

  CliffordModule module;
  try {
    module = cfg.module ? to_standard_metric(*cfg.module) : build_clifford_module(cfg.rank, cfg.dim_v);
    const ModuleReport rep = verify_module(module);
    if (!rep.ok())
      throw AlgebraError("generators violate the Clifford relations (max violation " +
                         std::to_string(rep.max_violation) + ")");
    result["module"] = {{"dim_v", module.dim_v}, {"rank", module.rank}, {"max_violation", rep.max_violation}};
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("verify-module", e.what());
  }

  std::optional<Frame> frame;
  try {
    frame = Frame::from_matrix(cfg.frame);
    const RegularityReport reg = regularity_gap(*frame, module, cfg.cutoff);
    if (!reg.regular) throw FieldError("frame is not regular (gap " + std::to_string(reg.gap) + ")");
    result["regularity"] = {{"gap", reg.gap}, {"certified_bound", reg.certified_bound}, {"argmin", reg.argmin}};
  } catch (const std::exception& e) {
    throw StageError("regularity", e.what());
  }

  std::optional<Reduction> red;
  try {
    const TrigHamiltonian h(cfg.rank, cfg.dim_v, cfg.terms, LatticeTorus::from_basis(cfg.lattice));
    const Truncation trunc =
        cfg.truncation ? make_truncation(*frame, cfg.cutoff, *cfg.truncation, h.sup_norms().hess_inf)
                       : choose_truncation(h, *frame, module, cfg.cutoff, cfg.q_max);
    if (!(trunc.q < 1.0)) throw ReductionError("contraction factor q = " + std::to_string(trunc.q) + " is not below 1");
    ReductionOptions ro;
    ro.fiber_tol = cfg.fiber_tol;
    ro.neumann_tol = cfg.neumann_tol;
    ro.max_iter = cfg.max_fiber_iter;
    red.emplace(module, *frame, h, trunc, ro);
    result["truncation"] = {{"N", trunc.threshold},
                            {"N_excl", trunc.excluded_gap},
                            {"q", trunc.q},
                            {"hess_inf", trunc.hess_inf},
                            {"retained_modes", trunc.retained_modes},
                            {"excluded_modes", trunc.excluded_modes},
                            {"reduced_dim", red->reduced_dim()},
                            {"grid_points", red->grid().points_per_axis()}};
  } catch (const std::exception& e) {
    throw StageError("truncation", e.what());
  }

  std::vector<LadderRow> rows;
  try {
    if (red->truncation().retained_modes > 0) {
      std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      std::uniform_real_distribution<double> unit;
      std::normal_distribution<double> normal;
      Vector u(cfg.dim_v), e(cfg.dim_v);
      for (int a = 0; a < cfg.dim_v; ++a) u[a] = unit(rng);
      for (int a = 0; a < cfg.dim_v; ++a) e[a] = normal(rng);
      e.normalize();
      const Vector x = cfg.lattice * u;
      const double amp = 0.25 + 0.75 * unit(rng);
      const double phase = kTwoPi * unit(rng);
      auto probe = [&](const Reduction& r) { return shell_probe(r, x, amp, e, phase); };
      rows = ladder_diagnostics(module, *frame, red->hamiltonian(), cfg.ladder_cutoff.value_or(cfg.cutoff),
                                red->truncation().threshold, cfg.ladder_multipliers, probe,
                                red->options());
    }
    json jr = json::array();
    for (const LadderRow& r : rows)
      jr.push_back({{"N", r.threshold}, {"N_excl", r.excluded_gap}, {"q", r.q}, {"h_norm", r.h_norm}, {"iters", r.iters}});
    result["ladder"] = {{"rows", jr}, {"slope", finite_or_null(ladder_slope(rows))}};
  } catch (const std::exception& e) {
    throw StageError("ladder", e.what());
  }

  SearchResult found;
  try {
    SearchOptions so;
    so.starts = cfg.starts;
    so.fiber_radius = cfg.fiber_radius;
    so.grad_tol = cfg.gradient_tol;
    so.max_iter = cfg.max_newton_iter;
    so.seed = cfg.seed;
    found = find_critical_points(*red, so);
  } catch (const std::exception& e) {
    throw StageError("search", e.what());
  }
  ResultBundle b;
  b.records = json::array();
  for (const CriticalRecord& r : found.records) b.records.push_back(record_to_json(r));
  result["records"] = b.records;
  result["search"] = {{"starts", cfg.starts},
                      {"converged", found.converged_starts},
                      {"failed", found.failed_starts},
                      {"degenerate_continuum", found.degenerate_continuum}};

  try {
    const ArnoldBounds ab = arnold_bounds(cfg.dim_v);
    json verdict;
    if (found.degenerate_continuum) {
      b.status = "PASS";
      verdict = {{"status", b.status}, {"count", nullptr}, {"SB", ab.sum_betti},
                 {"CL_plus_1", ab.cup_length_plus_1},
                 {"label", "degenerate continuum: H is constant along W, every constant is critical"}};
    } else {
      const bool all_nd = std::all_of(found.records.begin(), found.records.end(),
                                      [](const CriticalRecord& r) { return r.nondegenerate; });
      const bool h_nd = cfg.h_nondegenerate.value_or(all_nd);
      const TheoremVerdict v = verify_theorem(found.records, h_nd, cfg.dim_v);
      b.status = v.pass ? "PASS" : "SHORTFALL";
      json lifted = json::array();
      for (const CriticalRecord& r : found.records) lifted.push_back(r.lifted_residual);
      verdict = {{"status", b.status},
                 {"count", v.count},
                 {"required", v.required},
                 {"bound", v.bound},
                 {"SB", ab.sum_betti},
                 {"CL_plus_1", ab.cup_length_plus_1},
                 {"all_nondegenerate", v.all_nondegenerate},
                 {"h_nondegenerate", h_nd},
                 {"lifted_residuals", lifted},
                 {"max_lifted_residual", v.max_lifted_residual},
                 {"label", v.label}};
    }
    result["verdict"] = verdict;
  } catch (const std::exception& e) {
    throw StageError("verdict", e.what());
  }
  b.exit_code = b.status == "PASS" ? 0 : 2;
  b.ladder_csv = csv(rows);
  b.result = std::move(result);
  return b;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

void write_bundle(const ResultBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write("result.json", canonical_dump(bundle.result));
  write("records.json", canonical_dump(bundle.records));
  write("ladder.csv", bundle.ladder_csv);
}

}  // namespace cliffpen

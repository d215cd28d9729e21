#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "carleson/estimate.hpp"
#include "carleson/fixtures.hpp"
#include "carleson/suites.hpp"

namespace carleson::cli {

namespace fs = std::filesystem;

void ExperimentConfig::validate() {
  if (d < 1 || d > 8) throw ConfigError("d must lie in 1..8");
  if (K > 16) throw ConfigError("K must be at most 16");
  if (kmin < 0) throw ConfigError("kmin must be nonnegative");
  if (K - kResolveMargin < kmin)
    throw ConfigError("K too small: no resolved scale at or above kmin (need K >= kmin + 5)");
  if (psi != "telescoping" && psi != "narrow") throw ConfigError("psi must be telescoping or narrow");
  if (grid_count == 0) grid_count = d == 1 ? 129 : 9;
  if (grid_count < 1) throw ConfigError("grid-count must be positive");
  if (std::pow(static_cast<double>(grid_count), d) > 20000.0)
    throw ConfigError("coefficient grid larger than 20000 phases");
  if (!(grid_radius > 0)) throw ConfigError("grid-radius must be positive");
  if (mass_exponent < 1) throw ConfigError("mass-exponent must be positive");
  if (!(jn_constant > 0)) throw ConfigError("jn-constant must be positive");
  if (modes < 1) throw ConfigError("modes must be positive");
  if (!(max_frequency > 0)) throw ConfigError("max-frequency must be positive");
  if (trials < 1 || pairs < 1) throw ConfigError("trials and pairs must be positive");
  if (jobs < 1) throw ConfigError("jobs must be positive");
  eps0 = 1.0 / (4.0 * d);
  eps = 1.0 / (8.0 * d);
}

std::vector<int> ExperimentConfig::scales() const {
  std::vector<int> out;
  for (int k = kmin; k <= kmax(); ++k) out.push_back(k);
  return out;
}

Bump ExperimentConfig::bump() const {
  return Bump(psi == "narrow" ? BumpKind::Narrow : BumpKind::Telescoping);
}

json ExperimentConfig::to_json() const {
  return {{"d", d},
          {"K", K},
          {"psi", psi},
          {"eps0", eps0},
          {"eps", eps},
          {"mass_exponent", mass_exponent},
          {"jn_constant", jn_constant},
          {"grid", {{"radius", grid_radius}, {"count", grid_count}, {"coefficients", d}}},
          {"scales", {{"min", kmin}, {"max", kmax()}}},
          {"function", {{"modes", modes}, {"max_frequency", max_frequency}}},
          {"seed", seed},
          {"trials", trials},
          {"pairs", pairs}};
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

namespace {

class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs cell(0..n-1) on up to `jobs` threads; the first failure in index order is rethrown.
template <typename F>
void parallel_cells(std::size_t n, int jobs, F&& cell) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        cell(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t extra = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t t = 1; t < extra; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

PartitionConfig partition_config(const ExperimentConfig& c) {
  PartitionConfig p;
  p.c = c.jn_constant;
  p.N = c.mass_exponent;
  return p;
}

json header(const ExperimentConfig& c, const std::string& kind) {
  return {{"kind", kind}, {"build_id", build_id()}, {"config", c.to_json()}, {"config_hash", c.hash()}};
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

// Inputs and partition shared by the stages of one invocation.
class Pipeline {
 public:
  explicit Pipeline(const ExperimentConfig& c) : c_(c) {}

  const ExperimentConfig& config() const { return c_; }
  const GridFunction& function() {
    if (!f_) f_ = random_trigonometric(c_.K, c_.modes, c_.max_frequency, c_.seed);
    return *f_;
  }
  const ChoiceFunction& choice() {
    if (!choice_) {
      const std::vector<CoefficientRange> ranges(c_.d, {-c_.grid_radius, c_.grid_radius, c_.grid_count});
      const auto grid = coefficient_grid(ranges);
      choice_ = argmax_choice(function(), grid, c_.d);
    }
    return *choice_;
  }
  const std::vector<ESet>& sets() {
    if (!sets_) sets_ = tile_sets(choice(), c_.scales());
    return *sets_;
  }
  const PartitionResult& partition() {
    if (!partition_) partition_ = build_partition(measure_tiles(sets(), c_.K), partition_config(c_));
    return *partition_;
  }

 private:
  ExperimentConfig c_;
  std::optional<GridFunction> f_;
  std::optional<ChoiceFunction> choice_;
  std::optional<std::vector<ESet>> sets_;
  std::optional<PartitionResult> partition_;
};

struct Stage {
  bool ok = true;
  std::vector<std::string> files;
};

class Writer {
 public:
  Writer(fs::path dir, Stage& stage) : dir_(std::move(dir)), stage_(stage) {}
  void put(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    stage_.files.push_back(name);
  }

 private:
  fs::path dir_;
  Stage& stage_;
};

void write_manifest(const fs::path& dir, const std::string& stage, const ExperimentConfig& c,
                    const Stage& s) {
  json m = header(c, "manifest");
  m["stage"] = stage;
  m["seeds"] = {{"function", c.seed}, {"norm", NormConfig().seed}};
  m["outputs"] = s.files;
  m["ok"] = s.ok;
  write_text(dir / ("manifest_" + stage + ".json"), dump(m));
}

Stage stage_tiles(Pipeline& p, const fs::path& dir, std::ostream& out) {
  Stage s;
  Writer w(dir, s);
  const auto& c = p.config();
  std::ostringstream bin;
  write_grid_binary(bin, p.function());
  w.put("function.bin", bin.str());
  std::ostringstream csv;
  write_choice_csv(csv, p.choice());
  w.put("choice.csv", csv.str());
  json tiles = json::array();
  for (const auto& P : p.sets()) {
    json t = to_json(P.tile);
    t["A0"] = P.density(c.K);
    t["samples"] = P.samples.size();
    tiles.push_back(std::move(t));
  }
  json j = header(c, "tiles");
  j["count"] = p.sets().size();
  j["tiles"] = std::move(tiles);
  w.put("tiles.json", dump(j));
  out << "tiles: " << p.sets().size() << " nonempty tiles over scales " << c.kmin << ".." << c.kmax()
      << "\n";
  return s;
}

json generation_report(const GenerationReport& g) {
  return {{"n", g.n},
          {"ok", g.ok()},
          {"nesting", g.nesting},
          {"max_bmo", g.max_bmo},
          {"bmo_bound", g.bmo_bound},
          {"max_local_sup", g.max_local_sup},
          {"global_bmo", g.global_bmo},
          {"measures", g.measures},
          {"mass_violations", g.mass_violations},
          {"layer_violations", g.layer_violations}};
}

Stage stage_partition(Pipeline& p, const fs::path& dir, std::ostream& out) {
  Stage s;
  Writer w(dir, s);
  const auto& c = p.config();
  const auto& r = p.partition();
  json dumpj = header(c, "partition");
  dumpj.update(partition_to_json(r));
  w.put("partition.json", dump(dumpj));
  json gens = json::array();
  for (const auto& g : r.generations) {
    const auto rep = verify_generation(r, g.n, partition_config(c));
    s.ok = s.ok && rep.ok();
    gens.push_back(generation_report(rep));
  }
  json rep = header(c, "partition_report");
  rep["tiles"] = r.tiles.size();
  rep["null_tiles"] = r.null_tiles.size();
  rep["generations"] = std::move(gens);
  rep["ok"] = s.ok;
  w.put("partition_report.json", dump(rep));
  out << "partition: " << r.tiles.size() << " tiles, " << r.generations.size() << " generations, "
      << (s.ok ? "verified" : "FAILED verification") << "\n";
  return s;
}

struct ResidueCell {
  int residue = 0;
  std::vector<int> scales;
  std::size_t tiles = 0;
  json generations = json::array();
  json summary = json::array();
  std::string error;
  bool ok = true;
};

void forest_cell(const ExperimentConfig& c, const std::vector<ESet>& all, ResidueCell& cell) {
  std::vector<ESet> sets;
  for (const auto& P : all)
    if (std::find(cell.scales.begin(), cell.scales.end(), P.scale()) != cell.scales.end())
      sets.push_back(P);
  cell.tiles = sets.size();
  const auto r = build_partition(measure_tiles(sets, c.K), partition_config(c));
  for (const auto& g : r.generations) {
    const auto gf = reduce_generation(r, g.n);
    json forests = json::array();
    bool bmo = true;
    std::size_t normal = 0, boundary = 0, tiles = 0;
    PropertyCounts props;
    for (const auto& red : gf.per_layer) {
      props.A += red.properties.A;
      props.B += red.properties.B;
      props.C += red.properties.C;
      props.D += red.properties.D;
    }
    for (const auto& f : gf.forests) {
      forests.push_back(forest_to_json(f));
      bmo = bmo && is_bmo_forest(f);
      const auto split = split_normal_boundary(f, r);
      normal += split.normal.tile_count();
      boundary += split.boundary.tile_count();
      tiles += f.tile_count();
    }
    const bool count_ok = gf.forests.size() <= static_cast<std::size_t>(8 * g.n);
    const bool ok = bmo && count_ok && props.ok();
    cell.ok = cell.ok && ok;
    cell.generations.push_back({{"n", g.n}, {"forests", std::move(forests)}});
    cell.summary.push_back({{"n", g.n},
                            {"forests", gf.forests.size()},
                            {"forest_tiles", tiles},
                            {"discarded_tiles", gf.discarded_tiles},
                            {"normal_tiles", normal},
                            {"boundary_tiles", boundary},
                            {"properties", {{"A", props.A}, {"B", props.B}, {"C", props.C}, {"D", props.D}}},
                            {"bmo_forests", bmo},
                            {"count_ok", count_ok},
                            {"ok", ok}});
  }
}

Stage stage_forest(Pipeline& p, const fs::path& dir, std::ostream& out) {
  Stage s;
  Writer w(dir, s);
  const auto& c = p.config();
  const int D = scale_separation(c.d);
  std::vector<ResidueCell> cells;
  for (int j = 0; j < D; ++j) {
    ResidueCell cell;
    cell.residue = j;
    for (int k : residue_class(c.d, j, c.kmax()))
      if (k >= c.kmin) cell.scales.push_back(k);
    if (!cell.scales.empty()) cells.push_back(std::move(cell));
  }
  const auto& all = p.sets();
  parallel_cells(cells.size(), c.jobs, [&](std::size_t i) {
    try {
      forest_cell(c, all, cells[i]);
    } catch (const ForestPropertyError& e) {
      cells[i].ok = false;
      cells[i].error = e.what();
    }
  });
  json summary = json::array();
  std::size_t forests = 0;
  for (const auto& cell : cells) {
    s.ok = s.ok && cell.ok;
    json j = header(c, "forests");
    j["residue"] = cell.residue;
    j["scales"] = cell.scales;
    j["generations"] = cell.generations;
    w.put("forest_j" + std::to_string(cell.residue) + ".json", dump(j));
    for (const auto& g : cell.summary) forests += g["forests"].get<std::size_t>();
    json e = {{"residue", cell.residue}, {"scales", cell.scales}, {"tiles", cell.tiles},
              {"generations", cell.summary}, {"ok", cell.ok}};
    if (!cell.error.empty()) e["error"] = cell.error;
    summary.push_back(std::move(e));
  }
  json rep = header(c, "forest_report");
  rep["scale_separation"] = D;
  rep["residue_classes"] = std::move(summary);
  rep["ok"] = s.ok;
  w.put("forest_report.json", dump(rep));
  out << "forest: " << cells.size() << " residue classes, " << forests << " forests, "
      << (s.ok ? "properties hold" : "FAILED") << "\n";
  return s;
}

Stage stage_estimate(Pipeline& p, const fs::path& dir, std::ostream& out) {
  Stage s;
  Writer w(dir, s);
  const auto& c = p.config();
  DecayConfig dc;
  const auto t = main_decay_experiment(p.partition(), p.sets(), p.choice(), dc, c.bump());
  std::ostringstream csv;
  write_decay_csv(csv, t, dc.ps);
  w.put("decay.csv", csv.str());
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back({{"n", r.n}, {"tiles", r.tiles}, {"norm", r.norm}, {"lp", r.lp}});
  json j = header(c, "decay");
  j["ps"] = dc.ps;
  j["rows"] = std::move(rows);
  j["slope"] = t.slope;
  j["eta_fit"] = t.eta_fit;
  j["decreasing"] = t.decreasing;
  j["tail_share"] = t.tail_share;
  w.put("decay.json", dump(j));
  out << "estimate: " << t.rows.size() << " generations, eta_fit " << format_double(t.eta_fit)
      << ", " << (t.decreasing ? "strictly decreasing" : "not strictly decreasing") << "\n";
  return s;
}

Stage stage_lemma_check(Pipeline& p, const fs::path& dir, std::ostream& out) {
  Stage s;
  Writer w(dir, s);
  const auto& c = p.config();
  std::vector<AppendixResult> appendix(3);
  std::vector<V17Result> v17(2);
  V15Result v15;
  const std::vector<int> exponents{4, 5, 6, 7, 8, 9, 10};
  parallel_cells(6, c.jobs, [&](std::size_t i) {
    if (i < 3) appendix[i] = appendix_suite(static_cast<int>(i) + 2, c.trials, c.seed);
    else if (i < 5) v17[i - 3] = v17_sweep(static_cast<int>(i) - 2, c.pairs, c.K, c.seed);
    else v15 = v15_decay(2, exponents, 14, c.seed);
  });
  json a = json::array();
  for (const auto& r : appendix) {
    s.ok = s.ok && r.ok();
    a.push_back({{"d", r.d}, {"trials", r.trials}, {"lemma_a_failures", r.a_failures},
                 {"lemma_b_failures", r.b_failures}, {"lemma_c_failures", r.c_failures},
                 {"lemma_c_on_I_failures", r.c_on_I_failures}, {"worst_a", r.worst_a},
                 {"worst_b", r.worst_b}, {"worst_c", r.worst_c}, {"ok", r.ok()}});
  }
  json v = json::array();
  std::vector<Lemma0Report> reports;
  for (std::size_t i = 0; i < v17.size(); ++i) {
    const bool ok = v17[i].median > 0 && v17[i].spread() < 50.0;
    s.ok = s.ok && ok;
    v.push_back({{"d", static_cast<int>(i) + 1}, {"pairs", v17[i].reports.size()}, {"max", v17[i].max},
                 {"median", v17[i].median}, {"spread", v17[i].spread()}, {"ok", ok}});
    reports.insert(reports.end(), v17[i].reports.begin(), v17[i].reports.end());
  }
  const bool v15_ok = v15.slope <= -1.5;
  s.ok = s.ok && v15_ok;
  json j = header(c, "lemma_check");
  j["appendix"] = std::move(a);
  j["v17"] = std::move(v);
  j["v15"] = {{"n", 2}, {"K", 14}, {"deltas", v15.deltas}, {"values", v15.values},
              {"censored", v15.censored}, {"slope", v15.slope}, {"ok", v15_ok}};
  j["ok"] = s.ok;
  w.put("lemma_check.json", dump(j));
  std::ostringstream csv;
  write_lemma0_csv(csv, reports);
  w.put("lemma0.csv", csv.str());
  for (const auto& r : appendix)
    out << "lemma-check: appendix d=" << r.d << " A " << r.a_failures << " B " << r.b_failures
        << " C " << r.c_failures << " (on I " << r.c_on_I_failures << ") failures of " << r.trials
        << "\n";
  for (std::size_t i = 0; i < v17.size(); ++i)
    out << "lemma-check: v17 d=" << i + 1 << " max/median " << format_double(v17[i].spread()) << "\n";
  out << "lemma-check: v15 slope " << format_double(v15.slope) << "\n";
  return s;
}

fs::path output_dir(const ExperimentConfig& c) {
  if (!c.output.empty()) return c.output;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return "carleson-out";
}

int cmd_run(const std::string& stage, ExperimentConfig c, std::ostream& out) {
  c.validate();
  const fs::path dir = output_dir(c);
  Pipeline p(c);
  using StageFn = Stage (*)(Pipeline&, const fs::path&, std::ostream&);
  std::vector<std::pair<std::string, StageFn>> plan;
  if (stage == "tiles" || stage == "all") plan.emplace_back("tiles", stage_tiles);
  if (stage == "partition" || stage == "all") plan.emplace_back("partition", stage_partition);
  if (stage == "forest" || stage == "all") plan.emplace_back("forest", stage_forest);
  if (stage == "estimate" || stage == "all") plan.emplace_back("estimate", stage_estimate);
  if (stage == "lemma-check") plan.emplace_back("lemma-check", stage_lemma_check);
  bool ok = true;
  for (const auto& [name, fn] : plan) {
    Stage s;
    try {
      s = fn(p, dir, out);
    } catch (const NormConvergenceError& e) {
      out << name << ": " << e.what() << "\n";
      s.ok = false;
    }
    write_manifest(dir, name, c, s);
    ok = ok && s.ok;
  }
  out << (ok ? "PASS" : "FAIL") << " (" << dir.string() << ")\n";
  return ok ? kExitPass : kExitAssertion;
}

int cmd_gen(const std::string& kind, ExperimentConfig c, const std::string& mode,
            const std::string& name, const std::string& format, double scale, std::string file,
            std::ostream& out) {
  c.validate();
  const fs::path dir = output_dir(c);
  std::string text;
  if (kind == "function") {
    const auto f = random_trigonometric(c.K, c.modes, c.max_frequency, c.seed);
    std::ostringstream os;
    if (format == "csv") write_grid_csv(os, f);
    else write_grid_binary(os, f);
    if (file.empty()) file = format == "csv" ? "function.csv" : "function.bin";
    text = os.str();
  } else if (kind == "choice") {
    ChoiceFunction ch;
    if (mode == "argmax") ch = Pipeline(c).choice();
    else if (mode == "random") ch = random_choice(c.K, c.d, scale, c.seed);
    else if (mode == "block") ch = block_choice(c.K, c.d, 3, scale, 0.02, c.seed);
    else ch = smooth_choice(c.K, c.d, scale, 4, c.seed);
    std::ostringstream os;
    write_choice_csv(os, ch);
    if (file.empty()) file = "choice.csv";
    text = os.str();
  } else {
    json j;
    if (name == "nested-chain") {
      // Defined with c = 1 so the chain spreads over several layers.
      c.jn_constant = 1.0;
      j = header(c, "partition");
      j.update(partition_to_json(build_partition(nested_chain(), partition_config(c))));
    } else if (name == "comb-tree") {
      const auto fx = comb_tree(c.K, c.kmax() - 1, 2);
      Forest f;
      f.n = 1;
      f.layers.push_back({0, {fx.tree}});
      j = forest_to_json(f);
    } else {
      const std::vector<int> scales{c.kmax() - 2, c.kmax() - 1, c.kmax()};
      const auto fx = cluster_forest(c.K, c.d, 3, c.K - 4, 0, scales, 1e5, c.seed);
      Forest f;
      f.n = 1;
      f.layers.push_back({0, fx.trees});
      j = forest_to_json(f);
    }
    if (file.empty()) file = name + ".json";
    text = dump(j);
  }
  const fs::path path = fs::path(file).is_absolute() ? fs::path(file) : dir / file;
  write_text(path, text);
  out << path.string() << "\n";
  return kExitPass;
}

bool verify_partition(const json& j, const std::string& label, std::ostream& out) {
  PartitionConfig cfg;
  if (j.contains("config")) {
    const auto& c = j["config"];
    if (c.contains("mass_exponent")) cfg.N = c["mass_exponent"].get<int>();
    if (c.contains("jn_constant")) cfg.c = c["jn_constant"].get<double>();
  }
  PartitionResult r;
  try {
    r = partition_from_json(j);
  } catch (const FormatError& e) {
    out << label << ": FAIL: " << e.what() << "\n";
    return false;
  }
  if (r.tiles.empty()) {
    out << label << ": warning: empty partition dump, nothing to check\n";
    return true;
  }
  bool ok = true;
  for (const auto& g : r.generations) {
    const auto rep = verify_generation(r, g.n, cfg);
    int dumped = 0;
    for (const auto& L : g.layers)
      for (std::size_t i : L.tiles) {
        if (!mass_in_range(r.assignment[i].mass, g.n)) ++dumped;
      }
    const bool gok = rep.ok() && dumped == 0;
    ok = ok && gok;
    out << label << ": generation " << g.n << ": " << (gok ? "ok" : "FAIL")
        << " (nesting " << (rep.nesting ? "ok" : "broken") << ", mass violations "
        << rep.mass_violations << ", dumped mass violations " << dumped << ", layer violations "
        << rep.layer_violations << ", bmo " << format_double(rep.max_bmo) << " <= "
        << format_double(rep.bmo_bound) << ")\n";
  }
  return ok;
}

bool verify_forest(const Forest& f, const std::string& label, std::ostream& out) {
  if (f.tile_count() == 0) {
    out << label << ": warning: empty forest, nothing to check\n";
    return true;
  }
  int bad = 0;
  for (const auto& L : f.layers)
    for (const auto& t : L.trees)
      if (!check_tree(t.members, t.top, t.members).ok()) ++bad;
  const bool bmo = is_bmo_forest(f);
  const bool ok = bad == 0 && bmo;
  out << label << ": forest n=" << f.n << ": " << (ok ? "ok" : "FAIL") << " (" << bad
      << " malformed trees, bmo forest " << (bmo ? "yes" : "no") << ")\n";
  return ok;
}

int cmd_verify(const std::vector<std::string>& files, std::ostream& out) {
  if (files.empty()) throw ConfigError("verify needs at least one file");
  bool ok = true;
  for (const auto& file : files) {
    json j;
    try {
      j = json::parse(read_text(file));
    } catch (const json::parse_error& e) {
      throw ConfigError(file + ": not JSON: " + e.what());
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    try {
      if (j.is_object() && j.contains("null_tiles")) {
        ok = verify_partition(j, file, out) && ok;
      } else if (j.is_object() && j.contains("layers")) {
        ok = verify_forest(forest_from_json(j), file, out) && ok;
      } else if (j.is_object() && j.contains("generations") && j.contains("residue")) {
        bool any = false;
        for (const auto& g : j["generations"])
          for (const auto& f : g.at("forests")) {
            ok = verify_forest(forest_from_json(f), file, out) && ok;
            any = true;
          }
        if (!any) out << file << ": warning: no forests, nothing to check\n";
      } else {
        throw ConfigError(file + ": not a partition or forest dump");
      }
    } catch (const FormatError& e) {
      out << file << ": FAIL: " << e.what() << "\n";
      ok = false;
    }
  }
  out << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitPass : kExitAssertion;
}

void add_config_options(CLI::App* app, ExperimentConfig& c) {
  app->add_option("--d", c.d, "polynomial degree parameter (1..8)");
  app->add_option("--K", c.K, "grid size exponent (<= 16)");
  app->add_option("--psi", c.psi, "bump: telescoping or narrow");
  app->add_option("--mass-exponent", c.mass_exponent, "exponent N in the mass");
  app->add_option("--jn-constant", c.jn_constant, "John-Nirenberg constant c");
  app->add_option("--grid-radius", c.grid_radius, "coefficient grid half-width");
  app->add_option("--grid-count", c.grid_count, "grid points per coefficient");
  app->add_option("--kmin", c.kmin, "coarsest scale");
  app->add_option("--modes", c.modes, "modes of the test function");
  app->add_option("--max-frequency", c.max_frequency, "largest test function frequency");
  app->add_option("--seed", c.seed, "seed");
  app->add_option("--trials", c.trials, "appendix trials per degree");
  app->add_option("--pairs", c.pairs, "Lemma 0 tile pairs");
  app->add_option("--jobs", c.jobs, "worker threads");
  app->add_option("--out", c.output, "output directory (default $CARLESON_OUT or carleson-out)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-frequency experiments for polynomial Carleson operators", "carleson"};
  app.require_subcommand(1);

  ExperimentConfig c;
  std::string gen_kind, mode = "argmax", name = "nested-chain", format = "bin", file;
  double scale = 40.0;
  auto* gen = app.add_subcommand("gen", "generate a test function, choice function or fixture");
  gen->add_option("kind", gen_kind)->required()->check(CLI::IsMember({"function", "choice", "fixture"}));
  gen->add_option("--mode", mode, "choice: argmax, random, block or smooth")
      ->check(CLI::IsMember({"argmax", "random", "block", "smooth"}));
  gen->add_option("--name", name, "fixture: nested-chain, comb-tree or cluster-forest")
      ->check(CLI::IsMember({"nested-chain", "comb-tree", "cluster-forest"}));
  gen->add_option("--format", format, "function: bin or csv")->check(CLI::IsMember({"bin", "csv"}));
  gen->add_option("--scale", scale, "coefficient scale of random, block and smooth choices");
  gen->add_option("--file", file, "output file, relative to the output directory");
  add_config_options(gen, c);

  std::string stage;
  auto* runc = app.add_subcommand("run", "run a pipeline stage");
  runc->add_option("stage", stage)
      ->required()
      ->check(CLI::IsMember({"tiles", "partition", "forest", "estimate", "lemma-check", "all"}));
  add_config_options(runc, c);

  std::vector<std::string> files;
  auto* ver = app.add_subcommand("verify", "re-check partition and forest dumps");
  ver->add_option("files", files)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitPass;
    }
    err << "carleson: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    if (*gen) return cmd_gen(gen_kind, c, mode, name, format, scale, file, out);
    if (*runc) return cmd_run(stage, c, out);
    return cmd_verify(files, out);
  } catch (const ConfigError& e) {
    err << "carleson: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "carleson: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "carleson: " << e.what() << "\n";
    return kExitAssertion;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"carleson"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace carleson::cli

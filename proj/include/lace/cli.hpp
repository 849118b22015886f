#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lace/gadgets.hpp"
#include "lace/io.hpp"
#include "lace/metrics.hpp"
#include "lace/query.hpp"
#include "lace/semantics.hpp"
#include "lace/solver.hpp"

namespace lace::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum ExitCode : int { kSuccess = 0, kNoSolution = 1, kValidation = 2, kInconclusive = 3 };

struct CommandResult {
  int exit_code = kSuccess;
  json report;
};

struct InstanceFiles {
  fs::path spec;
  fs::path data;
  std::optional<fs::path> schema;     // defaults to <data>/schema.erx when present
  std::optional<fs::path> overrides;  // similarity overrides TSV
  bool computed_similarity = true;    // false: overrides only
};

/// Parsed and indexed inputs. Not movable once an Engine refers to it.
struct Instance {
  Specification spec;
  Database db;
  SimilarityStore store;
  double parse_ms = 0;
  double similarity_ms = 0;

  Instance() = default;
  Instance(const Instance&) = delete;
  Instance& operator=(const Instance&) = delete;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline json instance_stats(const Database& db) {
  return {{"facts", db.facts().size()}, {"objects", db.objects()->size()}, {"cells", db.cells()->size()}};
}

inline json generators_json(const Database& db, const Candidate& c) {
  json eqo = json::array(), eqv = json::array();
  const auto& ou = *db.objects();
  const auto& cu = *db.cells();
  for (const auto& [a, b] : c.E.generators()) eqo.push_back({db.text(ou[a]), db.text(ou[b])});
  for (const auto& [a, b] : c.V.generators())
    eqv.push_back({db.text(cu[a].tid), cu[a].position, db.text(cu[b].tid), cu[b].position});
  return {{"eqo", eqo}, {"eqv", eqv}};
}

inline json sets_json(const CriterionSets& s) {
  return {{"eq", s.eq_count}, {"supp", s.supp.size()}, {"abs", s.abs.size()}, {"viol", s.viol.size()}};
}

}  // namespace detail

inline std::unique_ptr<Instance> load_instance(const InstanceFiles& files) {
  auto t0 = detail::Clock::now();
  auto inst = std::make_unique<Instance>();
  Schema schema;
  if (files.schema) schema = load_schema(*files.schema);
  else if (fs::exists(files.data / "schema.erx")) schema = load_schema(files.data / "schema.erx");
  inst->spec = load_spec(files.spec, schema);
  inst->db = ingest(files.data, inst->spec.schema);
  inst->parse_ms = detail::ms_since(t0);

  auto t1 = detail::Clock::now();
  SimilarityStore overrides;
  if (files.overrides) overrides = load_overrides(*files.overrides);
  if (files.computed_similarity) {
    inst->store = build_sim_store(inst->db, inst->spec, SimConfig{}, overrides);
  } else {
    inst->store = overrides;
  }
  inst->similarity_ms = detail::ms_since(t1);
  return inst;
}

inline Engine make_engine(const Instance& inst) {
  return Engine(inst.db, inst.spec, SimilarityIndex(inst.db, inst.store));
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveOptions {
  InstanceFiles input;
  Criterion criterion = Criterion::maxES;
  std::size_t num = 1;
  SearchConfig search;
  std::optional<fs::path> out;
};

inline std::string solution_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "solution-%03zu.sol", i + 1);
  return buf;
}

/// Writes up to `num` optimal solutions, in canonical order, to the output
/// directory (stale solution files there are removed first).
inline CommandResult cmd_solve(const SolveOptions& opt) {
  if (opt.num < 1) throw std::invalid_argument("--num must be at least 1");
  auto inst = load_instance(opt.input);
  Engine engine = make_engine(*inst);

  auto t0 = detail::Clock::now();
  auto space = SolutionSpace::explore(engine, opt.search);
  auto optimal = space.optimal(opt.criterion);
  double search_ms = detail::ms_since(t0);

  CommandResult res;
  res.report["command"] = "solve";
  res.report["criterion"] = criterion_name(opt.criterion);
  res.report["instance"] = detail::instance_stats(inst->db);
  res.report["search"] = {{"states", space.states()},
                          {"solutions", space.solutions().size()},
                          {"optimal", optimal.size()}};

  if (opt.out) {
    fs::create_directories(*opt.out);
    for (const auto& entry : fs::directory_iterator(*opt.out)) {
      auto name = entry.path().filename().string();
      if (name.rfind("solution-", 0) == 0 && entry.path().extension() == ".sol") fs::remove(entry.path());
    }
  }
  json sols = json::array();
  for (std::size_t k = 0; k < optimal.size() && k < opt.num; ++k) {
    const auto& rec = space.solutions()[optimal[k]];
    json s = detail::sets_json(rec.sets);
    s.update(detail::generators_json(inst->db, rec.candidate));
    if (opt.out) {
      auto path = *opt.out / solution_file_name(k);
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      if (!f) throw FormatError("cannot write " + path.string());
      f << solution_to_text(inst->db, rec.candidate);
      s["file"] = path.filename().string();
    }
    sols.push_back(std::move(s));
  }
  res.report["solutions"] = sols;
  res.report["timings_ms"] = {{"parse", inst->parse_ms}, {"similarity", inst->similarity_ms}, {"search", search_ms}};
  if (space.solutions().empty()) {
    res.exit_code = kNoSolution;
    res.report["status"] = "no-solution";
  } else {
    res.report["status"] = "ok";
  }
  return res;
}

// ---------------------------------------------------------------------------
// check / recognize
// ---------------------------------------------------------------------------

inline CommandResult cmd_check(const InstanceFiles& input, const fs::path& solution) {
  auto inst = load_instance(input);
  Engine engine = make_engine(*inst);
  Candidate cand = load_solution(solution, inst->db);
  auto chk = engine.check(cand);

  CommandResult res;
  res.report["command"] = "check";
  res.report["instance"] = detail::instance_stats(inst->db);
  res.report["candidate"] = chk.candidate;
  res.report["unsatisfied_hard_rules"] = chk.unsatisfied_hard_rules;
  res.report["violated_constraints"] = chk.violated_constraints;
  res.report["solution"] = chk.ok();
  if (chk.candidate) res.report["sets"] = detail::sets_json(engine.criterion_sets(cand));
  res.report["status"] = chk.ok() ? "ok" : "not-a-solution";
  res.exit_code = chk.ok() ? kSuccess : kNoSolution;
  return res;
}

enum class RecognizerKind { Brute, Restricted };

inline CommandResult cmd_recognize(const InstanceFiles& input, const fs::path& solution, Criterion criterion,
                                   RecognizerKind kind, const SearchConfig& search = {}) {
  auto inst = load_instance(input);
  Engine engine = make_engine(*inst);
  Candidate cand = load_solution(solution, inst->db);

  auto t0 = detail::Clock::now();
  RecognitionResult r = kind == RecognizerKind::Restricted
                            ? recognize_optimal_restricted(engine, cand, criterion)
                            : recognize_optimal_bruteforce(engine, cand, criterion, search);
  double ms = detail::ms_since(t0);

  CommandResult res;
  res.report["command"] = "recognize";
  res.report["criterion"] = criterion_name(criterion);
  res.report["engine"] = kind == RecognizerKind::Restricted ? "restricted" : "brute";
  res.report["instance"] = detail::instance_stats(inst->db);
  res.report["solution"] = r.is_solution;
  res.report["optimal"] = r.optimal;
  if (r.witness) res.report["witness"] = detail::generators_json(inst->db, *r.witness);
  res.report["timings_ms"] = {{"parse", inst->parse_ms}, {"similarity", inst->similarity_ms}, {"recognize", ms}};
  res.report["status"] = "ok";
  return res;
}

// ---------------------------------------------------------------------------
// gadget / eval / sim
// ---------------------------------------------------------------------------

inline CommandResult cmd_gadget(const std::string& kind, const fs::path& input, const fs::path& out) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw FormatError("cannot open " + input.string());
  std::optional<GadgetInstance> g;
  json oracle;
  if (kind == "horn") {
    HornInput h = parse_horn(in);
    g.emplace(gen_horn(h));
    oracle["entails"] = horn_entails(h);
  } else {
    Cnf3 phi = parse_dimacs(in);
    if (kind == "3sat") g.emplace(gen_3sat(phi));
    else if (kind == "3sat-minA") g.emplace(gen_3sat_restricted_minA(phi));
    else if (kind == "3sat-maxE") g.emplace(gen_3sat_restricted_maxE(phi));
    else throw std::invalid_argument("unknown gadget kind " + kind);
    oracle["satisfiable"] = sat_oracle(phi);
  }
  write_instance_dir(out, g->db, g->spec, g->baseline);

  CommandResult res;
  res.report["command"] = "gadget";
  res.report["kind"] = kind;
  res.report["instance"] = detail::instance_stats(g->db);
  res.report["restricted"] = g->spec.restricted();
  res.report["oracle"] = oracle;
  res.report["status"] = "ok";
  return res;
}

/// Object-level precision/recall/F1 of a solution file against a ground
/// truth file. Merges are closed over the constants the two files mention.
inline CommandResult cmd_eval(const fs::path& solution, const fs::path& truth_file) {
  auto truth = load_ground_truth(truth_file);
  std::ifstream in(solution, std::ios::binary);
  if (!in) throw FormatError("cannot open " + solution.string());
  std::vector<std::pair<std::string, std::string>> gens;
  std::set<std::string> names;
  for (const auto& [n, line] : lace::detail::read_lines(in)) {
    if (line[0] == '#') continue;
    auto cols = lace::detail::split_tabs(line);
    if (cols[0] == "eqo" && cols.size() == 3) {
      gens.emplace_back(cols[1], cols[2]);
      names.insert(cols[1]);
      names.insert(cols[2]);
    } else if (!(cols[0] == "eqv" && cols.size() == 5)) {
      throw FormatError("solution line " + std::to_string(n) + ": malformed");
    }
  }
  for (const auto& [a, b] : truth) {
    names.insert(a);
    names.insert(b);
  }
  auto universe = std::make_shared<Universe<std::string>>(std::vector<std::string>(names.begin(), names.end()));
  auto rel = EquivRel<std::string>::close(universe, gens);
  Scores s = score(rel, truth);

  CommandResult res;
  res.report["command"] = "eval";
  res.report["predicted_pairs"] = predicted_pairs(rel).size();
  res.report["truth_pairs"] = truth.size();
  res.report["precision"] = s.precision;
  res.report["recall"] = s.recall;
  res.report["f1"] = s.f1;
  res.report["status"] = "ok";
  return res;
}

/// Writes the similarity store (computed scores plus overrides) as TSV.
inline CommandResult cmd_sim(const InstanceFiles& input, const std::optional<fs::path>& out) {
  auto inst = load_instance(input);
  std::string tsv;
  for (const auto& [k, v] : inst->store.entries()) tsv += k.first + "\t" + k.second + "\t" + std::to_string(v) + "\n";
  CommandResult res;
  res.report["command"] = "sim";
  res.report["pairs"] = inst->store.size();
  if (out) {
    std::ofstream f(*out, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot write " + out->string());
    f << tsv;
    res.report["file"] = out->string();
  } else {
    res.report["scores"] = json::array();
    for (const auto& [k, v] : inst->store.entries()) res.report["scores"].push_back({k.first, k.second, v});
  }
  res.report["timings_ms"] = {{"similarity", inst->similarity_ms}};
  res.report["status"] = "ok";
  return res;
}

/// Runs a command, mapping exceptions onto the exit-status contract.
template <typename F>
CommandResult guarded(F&& f) {
  try {
    return f();
  } catch (const InconclusiveError& e) {
    return {kInconclusive, {{"status", "inconclusive"}, {"message", e.what()}}};
  } catch (const std::exception& e) {
    return {kValidation, {{"status", "error"}, {"message", e.what()}}};
  }
}

}  // namespace lace::cli

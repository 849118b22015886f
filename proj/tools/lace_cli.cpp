#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lace/cli.hpp"

namespace {

using lace::cli::CommandResult;
using lace::cli::InstanceFiles;

struct InstanceFlags {
  std::string spec;
  std::string data;
  std::string schema;
  std::string overrides;
  bool overrides_only = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--spec", spec, "Specification file (.erx)")->required();
    cmd->add_option("--data", data, "Directory of <Relation>.tsv files")->required();
    cmd->add_option("--schema", schema, "Schema file (default: <data>/schema.erx)");
    cmd->add_option("--sim-overrides", overrides, "Similarity overrides TSV (value1, value2, score)");
    cmd->add_flag("--overrides-only", overrides_only, "Use only the override scores, no computed similarity");
  }

  InstanceFiles files() const {
    InstanceFiles f;
    f.spec = spec;
    f.data = data;
    if (!schema.empty()) f.schema = schema;
    if (!overrides.empty()) f.overrides = overrides;
    f.computed_similarity = !overrides_only;
    return f;
  }
};

lace::Criterion criterion_or_throw(const std::string& name) {
  auto c = lace::parse_criterion(name);
  if (!c) throw std::invalid_argument("unknown criterion " + name);
  return *c;
}

int emit(const CommandResult& r) {
  std::cout << r.report.dump(2) << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-based entity resolution with global object and local value merges"};
  app.require_subcommand(1);

  const std::vector<std::string> criteria{"maxES", "maxEC", "maxSS", "maxSC", "minAS", "minAC", "minVS", "minVC"};

  // solve
  auto* solve = app.add_subcommand("solve", "Compute optimal solutions");
  InstanceFlags solve_in;
  solve_in.attach(solve);
  std::string solve_criterion = "maxES";
  std::size_t num = 1;
  unsigned threads = 1;
  std::size_t pair_budget = lace::SearchConfig{}.pair_budget;
  std::string out;
  solve->add_option("--criterion", solve_criterion, "Optimality criterion")->check(CLI::IsMember(criteria));
  solve->add_option("--num", num, "Maximum number of solutions to write")->check(CLI::PositiveNumber);
  solve->add_option("--threads", threads, "Worker threads for the search")->check(CLI::PositiveNumber);
  solve->add_option("--pair-budget", pair_budget, "Cap on explored merge steps")->check(CLI::PositiveNumber);
  solve->add_option("--out", out, "Directory for solution files");

  // check
  auto* check = app.add_subcommand("check", "Check whether a solution file is a solution");
  InstanceFlags check_in;
  check_in.attach(check);
  std::string check_solution;
  check->add_option("--solution", check_solution, "Solution file")->required();

  // recognize
  auto* recognize = app.add_subcommand("recognize", "Decide whether a solution is optimal");
  InstanceFlags rec_in;
  rec_in.attach(recognize);
  std::string rec_solution, rec_criterion = "maxES", engine = "brute";
  std::size_t rec_budget = lace::SearchConfig{}.pair_budget;
  unsigned rec_threads = 1;
  recognize->add_option("--solution", rec_solution, "Solution file")->required();
  recognize->add_option("--criterion", rec_criterion, "Optimality criterion")->check(CLI::IsMember(criteria));
  recognize->add_option("--engine", engine, "Recognizer")->check(CLI::IsMember({"brute", "restricted"}));
  recognize->add_option("--pair-budget", rec_budget, "Cap on explored merge steps (brute)")
      ->check(CLI::PositiveNumber);
  recognize->add_option("--threads", rec_threads, "Worker threads (brute)")->check(CLI::PositiveNumber);

  // gadget
  auto* gadget = app.add_subcommand("gadget", "Generate a reduction instance");
  std::string kind, input, gadget_out;
  gadget->add_option("--kind", kind, "Gadget kind")
      ->required()
      ->check(CLI::IsMember({"3sat", "3sat-minA", "3sat-maxE", "horn"}));
  gadget->add_option("--input", input, "DIMACS CNF or Horn input file")->required();
  gadget->add_option("--out", gadget_out, "Output directory")->required();

  // eval
  auto* evalc = app.add_subcommand("eval", "Score a solution against ground truth");
  std::string eval_solution, truth;
  evalc->add_option("--solution", eval_solution, "Solution file")->required();
  evalc->add_option("--truth", truth, "Ground truth TSV (two object columns)")->required();

  // sim
  auto* sim = app.add_subcommand("sim", "Precompute similarity scores");
  InstanceFlags sim_in;
  sim_in.attach(sim);
  std::string sim_out;
  sim->add_option("--out", sim_out, "Output TSV (default: embed in the report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : lace::cli::kValidation;
  }

  CommandResult r = lace::cli::guarded([&]() -> CommandResult {
    if (*solve) {
      lace::cli::SolveOptions opt;
      opt.input = solve_in.files();
      opt.criterion = criterion_or_throw(solve_criterion);
      opt.num = num;
      opt.search.threads = threads;
      opt.search.pair_budget = pair_budget;
      if (!out.empty()) opt.out = out;
      return lace::cli::cmd_solve(opt);
    }
    if (*check) return lace::cli::cmd_check(check_in.files(), check_solution);
    if (*recognize) {
      lace::SearchConfig cfg;
      cfg.pair_budget = rec_budget;
      cfg.threads = rec_threads;
      auto k = engine == "restricted" ? lace::cli::RecognizerKind::Restricted : lace::cli::RecognizerKind::Brute;
      return lace::cli::cmd_recognize(rec_in.files(), rec_solution, criterion_or_throw(rec_criterion), k, cfg);
    }
    if (*gadget) return lace::cli::cmd_gadget(kind, input, gadget_out);
    if (*evalc) return lace::cli::cmd_eval(eval_solution, truth);
    std::optional<std::filesystem::path> o;
    if (!sim_out.empty()) o = sim_out;
    return lace::cli::cmd_sim(sim_in.files(), o);
  });
  return emit(r);
}

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lace/core.hpp"
#include "lace/dsl.hpp"
#include "lace/metrics.hpp"
#include "lace/semantics.hpp"
#include "lace/similarity.hpp"

namespace lace {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

/// Non-blank lines with trailing CR removed, paired with 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.emplace_back(n, line);
  }
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  return in;
}

inline std::string read_file(const std::filesystem::path& p) {
  auto in = open_in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + p.string());
  out << content;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Databases
// ---------------------------------------------------------------------------

/// Reads `<Relation>.tsv` files (no header; first column the tid). Empty
/// fields become Null. Declared relations without a file are empty; a file
/// naming an undeclared relation is an error.
inline Database ingest(const std::filesystem::path& dir, const Schema& schema) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw FormatError("data directory not found: " + dir.string());
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".tsv") continue;
    std::string rel = entry.path().stem().string();
    if (!schema.find(rel)) throw FormatError("unknown relation file " + entry.path().filename().string());
    files.push_back(rel);
  }
  DatabaseBuilder b(schema);
  for (const auto& decl : schema.relations()) {
    if (std::find(files.begin(), files.end(), decl.name) == files.end()) continue;
    auto path = dir / (decl.name + ".tsv");
    auto in = detail::open_in(path);
    for (const auto& [n, line] : detail::read_lines(in)) {
      auto cols = detail::split_tabs(line);
      std::string where = path.filename().string() + ":" + std::to_string(n) + ": ";
      if (cols.size() != decl.arity() + 1)
        throw FormatError(where + "expected " + std::to_string(decl.arity() + 1) + " columns, got " +
                          std::to_string(cols.size()));
      if (cols[0].empty()) throw FormatError(where + "empty tid");
      std::vector<std::optional<std::string>> args;
      for (std::size_t i = 1; i < cols.size(); ++i)
        args.push_back(cols[i].empty() ? std::nullopt : std::optional<std::string>(cols[i]));
      try {
        b.add(decl.name, cols[0], args);
      } catch (const std::invalid_argument& e) {
        throw FormatError(where + e.what());
      }
    }
  }
  return std::move(b).build();
}

inline std::string relation_tsv(const Database& db, std::uint32_t relation) {
  std::string out;
  for (auto fi : db.facts_of(relation)) {
    const auto& f = db.facts()[fi];
    out += db.text(f.tid);
    for (auto a : f.args) out += "\t" + (db.is_null(a) ? std::string() : db.text(a));
    out += "\n";
  }
  return out;
}

/// One TSV per declared relation, empty relations included.
inline void write_database(const std::filesystem::path& dir, const Database& db) {
  std::filesystem::create_directories(dir);
  for (std::uint32_t r = 0; r < db.schema().size(); ++r)
    detail::write_file(dir / (db.schema().at(r).name + ".tsv"), relation_tsv(db, r));
}

// ---------------------------------------------------------------------------
// Solution files
// ---------------------------------------------------------------------------

/// Line-oriented generators: `eqo<TAB>o1<TAB>o2` and
/// `eqv<TAB>tid<TAB>pos<TAB>tid<TAB>pos`, in canonical order.
inline std::string solution_to_text(const Database& db, const Candidate& c) {
  std::string out;
  const auto& ou = *db.objects();
  const auto& cu = *db.cells();
  for (const auto& [a, b] : c.E.generators()) out += "eqo\t" + db.text(ou[a]) + "\t" + db.text(ou[b]) + "\n";
  for (const auto& [a, b] : c.V.generators())
    out += "eqv\t" + db.text(cu[a].tid) + "\t" + std::to_string(cu[a].position) + "\t" + db.text(cu[b].tid) + "\t" +
           std::to_string(cu[b].position) + "\n";
  return out;
}

inline Candidate parse_solution(std::istream& in, const Database& db) {
  std::vector<ObjRel::IndexPair> objs;
  std::vector<CellRel::IndexPair> cells;
  auto cell_index = [&](const std::string& tid, const std::string& pos, const std::string& where) {
    auto t = db.find(Sort::Tid, tid);
    std::uint32_t p = 0;
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(pos, &used);
      if (used != pos.size() || v == 0 || v > 0xFFFFFFFFul) throw std::invalid_argument(pos);
      p = static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
      throw FormatError(where + "bad cell position '" + pos + "'");
    }
    auto idx = t ? db.cells()->position_of(Cell{*t, p}) : std::nullopt;
    if (!idx) throw FormatError(where + "unknown cell " + tid + "." + pos);
    return *idx;
  };
  for (const auto& [n, line] : detail::read_lines(in)) {
    if (line[0] == '#') continue;
    auto cols = detail::split_tabs(line);
    std::string where = "solution line " + std::to_string(n) + ": ";
    if (cols[0] == "eqo" && cols.size() == 3) {
      auto a = db.find(Sort::Object, cols[1]);
      auto b = db.find(Sort::Object, cols[2]);
      auto ia = a ? db.objects()->position_of(*a) : std::nullopt;
      auto ib = b ? db.objects()->position_of(*b) : std::nullopt;
      if (!ia) throw FormatError(where + "unknown object " + cols[1]);
      if (!ib) throw FormatError(where + "unknown object " + cols[2]);
      objs.emplace_back(*ia, *ib);
    } else if (cols[0] == "eqv" && cols.size() == 5) {
      cells.emplace_back(cell_index(cols[1], cols[2], where), cell_index(cols[3], cols[4], where));
    } else {
      throw FormatError(where + "expected 'eqo' with 2 fields or 'eqv' with 4 fields");
    }
  }
  return {ObjRel::close_indices(db.objects(), objs), CellRel::close_indices(db.cells(), cells)};
}

inline Candidate load_solution(const std::filesystem::path& p, const Database& db) {
  auto in = detail::open_in(p);
  return parse_solution(in, db);
}

// ---------------------------------------------------------------------------
// Similarity overrides and ground truth
// ---------------------------------------------------------------------------

/// TSV rows `value1<TAB>value2<TAB>score`, score an integer in [0, 100].
inline SimilarityStore parse_overrides(std::istream& in) {
  SimilarityStore store;
  for (const auto& [n, line] : detail::read_lines(in)) {
    auto cols = detail::split_tabs(line);
    std::string where = "overrides line " + std::to_string(n) + ": ";
    if (cols.size() != 3) throw FormatError(where + "expected 3 columns");
    int s = -1;
    try {
      std::size_t used = 0;
      s = std::stoi(cols[2], &used);
      if (used != cols[2].size()) s = -1;
    } catch (const std::exception&) {
    }
    if (s < 0 || s > 100) throw FormatError(where + "score must be an integer in [0,100]");
    if (cols[0].empty() || cols[1].empty()) throw FormatError(where + "empty value");
    store.set(cols[0], cols[1], s);
  }
  return store;
}

inline SimilarityStore load_overrides(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  return parse_overrides(in);
}

/// TSV rows of two object constants.
inline PairSet<std::string> parse_ground_truth(std::istream& in) {
  PairSet<std::string> out;
  for (const auto& [n, line] : detail::read_lines(in)) {
    auto cols = detail::split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw FormatError("ground truth line " + std::to_string(n) + ": expected 2 non-empty columns");
    if (cols[0] != cols[1]) out.insert(unordered(cols[0], cols[1]));
  }
  return out;
}

inline PairSet<std::string> load_ground_truth(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  return parse_ground_truth(in);
}

/// Object merges of `c` as text pairs.
inline PairSet<std::string> object_pairs_text(const Database& db, const ObjRel& E) {
  PairSet<std::string> out;
  for (const auto& [a, b] : predicted_pairs(E)) out.insert(unordered(db.text(a), db.text(b)));
  return out;
}

// ---------------------------------------------------------------------------
// Specification files
// ---------------------------------------------------------------------------

inline Specification load_spec(const std::filesystem::path& p, const Schema& schema = {}) {
  return parse_spec(detail::read_file(p), schema);
}

inline Schema load_schema(const std::filesystem::path& p) { return parse_schema(detail::read_file(p)); }

/// Writes schema.erx, spec.erx (rules only), one TSV per relation and
/// baseline.sol.
inline void write_instance_dir(const std::filesystem::path& dir, const Database& db, const Specification& spec,
                               const Candidate& baseline) {
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "schema.erx", schema_to_text(spec.schema));
  detail::write_file(dir / "spec.erx", rules_to_text(spec));
  write_database(dir, db);
  detail::write_file(dir / "baseline.sol", solution_to_text(db, baseline));
}

}  // namespace lace

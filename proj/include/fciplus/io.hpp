#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fciplus/pipeline.hpp"

namespace fciplus {

using Json = nlohmann::json;

inline Json edges_to_json(const MixedGraph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges())
    edges.push_back({{"a", e.a}, {"b", e.b}, {"mark_a", mark_name(e.mark_a)}, {"mark_b", mark_name(e.mark_b)}});
  return edges;
}

inline Json ids_to_json(const VarSet& s) { return Json(std::vector<VarId>(s.begin(), s.end())); }

// A PAG or MAG: every node observed.
inline Json graph_to_json(const MixedGraph& g) {
  return {{"n", g.size()},
          {"names", g.names()},
          {"observed", ids_to_json(range_set(g.size()))},
          {"latent", Json::array()},
          {"selection", Json::array()},
          {"edges", edges_to_json(g)}};
}

inline Json dag_to_json(const CausalDag& dag) {
  return {{"n", dag.size()},
          {"names", dag.graph().names()},
          {"observed", ids_to_json(dag.observed())},
          {"latent", ids_to_json(dag.latent())},
          {"selection", ids_to_json(dag.selection())},
          {"edges", edges_to_json(dag.graph())}};
}

namespace detail {

template <typename F>
auto json_field(const Json& j, const char* key, F&& get) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("graph JSON lacks field '") + key + "'");
  try {
    return get(j.at(key));
  } catch (const Json::exception& e) {
    throw InputError(std::string("graph JSON field '") + key + "': " + e.what());
  }
}

inline MixedGraph graph_body(const Json& j, int n) {
  auto names = json_field(j, "names", [](const Json& v) { return v.get<std::vector<std::string>>(); });
  if (static_cast<int>(names.size()) != n) throw InputError("graph JSON: names has wrong length");
  GraphBuilder b(n, std::move(names));
  for (const Json& e : json_field(j, "edges", [](const Json& v) { return v; })) {
    const VarId a = json_field(e, "a", [](const Json& v) { return v.get<VarId>(); });
    const VarId c = json_field(e, "b", [](const Json& v) { return v.get<VarId>(); });
    const Mark ma = parse_mark(json_field(e, "mark_a", [](const Json& v) { return v.get<std::string>(); }));
    const Mark mb = parse_mark(json_field(e, "mark_b", [](const Json& v) { return v.get<std::string>(); }));
    if (b.view().valid(a) && b.view().valid(c) && b.view().adjacent(a, c)) throw InputError("graph JSON: duplicate edge");
    b.add_edge(a, c, ma, mb);
  }
  return std::move(b).build();
}

}  // namespace detail

inline MixedGraph graph_from_json(const Json& j) {
  const int n = detail::json_field(j, "n", [](const Json& v) { return v.get<int>(); });
  if (n < 0) throw InputError("graph JSON: negative n");
  return detail::graph_body(j, n);
}

inline CausalDag dag_from_json(const Json& j) {
  const int n = detail::json_field(j, "n", [](const Json& v) { return v.get<int>(); });
  if (n < 0) throw InputError("graph JSON: negative n");
  MixedGraph g = detail::graph_body(j, n);
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  std::vector<Role> roles(static_cast<std::size_t>(n), Role::kObserved);
  for (auto [key, role] : {std::pair{"observed", Role::kObserved}, std::pair{"latent", Role::kLatent},
                           std::pair{"selection", Role::kSelection}}) {
    for (VarId v : detail::json_field(j, key, [](const Json& x) { return x.get<std::vector<VarId>>(); })) {
      if (v < 0 || v >= n) throw InputError(std::string("graph JSON: ") + key + " lists unknown id " + std::to_string(v));
      ++seen[static_cast<std::size_t>(v)];
      roles[static_cast<std::size_t>(v)] = role;
    }
  }
  for (VarId v = 0; v < n; ++v)
    if (seen[static_cast<std::size_t>(v)] != 1)
      throw InputError("graph JSON: node " + std::to_string(v) + " must have exactly one role");
  return CausalDag(std::move(g), std::move(roles));
}

inline Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

inline CausalDag read_dag_file(const std::string& path) { return dag_from_json(read_json_file(path)); }

inline void write_dag_file(const std::string& path, const CausalDag& dag) {
  write_text_file(path, dag_to_json(dag).dump(2) + "\n");
}

// 64-bit FNV-1a of the compact graph JSON, as 16 hex digits.
inline std::string graph_hash(const CausalDag& dag) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dag_to_json(dag).dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json stats_to_json(const OracleStats& s) {
  Json j = Json::object();
  for (Stage st : kAllStages)
    j[stage_name(st)] = {{"queries", s[st].queries}, {"distinct", s[st].distinct}, {"max_cond_size", s[st].max_cond_size}};
  return j;
}

inline OracleStats stats_from_json(const Json& j) {
  OracleStats s;
  for (Stage st : kAllStages) {
    if (!j.contains(stage_name(st))) continue;
    const Json& c = j.at(stage_name(st));
    s[st].queries = c.at("queries").get<std::size_t>();
    s[st].distinct = c.at("distinct").get<std::size_t>();
    s[st].max_cond_size = c.at("max_cond_size").get<std::size_t>();
  }
  return s;
}

inline Json report_to_json(const RunReport& r) {
  Json attempts = Json::array();
  for (const DsepAttempt& a : r.dsep_attempts)
    attempts.push_back({{"x", a.x}, {"y", a.y}, {"witness_u", a.witness_u}, {"witness_v", a.witness_v},
                        {"combinations", a.combinations}, {"resolved", a.resolved}, {"base", ids_to_json(a.base)},
                        {"hierarchy", ids_to_json(a.hierarchy)}, {"separator", ids_to_json(a.separator)},
                        {"used_intersection", a.used_intersection}});
  Json links = Json::array();
  for (const auto& [x, y] : r.dsep_links_detected) links.push_back({x, y});
  Json inv = Json::array();
  for (const InvariantResult& i : r.invariants)
    inv.push_back({{"name", i.name}, {"checked", i.checked}, {"violations", i.violations}, {"examples", i.examples}});
  return {{"algorithm", r.algorithm},
          {"instance", r.instance},
          {"graph_hash", r.graph_hash},
          {"seed", r.seed},
          {"k", r.k ? Json(*r.k) : Json(nullptr)},
          {"intersect_pdsep", r.intersect_pdsep},
          {"names", r.names},
          {"pag", graph_to_json(r.pag)},
          {"stats", stats_to_json(r.stats)},
          {"timings_ms", r.timings_ms},
          {"dsep", {{"links_detected", links},
                    {"resolutions", r.dsep_resolutions},
                    {"reactivations", r.dsep_reactivations},
                    {"attempts", attempts}}},
          {"pdsep_removed", r.pdsep_removed},
          {"invariants", inv}};
}

inline RunReport report_from_json(const Json& j) {
  RunReport r;
  try {
    r.algorithm = j.at("algorithm").get<std::string>();
    r.instance = j.value("instance", "");
    r.graph_hash = j.value("graph_hash", "");
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("k") && !j.at("k").is_null()) r.k = j.at("k").get<int>();
    r.intersect_pdsep = j.value("intersect_pdsep", false);
    r.names = j.at("names").get<std::vector<std::string>>();
    r.pag = graph_from_json(j.at("pag"));
    r.stats = stats_from_json(j.at("stats"));
    if (j.contains("timings_ms")) r.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
    if (j.contains("dsep")) {
      const Json& d = j.at("dsep");
      for (const Json& l : d.at("links_detected")) r.dsep_links_detected.emplace_back(l.at(0).get<VarId>(), l.at(1).get<VarId>());
      r.dsep_resolutions = d.at("resolutions").get<std::size_t>();
      r.dsep_reactivations = d.at("reactivations").get<std::size_t>();
      for (const Json& a : d.at("attempts")) {
        DsepAttempt at{};
        at.x = a.at("x").get<VarId>();
        at.y = a.at("y").get<VarId>();
        at.witness_u = a.at("witness_u").get<VarId>();
        at.witness_v = a.at("witness_v").get<VarId>();
        at.combinations = a.at("combinations").get<std::size_t>();
        at.resolved = a.at("resolved").get<bool>();
        at.base = VarSet(a.at("base").get<std::vector<VarId>>());
        at.hierarchy = VarSet(a.at("hierarchy").get<std::vector<VarId>>());
        at.separator = VarSet(a.at("separator").get<std::vector<VarId>>());
        at.used_intersection = a.at("used_intersection").get<bool>();
        r.dsep_attempts.push_back(std::move(at));
      }
    }
    r.pdsep_removed = j.value("pdsep_removed", std::size_t{0});
    if (j.contains("invariants"))
      for (const Json& i : j.at("invariants"))
        r.invariants.emplace_back(i.at("name").get<std::string>(), i.at("checked").get<std::size_t>(),
                                  i.at("violations").get<std::size_t>(),
                                  i.at("examples").get<std::vector<std::string>>());
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed run report: ") + e.what());
  }
  if (static_cast<int>(r.names.size()) != r.pag.size()) throw InputError("run report: names do not match the PAG");
  return r;
}

// Report JSON without wall-clock fields, for replay comparisons.
inline Json replay_view(const RunReport& r) {
  Json j = report_to_json(r);
  j.erase("timings_ms");
  return j;
}

inline std::vector<RunReport> read_reports(std::istream& in) {
  std::vector<RunReport> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(report_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw InputError("report line " + std::to_string(lineno) + " is not JSON: " + e.what());
    }
  }
  return out;
}

inline std::vector<RunReport> read_reports_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  return read_reports(f);
}

inline void append_report(const std::string& path, const RunReport& r) {
  std::ofstream f(path, std::ios::app);
  if (!f) throw InputError("cannot write " + path);
  f << report_to_json(r).dump() << "\n";
}

inline const char* dot_arrow(Mark m) {
  switch (m) {
    case Mark::kArrow: return "normal";
    case Mark::kTail: return "none";
    case Mark::kCircle: return "odot";
    case Mark::kNone: break;
  }
  throw InternalError("no DOT arrow for an absent mark");
}

inline std::string to_dot(const MixedGraph& g, const std::string& title = "G") {
  std::ostringstream out;
  out << "digraph \"" << title << "\" {\n";
  for (VarId v = 0; v < g.size(); ++v) out << "  \"" << g.name(v) << "\";\n";
  for (const Edge& e : g.edges())
    out << "  \"" << g.name(e.a) << "\" -> \"" << g.name(e.b) << "\" [dir=both, arrowtail=" << dot_arrow(e.mark_a)
        << ", arrowhead=" << dot_arrow(e.mark_b) << "];\n";
  out << "}\n";
  return out.str();
}

// Latent and selection nodes drawn dashed and boxed respectively.
inline std::string to_dot(const CausalDag& dag, const std::string& title = "G") {
  std::ostringstream out;
  out << "digraph \"" << title << "\" {\n";
  for (VarId v = 0; v < dag.size(); ++v) {
    out << "  \"" << dag.name(v) << "\"";
    if (dag.role(v) == Role::kLatent) out << " [style=dashed]";
    if (dag.role(v) == Role::kSelection) out << " [shape=box]";
    out << ";\n";
  }
  for (const Edge& e : dag.graph().edges())
    out << "  \"" << dag.name(e.a) << "\" -> \"" << dag.name(e.b) << "\" [dir=both, arrowtail=" << dot_arrow(e.mark_a)
        << ", arrowhead=" << dot_arrow(e.mark_b) << "];\n";
  out << "}\n";
  return out.str();
}

}  // namespace fciplus

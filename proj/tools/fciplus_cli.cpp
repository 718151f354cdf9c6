#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fciplus/fciplus.hpp"

namespace fs = std::filesystem;
using namespace fciplus;

namespace {

constexpr int kOk = 0;
constexpr int kDiff = 1;
constexpr int kInput = 2;

// A run that failed an embedded invariant or its budget.
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<int> degree_bound(int k) { return k < 0 ? std::nullopt : std::optional<int>(k); }

void print_invariant_failures(const RunReport& r, std::ostream& out) {
  for (const InvariantResult& i : r.invariants) {
    if (i.ok()) continue;
    out << "invariant " << i.name << ": " << i.violations << " of " << i.checked << " checks failed\n";
    for (const std::string& ex : i.examples) out << "  " << ex << "\n";
  }
}

// ---- generate

struct GenerateArgs {
  GeneratorConfig cfg;
  std::string out;
  std::string out_dir;
  int count = 1;
};

Json generated_file(const CausalDag& dag, const GeneratorConfig& cfg) {
  Json j = dag_to_json(dag);
  j["generator"] = {{"n", cfg.n},         {"k", cfg.k},       {"latents", cfg.latents},
                    {"selection", cfg.selection}, {"density", cfg.density}, {"seed", cfg.seed},
                    {"dsep_gadgets", cfg.dsep_gadgets}};
  return j;
}

int cmd_generate(const GenerateArgs& a) {
  if (a.out.empty() == a.out_dir.empty()) throw InputError("give exactly one of --out and --out-dir");
  if (!a.out.empty() && a.count != 1) throw InputError("--count needs --out-dir");
  if (!a.out_dir.empty()) fs::create_directories(a.out_dir);
  std::size_t with_links = 0;
  for (int i = 0; i < a.count; ++i) {
    GeneratorConfig cfg = a.cfg;
    cfg.seed = a.cfg.seed + static_cast<std::uint64_t>(i);
    const CausalDag dag = random_sparse_dag(cfg);
    std::string path = a.out;
    if (path.empty()) {
      std::ostringstream name;
      name << "g" << std::setw(5) << std::setfill('0') << i << ".json";
      path = (fs::path(a.out_dir) / name.str()).string();
    }
    write_text_file(path, generated_file(dag, cfg).dump(2) + "\n");
    const auto links = true_dsep_links(dag, cfg.k);
    if (!links.empty()) ++with_links;
    std::cout << path << ": " << dag.observed().size() << " observed, MAG degree " << latent_project(dag).max_degree()
              << ", true D-sep links " << links.size() << "\n";
  }
  std::cout << "instances with a true D-sep link: " << with_links << " of " << a.count << "\n";
  return kOk;
}

// ---- run

struct RunArgs {
  std::string alg = "fciplus";
  std::string graph;
  std::string data;
  int k = 3;
  double alpha = GaussOracle::kDefaultAlpha;
  bool intersect_pdsep = false;
  std::string report;
  std::string dot;
};

std::uint64_t generator_seed(const Json& j) {
  if (j.contains("generator") && j["generator"].contains("seed")) return j["generator"]["seed"].get<std::uint64_t>();
  return 0;
}

RunReport run_graph_file(Algorithm alg, const std::string& path, std::optional<int> k, bool intersect) {
  const Json j = read_json_file(path);
  const CausalDag dag = dag_from_json(j);
  PipelineOptions opt;
  opt.k = k;
  opt.intersect_pdsep = intersect;
  RunReport r = run_on_dag(alg, dag, opt).report;
  r.instance = fs::path(path).filename().string();
  r.graph_hash = graph_hash(dag);
  r.seed = generator_seed(j);
  return r;
}

void emit(const RunReport& r, const std::string& report_path) {
  if (report_path.empty())
    std::cout << report_to_json(r).dump() << "\n";
  else
    append_report(report_path, r);
}

int cmd_run(const RunArgs& a) {
  const Algorithm alg = parse_algorithm(a.alg);
  if (a.graph.empty() == a.data.empty()) throw InputError("give exactly one of --graph and --data");
  RunReport r;
  if (!a.graph.empty()) {
    r = run_graph_file(alg, a.graph, degree_bound(a.k), a.intersect_pdsep);
  } else {
    const Dataset ds = read_csv_file(a.data);
    GaussOracle oracle = GaussOracle::from_data(ds, a.alpha);
    PipelineOptions opt;
    opt.k = degree_bound(a.k);
    opt.intersect_pdsep = a.intersect_pdsep;
    opt.names = ds.names;
    r = run_pipeline(alg, oracle, opt).report;
    r.instance = fs::path(a.data).filename().string();
  }
  emit(r, a.report);
  if (!a.dot.empty()) write_text_file(a.dot, to_dot(r.pag, r.instance));
  if (!r.invariants_ok()) {
    print_invariant_failures(r, std::cerr);
    return kDiff;
  }
  return kOk;
}

// ---- compare

int cmd_compare(const std::string& pa, const std::string& pb) {
  const auto ra = read_reports_file(pa);
  const auto rb = read_reports_file(pb);
  if (ra.size() != rb.size())
    throw InputError("report files hold " + std::to_string(ra.size()) + " and " + std::to_string(rb.size()) + " runs");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const RunDiff d = compare_runs(ra[i], rb[i]);
    const std::string label = ra[i].instance.empty() ? "run " + std::to_string(i) : ra[i].instance;
    if (d.differs()) ++differing;
    if (!d.differs() && d.stat_deltas.empty()) continue;
    std::cout << label << " (" << ra[i].algorithm << " vs " << rb[i].algorithm << ")\n";
    for (const auto& s : d.pag_differences) std::cout << "  " << s << "\n";
    for (const auto& s : d.stat_deltas) std::cout << "  " << s << "\n";
  }
  std::cout << differing << " of " << ra.size() << " runs differ in the PAG\n";
  return differing ? kDiff : kOk;
}

// ---- bench

struct BenchArgs {
  std::string corpus;
  std::string algs = "pc,fci,fciplus";
  int k = 3;
  bool intersect_pdsep = false;
  std::string report;
};

struct BenchTotals {
  std::size_t runs = 0;
  std::size_t queries = 0;
  std::size_t distinct = 0;
  std::size_t max_queries = 0;
  std::size_t invariant_failures = 0;
  double ms = 0;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<Algorithm> algs;
  std::stringstream ss(a.algs);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) algs.push_back(parse_algorithm(tok));
  if (algs.empty()) throw InputError("--algs names no algorithm");
  if (!fs::is_directory(a.corpus)) throw InputError("corpus directory " + a.corpus + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.corpus))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("corpus directory " + a.corpus + " has no .json graphs");

  std::map<std::string, BenchTotals> totals;
  std::size_t with_links = 0, fci_diffs = 0;
  for (const fs::path& f : files) {
    std::map<Algorithm, RunReport> by_alg;
    for (Algorithm alg : algs) {
      RunReport r = run_graph_file(alg, f.string(), degree_bound(a.k), a.intersect_pdsep);
      BenchTotals& t = totals[r.algorithm];
      ++t.runs;
      t.queries += r.stats.total_queries();
      t.distinct += r.stats.total_distinct();
      t.max_queries = std::max(t.max_queries, r.stats.total_queries());
      for (const auto& [stage, ms] : r.timings_ms) t.ms += ms;
      if (!r.invariants_ok()) {
        ++t.invariant_failures;
        std::cerr << f.filename().string() << " " << r.algorithm << ":\n";
        print_invariant_failures(r, std::cerr);
      }
      if (alg == Algorithm::kFciPlus && !r.dsep_links_detected.empty()) ++with_links;
      if (!a.report.empty()) append_report(a.report, r);
      by_alg.emplace(alg, std::move(r));
    }
    if (by_alg.count(Algorithm::kFci) && by_alg.count(Algorithm::kFciPlus) &&
        compare_runs(by_alg.at(Algorithm::kFci), by_alg.at(Algorithm::kFciPlus)).differs()) {
      ++fci_diffs;
      std::cerr << f.filename().string() << ": fci and fciplus PAGs differ\n";
    }
  }

  std::cout << "corpus " << a.corpus << ": " << files.size() << " instances\n";
  std::cout << std::left << std::setw(10) << "alg" << std::right << std::setw(14) << "queries" << std::setw(14)
            << "distinct" << std::setw(12) << "mean" << std::setw(12) << "max" << std::setw(12) << "ms"
            << std::setw(12) << "inv_fail" << "\n";
  for (Algorithm alg : algs) {
    const BenchTotals& t = totals[algorithm_name(alg)];
    std::cout << std::left << std::setw(10) << algorithm_name(alg) << std::right << std::setw(14) << t.queries
              << std::setw(14) << t.distinct << std::setw(12) << std::fixed << std::setprecision(1)
              << static_cast<double>(t.queries) / static_cast<double>(t.runs) << std::setw(12) << t.max_queries
              << std::setw(12) << t.ms << std::setw(12) << t.invariant_failures << "\n";
  }
  if (std::find(algs.begin(), algs.end(), Algorithm::kFciPlus) != algs.end())
    std::cout << "instances where fciplus detected a possible D-sep link: " << with_links << "\n";
  if (std::find(algs.begin(), algs.end(), Algorithm::kFci) != algs.end() &&
      std::find(algs.begin(), algs.end(), Algorithm::kFciPlus) != algs.end())
    std::cout << "fci vs fciplus PAG differences: " << fci_diffs << "\n";

  std::size_t failures = fci_diffs;
  for (const auto& [name, t] : totals) failures += t.invariant_failures;
  return failures ? kDiff : kOk;
}

// ---- show

struct ShowArgs {
  std::string graph;
  std::string report;
  std::size_t index = 0;
  bool mag = false;
  std::string out;
};

int cmd_show(const ShowArgs& a) {
  if (a.graph.empty() == a.report.empty()) throw InputError("give exactly one of --graph and --report");
  std::string dot;
  if (!a.graph.empty()) {
    const CausalDag dag = read_dag_file(a.graph);
    const std::string title = fs::path(a.graph).stem().string();
    dot = a.mag ? to_dot(latent_project(dag), title + "_mag") : to_dot(dag, title);
  } else {
    const auto reports = read_reports_file(a.report);
    if (a.index >= reports.size())
      throw InputError("report file holds " + std::to_string(reports.size()) + " runs, asked for index " +
                       std::to_string(a.index));
    const RunReport& r = reports[a.index];
    dot = to_dot(r.pag, r.algorithm + (r.instance.empty() ? "" : " " + r.instance));
  }
  if (a.out.empty())
    std::cout << dot;
  else
    write_text_file(a.out, dot);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal structure search with latent and selection variables"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Draw a random sparse DAG with latent and selection variables");
  g->add_option("--n", gen.cfg.n, "observed variables")->capture_default_str();
  g->add_option("--k", gen.cfg.k, "maximum degree of the projected MAG")->capture_default_str();
  g->add_option("--latents", gen.cfg.latents)->capture_default_str();
  g->add_option("--selection", gen.cfg.selection)->capture_default_str();
  g->add_option("--density", gen.cfg.density, "edge probability per ordered pair")->capture_default_str();
  g->add_option("--seed", gen.cfg.seed)->capture_default_str();
  g->add_option("--gadgets", gen.cfg.dsep_gadgets, "planted D-sep gadgets (two latents each)")->capture_default_str();
  g->add_option("--max-attempts", gen.cfg.max_attempts)->capture_default_str();
  g->add_option("--out", gen.out, "output graph JSON");
  g->add_option("--out-dir", gen.out_dir, "write --count graphs with consecutive seeds here");
  g->add_option("--count", gen.count)->capture_default_str()->check(CLI::PositiveNumber);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run pc, fci or fciplus on a graph (d-separation) or a CSV (Fisher z)");
  r->add_option("--alg", run.alg)->capture_default_str()->check(CLI::IsMember({"pc", "fci", "fciplus"}));
  r->add_option("--graph", run.graph, "graph JSON with latent and selection roles");
  r->add_option("--data", run.data, "CSV with a header row");
  r->add_option("--k", run.k, "degree bound; negative for none")->capture_default_str();
  r->add_option("--alpha", run.alpha)->capture_default_str();
  r->add_flag("--intersect-pdsep", run.intersect_pdsep, "narrow D-sep candidates by Possible-D-SEP first");
  r->add_option("--report", run.report, "append the run report to this JSON-lines file");
  r->add_option("--dot", run.dot, "write the output PAG as DOT");

  std::string cmp_a, cmp_b;
  auto* c = app.add_subcommand("compare", "Diff two report files run by run");
  c->add_option("--a", cmp_a)->required();
  c->add_option("--b", cmp_b)->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run several algorithms over a directory of graphs");
  b->add_option("--corpus", bench.corpus)->required();
  b->add_option("--algs", bench.algs)->capture_default_str();
  b->add_option("--k", bench.k)->capture_default_str();
  b->add_flag("--intersect-pdsep", bench.intersect_pdsep);
  b->add_option("--report", bench.report, "append every run report here");

  ShowArgs show;
  auto* s = app.add_subcommand("show", "Export a graph or a reported PAG as DOT");
  s->add_option("--graph", show.graph);
  s->add_option("--report", show.report);
  s->add_option("--index", show.index, "which run of the report file")->capture_default_str();
  s->add_flag("--mag", show.mag, "show the latent projection instead of the DAG");
  s->add_option("--out", show.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*r) return cmd_run(run);
    if (*c) return cmd_compare(cmp_a, cmp_b);
    if (*b) return cmd_bench(bench);
    if (*s) return cmd_show(show);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kInput;
  } catch (const ModelViolation& e) {
    std::cerr << "model violation: " << e.what() << "\n";
    return kDiff;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiff;
  }
  return kInput;
}

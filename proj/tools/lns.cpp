// Command-line front end: run, explore, derive and regex queries over system files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lns/lns.hpp"

namespace {

enum Exit : int { ok = 0, failure = 1, step_limit = 2, stuck = 3 };

std::optional<lns::MonitorMode> parse_mode(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "exact") return lns::MonitorMode::Exact;
  return lns::MonitorMode::PrefixClosed;
}

lns::Configuration configure(const lns::SystemFile& file, const std::string& mode) {
  lns::Configuration c = file.configuration();
  if (auto m = parse_mode(mode)) c.mode = *m;
  return c;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::size_t> max_steps,
            const std::string& mode, const std::string& monitor, bool json) {
  lns::SystemFile file = lns::load(path);
  lns::RunOptions options;
  options.seed = seed.value_or(file.seed.value_or(0));
  options.max_steps = max_steps.value_or(file.max_steps.value_or(options.max_steps));
  options.monitor_choice = monitor == "random" ? lns::MonitorChoice::Random : lns::MonitorChoice::Lowest;
  lns::RunResult r = lns::run(configure(file, mode), options);

  if (json) {
    nlohmann::ordered_json out;
    out["seed"] = options.seed;
    out["events"] = nlohmann::json::array();
    for (const auto& e : r.events) {
      out["events"].push_back({{"step", e.step}, {"rule", lns::rule_tag(e.event.rule)}, {"detail", e.event.detail}});
    }
    out["stuck"] = nlohmann::json::array();
    for (const auto& s : r.stuck) {
      out["stuck"].push_back({{"kind", lns::stuck_tag(s.kind)}, {"site", s.site}, {"message", s.message}});
    }
    out["halt"] = r.halt == lns::Halt::Quiescent ? "quiescent" : "step-limit";
    out["final"] = r.final.root.str();
    std::cout << out.dump(2) << '\n';
  } else {
    for (const auto& line : r.lines()) std::cout << line << '\n';
    std::cout << "final " << r.final.root << '\n';
  }
  if (!r.stuck.empty()) return stuck;
  return r.halt == lns::Halt::StepLimit ? step_limit : ok;
}

int cmd_explore(const std::string& path, std::size_t depth, std::size_t max_nodes, const std::string& mode,
                const std::string& dot, bool edges) {
  lns::SystemFile file = lns::load(path);
  lns::ExploreOptions options;
  options.max_depth = depth;
  options.max_nodes = max_nodes;
  lns::ExplorationGraph g = lns::explore(configure(file, mode), options);

  std::size_t stuck_nodes = g.stuck.size();
  std::cout << "nodes=" << g.nodes.size() << " edges=" << g.edges.size() << " stuck=" << stuck_nodes;
  if (g.truncated) {
    std::cout << " truncated=";
    bool first = true;
    for (const auto& reason : g.reasons) {
      std::cout << (first ? "" : ",") << reason;
      first = false;
    }
  }
  std::cout << '\n';
  for (const auto& [node, diagnoses] : g.stuck) {
    for (const auto& d : diagnoses) {
      std::cout << "node=" << node << " stuck=" << lns::stuck_tag(d.kind) << " detail=" << d.message << " at "
                << d.site << '\n';
    }
  }
  if (edges) std::cout << g.edge_list();
  if (!dot.empty()) {
    std::ofstream out(dot);
    if (!out) throw lns::Error("cannot write '" + dot + "'");
    out << g.dot();
  }
  return ok;
}

const lns::TssDef& pick_tss(const lns::SystemFile& file, const std::string& name) {
  if (name.empty()) {
    if (file.tss.empty()) throw lns::Error("the file defines no TSS");
    return file.tss.back();
  }
  const lns::TssDef* def = file.find_tss(name);
  if (def == nullptr) throw lns::Error("no TSS named '" + name + "'");
  return *def;
}

int cmd_derive(const std::string& path, const std::string& tss_name, const std::string& term_text,
               std::size_t steps) {
  lns::SystemFile file = lns::load(path);
  const lns::TssDef& def = pick_tss(file, tss_name);
  lns::Term start = lns::parse_term(term_text, def.value->signature());
  lns::Deriver deriver(*def.value);

  std::vector<lns::Term> frontier{start};
  std::set<lns::Term> seen{start};
  std::size_t count = 0;
  for (std::size_t level = 1; level <= steps && !frontier.empty(); ++level) {
    std::vector<lns::Term> next;
    for (const auto& t : frontier) {
      for (const auto& tr : deriver.derive_all(t)) {
        std::cout << "step=" << level << ' ' << t << " -" << tr.label << "-> " << tr.target << '\n';
        ++count;
        if (seen.insert(tr.target).second) next.push_back(tr.target);
      }
    }
    frontier = std::move(next);
  }
  std::cout << "transitions=" << count << '\n';
  return ok;
}

lns::Trace parse_trace(const std::string& text, const std::optional<lns::SystemFile>& file) {
  lns::Regex r = file ? lns::parse_regex(text, *file) : lns::parse_regex(text);
  auto t = lns::Trace::from_regex(r);
  if (!t) throw lns::Error("'" + text + "' is not a trace (only '.' and labels are allowed)");
  return *t;
}

int cmd_regex(const std::string& op, const std::string& left, const std::string& right, const std::string& path) {
  std::optional<lns::SystemFile> file;
  if (!path.empty()) file = lns::load(path);
  auto regex = [&](const std::string& text) { return file ? lns::parse_regex(text, *file) : lns::parse_regex(text); };

  if (op == "include") {
    lns::InclusionResult r = lns::include(regex(left), regex(right));
    std::cout << (r.included ? "true" : "false");
    if (r.witness) std::cout << " witness=" << r.witness->str();
    std::cout << '\n';
    return ok;
  }
  lns::Trace trace = parse_trace(left, file);
  bool result = op == "check" ? lns::member(trace, regex(right)) : lns::prefix_feasible(trace, regex(right));
  std::cout << (result ? "true" : "false") << '\n';
  return ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreter and explorer for processes that exchange languages and monitors"};
  app.require_subcommand(1);

  std::string path;
  std::string mode;
  auto mode_check = CLI::IsMember({"exact", "prefix"});

  auto* run = app.add_subcommand("run", "Run the entry process with a seeded scheduler");
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_steps;
  std::string monitor = "lowest";
  bool json = false;
  run->add_option("file", path, "System file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Scheduler seed (default: file option or 0)");
  run->add_option("--max-steps", max_steps, "Step limit (default: file option or 1000)");
  run->add_option("--mode", mode, "Monitor mode: exact or prefix")->check(mode_check);
  run->add_option("--monitor", monitor, "Failing-monitor choice: lowest or random")
      ->check(CLI::IsMember({"lowest", "random"}));
  run->add_flag("--json", json, "Print the log as JSON");

  auto* explore = app.add_subcommand("explore", "Explore every interleaving breadth-first");
  std::size_t depth = 30;
  std::size_t max_nodes = 10000;
  std::string dot;
  bool edges = false;
  explore->add_option("file", path, "System file")->required()->check(CLI::ExistingFile);
  explore->add_option("--depth", depth, "Depth bound")->capture_default_str();
  explore->add_option("--max-nodes", max_nodes, "Node bound")->capture_default_str();
  explore->add_option("--mode", mode, "Monitor mode: exact or prefix")->check(mode_check);
  explore->add_option("--dot", dot, "Write the graph in DOT format to this file");
  explore->add_flag("--edges", edges, "Print the edge list");

  auto* derive = app.add_subcommand("derive", "List the transitions of a term under a TSS");
  std::string tss_name;
  std::string term;
  std::size_t steps = 1;
  derive->add_option("file", path, "System file")->required()->check(CLI::ExistingFile);
  derive->add_option("--tss", tss_name, "TSS definition (default: the last one)");
  derive->add_option("--term", term, "Ground term")->required();
  derive->add_option("--steps", steps, "Number of transition levels")->capture_default_str();

  auto* regex = app.add_subcommand("regex", "Membership, inclusion and prefix queries");
  std::string op;
  std::string left;
  std::string right;
  std::string regex_file;
  regex->add_option("op", op, "check | include | prefix")->required()->check(CLI::IsMember({"check", "include", "prefix"}));
  regex->add_option("left", left, "Trace (check, prefix) or regex (include)")->required();
  regex->add_option("right", right, "Regex")->required();
  regex->add_option("--file", regex_file, "System file whose regex definitions may be named")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(path, seed, max_steps, mode, monitor, json);
    if (*explore) return cmd_explore(path, depth, max_nodes, mode, dot, edges);
    if (*derive) return cmd_derive(path, tss_name, term, steps);
    return cmd_regex(op, left, right, regex_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}

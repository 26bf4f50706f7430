#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "lns/lns.hpp"

namespace support {

inline std::string corpus(const std::string& file) { return std::string(LNS_CORPUS_DIR) + "/" + file; }

inline lns::SystemFile corpus_file(const std::string& file) { return lns::load(corpus(file)); }

/// Parses `defs` followed by `proc Main = <body>; entry Main;`.
inline lns::SystemFile system(const std::string& defs, const std::string& body) {
  return lns::parse_system(defs + "\nproc Main = " + body + ";\nentry Main;\n");
}

inline lns::Process process(const std::string& defs, const std::string& body) {
  return system(defs, body).entry_process();
}

inline lns::Process canon(const std::string& defs, const std::string& body) {
  return lns::canonicalize(process(defs, body));
}

inline lns::Configuration config(const std::string& defs, const std::string& body,
                                 lns::MonitorMode mode = lns::MonitorMode::Exact) {
  lns::Configuration c = system(defs, body).configuration();
  c.mode = mode;
  return c;
}

inline bool has_rule(const lns::RunResult& r, lns::Rule rule, const std::string& detail_part = "") {
  return std::any_of(r.events.begin(), r.events.end(), [&](const lns::LogEntry& e) {
    return e.event.rule == rule && e.event.detail.find(detail_part) != std::string::npos;
  });
}

/// Index of the first event matching, or events.size().
inline std::size_t first_index(const lns::RunResult& r, lns::Rule rule, const std::string& detail_part = "") {
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    if (r.events[i].event.rule == rule && r.events[i].event.detail.find(detail_part) != std::string::npos) return i;
  }
  return r.events.size();
}

inline const char* const partial_ccs = R"(
tss partialCCS {
  labels a, co_a, b, co_b, tau;
  ops nil/0, a/1, co_a/1, b/1, co_b/1, par/2;
  vars p, p1, q, q1;
  rule [act] for act in a, co_a, b, co_b: act(p) -act-> p;
  rule [par_l] for act in a, co_a, b, co_b: p -act-> p1 ==> par(p, q) -act-> par(p1, q);
  rule [par_r] for act in a, co_a, b, co_b: q -act-> q1 ==> par(p, q) -act-> par(p, q1);
  rule [tau_l]: p -tau-> p1 ==> par(p, q) -tau-> par(p1, q);
  rule [tau_r]: q -tau-> q1 ==> par(p, q) -tau-> par(p, q1);
  rule [sync] for (l, m) in (a, co_a), (b, co_b):
    p -l-> p1, q -m-> q1 ==> par(p, q) -tau-> par(p1, q1);
  rule [sync_co] for (l, m) in (co_a, a), (co_b, b):
    p -l-> p1, q -m-> q1 ==> par(p, q) -tau-> par(p1, q1);
}
)";

} // namespace support

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "lns/process.hpp"

namespace lns {

namespace detail {

/// Unit laws and dead restrictions: drops 0 from | and +, collapses unary
/// compositions, removes restrictions whose name is unused (covers nu x.0).
inline Process simplify(const Process& p) {
  switch (p.kind()) {
  case Process::Kind::Nil: return p;
  case Process::Kind::Par:
  case Process::Kind::Sum: {
    std::vector<Process> kept;
    for (const auto& c : p.children()) {
      Process s = simplify(c);
      if (!s.is_nil()) kept.push_back(std::move(s));
    }
    if (kept.empty()) return Process::nil();
    if (kept.size() == 1) return kept.front();
    return p.kind() == Process::Kind::Par ? Process::par(std::move(kept)) : Process::sum(std::move(kept));
  }
  case Process::Kind::Restrict: {
    Process body = simplify(p.continuation());
    if (!occurs_free(p.bound(), body)) return body;
    return Process::restrict(p.bound(), std::move(body));
  }
  default: {
    std::vector<Process> children;
    for (const auto& c : p.children()) children.push_back(simplify(c));
    return p.with(p.exprs(), std::move(children));
  }
  }
}

class Canonicalizer {
public:
  /// Gives every binder a unique temporary name.
  Process freshen(const Process& p, const std::map<Name, Name>& env) {
    std::vector<Expr> exprs;
    for (const auto& e : p.exprs()) exprs.push_back(e.rename(env));
    if (p.kind() == Process::Kind::Input || p.kind() == Process::Kind::Restrict) {
      Name t = Name::temp(p.bound().stem(), temps_++);
      std::map<Name, Name> inner = env;
      inner[p.bound()] = t;
      return p.with(t, std::move(exprs), {freshen(p.continuation(), inner)});
    }
    std::vector<Process> children;
    for (const auto& c : p.children()) children.push_back(freshen(c, env));
    return p.with(std::move(exprs), std::move(children));
  }

  /// Normal form of a process whose binders are unique temporaries and whose
  /// outer binders are already levels below `depth`.
  Process level(const Process& p, std::uint64_t depth) {
    std::vector<Name> binders;
    std::vector<Process> atoms;
    collect(p, binders, atoms);
    absorb(binders, atoms, depth);

    std::vector<Name> used;
    for (const auto& b : binders) {
      for (const auto& a : atoms) {
        if (occurs_free(b, a)) {
          used.push_back(b);
          break;
        }
      }
    }
    const std::uint64_t total = used.size();
    auto groups = group(used, atoms);

    struct Form {
      std::vector<Name> binders; // level names, in index order
      std::vector<Process> atoms;
    };
    std::vector<Form> forms;
    for (const auto& [ys, members] : groups) {
      Form f;
      f.atoms = canon_group(ys, members, depth, depth + total, f.binders);
      forms.push_back(std::move(f));
    }
    std::sort(forms.begin(), forms.end(), [](const Form& a, const Form& b) {
      if (a.binders.size() != b.binders.size()) return a.binders.size() < b.binders.size();
      return a.atoms < b.atoms;
    });

    std::vector<Name> chain;
    std::vector<Process> all;
    for (const auto& f : forms) {
      std::map<Name, Name> shift;
      for (std::size_t j = 0; j < f.binders.size(); ++j) {
        Name moved = Name::level(f.binders[j].stem(), depth + chain.size() + j);
        shift[f.binders[j]] = moved;
      }
      for (std::size_t j = 0; j < f.binders.size(); ++j) chain.push_back(shift[f.binders[j]]);
      for (const auto& a : f.atoms) all.push_back(rename_free(a, shift));
    }
    Process out = all.empty() ? Process::nil() : all.size() == 1 ? all.front() : Process::par(std::move(all));
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) out = Process::restrict(*it, out);
    return out;
  }

private:
  static void collect(const Process& p, std::vector<Name>& binders, std::vector<Process>& atoms) {
    switch (p.kind()) {
    case Process::Kind::Nil: return;
    case Process::Kind::Par:
      for (const auto& c : p.children()) collect(c, binders, atoms);
      return;
    case Process::Kind::Restrict:
      binders.push_back(p.bound());
      collect(p.continuation(), binders, atoms);
      return;
    default: atoms.push_back(p);
    }
  }

  /// Connected components of atoms, linked by shared binders.
  static std::vector<std::pair<std::vector<Name>, std::vector<Process>>>
  group(const std::vector<Name>& binders, const std::vector<Process>& atoms) {
    std::vector<std::size_t> parent(atoms.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<std::vector<std::size_t>> users(binders.size());
    for (std::size_t b = 0; b < binders.size(); ++b) {
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (occurs_free(binders[b], atoms[a])) users[b].push_back(a);
      }
      for (std::size_t i = 1; i < users[b].size(); ++i) parent[find(users[b][i])] = find(users[b][0]);
    }
    std::map<std::size_t, std::pair<std::vector<Name>, std::vector<Process>>> by_root;
    for (std::size_t a = 0; a < atoms.size(); ++a) by_root[find(a)].second.push_back(atoms[a]);
    for (std::size_t b = 0; b < binders.size(); ++b) {
      if (!users[b].empty()) by_root[find(users[b][0])].first.push_back(binders[b]);
    }
    std::vector<std::pair<std::vector<Name>, std::vector<Process>>> out;
    for (auto& [_, g] : by_root) out.push_back(std::move(g));
    return out;
  }

  /// Alpha-canonical closed form of `new ys.(atoms)` used to compare groups.
  Process closed_form(const std::vector<Name>& ys, const std::vector<Process>& atoms, std::uint64_t depth) {
    Process p = atoms.size() == 1 ? atoms.front() : Process::par(atoms);
    for (auto it = ys.rbegin(); it != ys.rend(); ++it) p = Process::restrict(*it, p);
    return level(freshen(p, {}), depth);
  }

  /// Replication absorption: a complete copy of a bang body sitting next to
  /// the bang (after scope extrusion) is dropped, so P | !P and !P coincide.
  void absorb(std::vector<Name>& binders, std::vector<Process>& atoms, std::uint64_t depth) {
    bool again = true;
    while (again) {
      again = false;
      std::vector<std::size_t> bangs;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].kind() == Process::Kind::Bang) bangs.push_back(i);
      }
      if (bangs.empty() || atoms.size() < 2) return;

      std::vector<Name> priv;
      for (const auto& b : binders) {
        bool in_bang = false;
        for (auto i : bangs) in_bang = in_bang || occurs_free(b, atoms[i]);
        if (!in_bang) priv.push_back(b);
      }
      std::vector<Process> plain;
      std::vector<std::size_t> plain_index;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].kind() != Process::Kind::Bang) {
          plain.push_back(atoms[i]);
          plain_index.push_back(i);
        }
      }
      if (plain.empty()) return;
      auto groups = group(priv, plain);
      std::vector<Process> group_forms;
      for (const auto& [ys, members] : groups) group_forms.push_back(closed_form(ys, members, depth));

      for (auto bi : bangs) {
        Process body = level(freshen(atoms[bi].continuation(), {}), depth);
        std::vector<Name> body_binders;
        std::vector<Process> body_atoms;
        collect(body, body_binders, body_atoms);
        if (body_atoms.empty()) continue;
        std::vector<bool> taken(groups.size(), false);
        bool complete = true;
        for (const auto& [zs, members] : group(body_binders, body_atoms)) {
          Process want = closed_form(zs, members, depth);
          bool found = false;
          for (std::size_t g = 0; g < groups.size() && !found; ++g) {
            if (!taken[g] && group_forms[g] == want) taken[g] = found = true;
          }
          if (!found) {
            complete = false;
            break;
          }
        }
        if (!complete) continue;
        std::set<Process> drop_atoms;
        std::set<Name> drop_binders;
        std::vector<bool> drop(atoms.size(), false);
        for (std::size_t g = 0; g < groups.size(); ++g) {
          if (!taken[g]) continue;
          drop_binders.insert(groups[g].first.begin(), groups[g].first.end());
        }
        // Mark exactly the member atoms of the taken groups.
        for (std::size_t g = 0; g < groups.size(); ++g) {
          if (!taken[g]) continue;
          for (const auto& m : groups[g].second) {
            for (std::size_t k = 0; k < plain.size(); ++k) {
              if (!drop[plain_index[k]] && plain[k] == m) {
                drop[plain_index[k]] = true;
                break;
              }
            }
          }
        }
        std::vector<Process> rest;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          if (!drop[i]) rest.push_back(atoms[i]);
        }
        atoms = std::move(rest);
        binders.erase(std::remove_if(binders.begin(), binders.end(),
                                     [&](const Name& n) { return drop_binders.count(n) != 0; }),
                      binders.end());
        again = true;
        break;
      }
    }
  }

  /// Least (atoms, binder order) over binder permutations. Binders become
  /// levels depth, depth+1, ...; atoms are normalized at `inner`.
  std::vector<Process> canon_group(const std::vector<Name>& ys, const std::vector<Process>& members,
                                   std::uint64_t depth, std::uint64_t inner, std::vector<Name>& order) {
    auto attempt = [&](const std::vector<std::size_t>& perm, std::vector<Name>& names) {
      std::map<Name, Name> map;
      names.clear();
      for (std::size_t i = 0; i < perm.size(); ++i) {
        Name target = Name::level(ys[perm[i]].stem(), depth + i);
        map[ys[perm[i]]] = target;
        names.push_back(target);
      }
      std::vector<Process> out;
      for (const auto& m : members) out.push_back(atom(rename_free(m, map), inner));
      std::sort(out.begin(), out.end());
      return out;
    };

    std::vector<std::size_t> perm(ys.size());
    std::iota(perm.begin(), perm.end(), 0);
    if (ys.size() > max_permuted_binders) perm = heuristic_order(ys, members, depth, inner);

    std::vector<Name> names;
    std::vector<Process> best = attempt(perm, order);
    if (ys.size() <= max_permuted_binders) {
      while (std::next_permutation(perm.begin(), perm.end())) {
        auto candidate = attempt(perm, names);
        if (candidate < best) {
          best = std::move(candidate);
          order = names;
        }
      }
    }
    return best;
  }

  /// Binder order by first occurrence in atoms sorted with binders blinded.
  std::vector<std::size_t> heuristic_order(const std::vector<Name>& ys, const std::vector<Process>& members,
                                           std::uint64_t depth, std::uint64_t inner) {
    std::map<Name, Name> blind;
    for (const auto& y : ys) blind[y] = Name::level(y.stem(), depth);
    std::vector<std::pair<Process, std::size_t>> keyed;
    for (std::size_t i = 0; i < members.size(); ++i) {
      keyed.emplace_back(atom(rename_free(members[i], blind), inner), i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> order;
    std::set<std::size_t> seen;
    for (const auto& [_, i] : keyed) {
      std::set<Name> fn = free_names(members[i]);
      for (std::size_t k = 0; k < ys.size(); ++k) {
        if (fn.count(ys[k]) && seen.insert(k).second) order.push_back(k);
      }
    }
    for (std::size_t k = 0; k < ys.size(); ++k) {
      if (seen.insert(k).second) order.push_back(k);
    }
    return order;
  }

  /// Normal form of a non-parallel, non-restriction process.
  Process atom(const Process& p, std::uint64_t depth) {
    switch (p.kind()) {
    case Process::Kind::Input: {
      Name y = Name::level(p.bound().stem(), depth);
      Process body = rename_free(p.continuation(), {{p.bound(), y}});
      return p.with(y, p.exprs(), {level(body, depth + 1)});
    }
    case Process::Kind::Sum: {
      std::vector<Process> summands;
      for (const auto& c : p.children()) {
        Process s = level(c, depth);
        if (s.kind() == Process::Kind::Sum) {
          summands.insert(summands.end(), s.children().begin(), s.children().end());
        } else {
          summands.push_back(std::move(s));
        }
      }
      std::sort(summands.begin(), summands.end());
      return Process::sum(std::move(summands));
    }
    default: {
      std::vector<Process> children;
      for (const auto& c : p.children()) children.push_back(level(c, depth));
      return p.with(p.exprs(), std::move(children));
    }
    }
  }

  static constexpr std::size_t max_permuted_binders = 6;
  std::uint64_t temps_ = 0;
};

} // namespace detail

/// Normal form modulo structural congruence and alpha conversion: parallel
/// and sum operands flattened and sorted, 0 units dropped, restrictions
/// hoisted to the outermost legal scope and renamed by binding depth, unused
/// restrictions removed, and P | !P folded into !P. Bangs stay folded.
inline Process canonicalize(const Process& p) {
  detail::Canonicalizer c;
  return c.level(c.freshen(detail::simplify(p), {}), 0);
}

inline Configuration canonicalize(const Configuration& c) {
  return Configuration{canonicalize(c.root), c.fresh, c.mode};
}

} // namespace lns

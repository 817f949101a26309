/* contraction.hpp -- nucleus closure, contraction-ratio estimation, and the
 * algebraic search for Levy-type obstructions g.w = w.g */

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "selfsim/biset.hpp"
#include "selfsim/common.hpp"
#include "selfsim/group.hpp"

namespace selfsim {

struct Budget {
  std::int64_t max_nucleus_size = 500;
  std::int64_t max_element_length = 50;
  int max_depth = 30;

  void check() const {
    if (max_nucleus_size <= 0 || max_element_length <= 0 || max_depth <= 0) {
      throw ParseError("budgets must be strictly positive");
    }
  }
};

enum class ContractionStatus { Contracting, BudgetExceeded, ObstructionFound };

inline std::string to_string(ContractionStatus s) {
  switch (s) {
    case ContractionStatus::Contracting: return "contracting";
    case ContractionStatus::BudgetExceeded: return "budget_exceeded";
    case ContractionStatus::ObstructionFound: return "obstruction_found";
  }
  return "?";
}

/// Replayable certificate of the identity g.w = w.g (ExactFixed), or of a
/// cyclic restriction chain g_i.x_i = x_i.g_{i+1} closing up (RestrictionCycle).
struct LevyWitness {
  enum class Kind { ExactFixed, RestrictionCycle };
  Kind kind = Kind::ExactFixed;
  GroupElement element;               // ExactFixed: the fixed element
  std::vector<int> word;              // ExactFixed: the fixed word
  std::vector<GroupElement> cycle;    // RestrictionCycle: elements, period p
  std::vector<int> cycle_letters;     // RestrictionCycle: letters, one per element
};

inline bool replay_witness(const BisetMachine& m, const LevyWitness& w) {
  if (w.kind == LevyWitness::Kind::ExactFixed) {
    if (w.element.is_identity() || w.word.empty()) return false;
    WordAction a = m.act_word(w.element, w.word);
    return a.word == w.word && a.restriction == w.element;
  }
  if (w.cycle.empty() || w.cycle.size() != w.cycle_letters.size()) return false;
  for (std::size_t i = 0; i < w.cycle.size(); ++i) {
    if (w.cycle[i].is_identity()) return false;
    LetterAction a = m.act_letter(w.cycle[i], w.cycle_letters[i]);
    const GroupElement& next = w.cycle[(i + 1) % w.cycle.size()];
    if (a.letter != w.cycle_letters[i] || !(a.restriction == next)) return false;
  }
  return true;
}

struct ContractionStats {
  int iterations = 0;
  std::int64_t peak_size = 0;
  int certificate_depth = 0;
  std::uint64_t explored = 0;
};

struct ContractionReport {
  ContractionStatus status = ContractionStatus::BudgetExceeded;
  std::vector<GroupElement> nucleus;  // shortlex order, when contracting
  std::optional<LevyWitness> witness;
  std::string note;
  ContractionStats stats;
};

namespace detail {

/// Per-element cache of full act_letter rows. The memo map is bounded; rows
/// computed past the cap are kept alive (references handed out stay valid
/// for the cache's lifetime) but are not found again.
class ActionCache {
 public:
  explicit ActionCache(const BisetMachine& m, std::size_t cap = (1u << 18)) : machine_(m), cap_(cap) {}

  const std::vector<LetterAction>& row(const GroupElement& g) {
    auto it = map_.find(g);
    if (it != map_.end()) return it->second;
    std::vector<LetterAction> r;
    r.reserve(static_cast<std::size_t>(machine_.degree()));
    for (int x = 0; x < machine_.degree(); ++x) r.push_back(machine_.act_letter(g, x));
    if (map_.size() >= cap_) {
      overflow_.push_back(std::move(r));
      return overflow_.back();
    }
    return map_.emplace(g, std::move(r)).first->second;
  }

 private:
  const BisetMachine& machine_;
  std::size_t cap_;
  std::unordered_map<GroupElement, std::vector<LetterAction>, ElementHash> map_;
  std::deque<std::vector<LetterAction>> overflow_;
};

using ElementSet = std::set<GroupElement, ShortLexLess>;

/// Least letter fixed by g whose restriction is g itself, if any.
inline std::optional<int> self_fixed_letter(ActionCache& cache, const GroupElement& g) {
  if (g.is_identity()) return std::nullopt;
  const auto& row = cache.row(g);
  for (int x = 0; x < static_cast<int>(row.size()); ++x) {
    if (row[static_cast<std::size_t>(x)].letter == x && row[static_cast<std::size_t>(x)].restriction == g) {
      return x;
    }
  }
  return std::nullopt;
}

/// Strongly connected components of the restriction graph over `nodes`;
/// returns the recurrent members (on a cycle) in deterministic order.
inline ElementSet recurrent_members(ActionCache& cache, const ElementSet& nodes) {
  std::vector<GroupElement> order(nodes.begin(), nodes.end());
  std::map<GroupElement, int> id;
  for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = static_cast<int>(i);

  const int n = static_cast<int>(order.size());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  std::vector<bool> self_loop(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    for (const auto& act : cache.row(order[static_cast<std::size_t>(i)])) {
      auto it = id.find(act.restriction);
      if (it == id.end()) continue;
      adj[static_cast<std::size_t>(i)].push_back(it->second);
      if (it->second == i) self_loop[static_cast<std::size_t>(i)] = true;
    }
  }

  // Iterative Tarjan.
  std::vector<int> idx(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0), comp(static_cast<std::size_t>(n), -1);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::size_t> comp_size;
  int counter = 0;
  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      auto& edges = adj[static_cast<std::size_t>(f.v)];
      if (f.child < edges.size()) {
        int w = edges[f.child++];
        if (idx[static_cast<std::size_t>(w)] == -1) {
          idx[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = true;
          frames.push_back({w, 0});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(f.v)] = std::min(low[static_cast<std::size_t>(f.v)], idx[static_cast<std::size_t>(w)]);
        }
      } else {
        if (low[static_cast<std::size_t>(f.v)] == idx[static_cast<std::size_t>(f.v)]) {
          int c = static_cast<int>(comp_size.size());
          std::size_t members = 0;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = false;
            comp[static_cast<std::size_t>(w)] = c;
            ++members;
            if (w == f.v) break;
          }
          comp_size.push_back(members);
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          int p = frames.back().v;
          low[static_cast<std::size_t>(p)] = std::min(low[static_cast<std::size_t>(p)], low[static_cast<std::size_t>(v)]);
        }
      }
    }
  }

  ElementSet recurrent;
  for (int i = 0; i < n; ++i) {
    int c = comp[static_cast<std::size_t>(i)];
    if (comp_size[static_cast<std::size_t>(c)] > 1 || self_loop[static_cast<std::size_t>(i)]) {
      recurrent.insert(order[static_cast<std::size_t>(i)]);
    }
  }
  return recurrent;
}

}  // namespace detail

/// Depth-m absorption check: every pairwise product of nucleus members has
/// all depth-<=m restrictions inside the nucleus (branches are pruned as soon
/// as they enter it). Depth 1 is plain closure under pair-product restrictions.
inline bool verify_nucleus(const BisetMachine& m, const std::vector<GroupElement>& nucleus, int depth) {
  detail::ActionCache cache(m);
  detail::ElementSet in(nucleus.begin(), nucleus.end());
  detail::ElementSet frontier;
  for (const auto& g : nucleus) {
    const auto& grow = cache.row(g);
    for (const auto& h : nucleus) {
      const auto& hrow = cache.row(h);
      for (int x = 0; x < m.degree(); ++x) {
        const auto& hx = hrow[static_cast<std::size_t>(x)];
        GroupElement r = multiply(grow[static_cast<std::size_t>(hx.letter)].restriction, hx.restriction);
        if (!in.count(r)) frontier.insert(std::move(r));
      }
    }
  }
  for (int level = 1; level < depth && !frontier.empty(); ++level) {
    detail::ElementSet next;
    for (const auto& f : frontier) {
      for (const auto& act : cache.row(f)) {
        if (!in.count(act.restriction)) next.insert(act.restriction);
      }
    }
    frontier = std::move(next);
  }
  return frontier.empty();
}

/// Nucleus closure. Maintains a finite candidate set that contains the
/// generators, their inverses and the identity and is closed under
/// single-letter restrictions and inversion. Contraction is certified when
/// every pairwise product restricts back into the candidate within some
/// uniform depth; transient elements are pruned to the recurrent part
/// between rounds so that the candidate stays close to the true nucleus.
inline ContractionReport nucleus(const BisetMachine& m, const Budget& budget = {}) {
  budget.check();
  ContractionReport rep;
  detail::ActionCache cache(m);
  detail::ElementSet W;
  std::optional<LevyWitness> witness;
  const std::uint64_t node_cap =
      std::max<std::uint64_t>(1u << 20, static_cast<std::uint64_t>(budget.max_nucleus_size) *
                                            static_cast<std::uint64_t>(m.degree()) *
                                            static_cast<std::uint64_t>(budget.max_depth) * 8u);

  // Adds an element together with its inverse and closes under single-letter
  // restrictions. Returns false when a budget limit is hit.
  auto close_into = [&](detail::ElementSet& target, const GroupElement& seed, bool check_obstruction) -> bool {
    std::deque<GroupElement> queue{seed, invert(seed)};
    while (!queue.empty()) {
      GroupElement e = std::move(queue.front());
      queue.pop_front();
      if (word_length(e) > budget.max_element_length) {
        rep.note = "inconclusive: element length budget exceeded during closure";
        return false;
      }
      if (!target.insert(e).second) continue;
      if (static_cast<std::int64_t>(target.size()) > budget.max_nucleus_size) {
        rep.note = "inconclusive: nucleus size budget exceeded";
        return false;
      }
      if (check_obstruction && !witness) {
        if (auto x = detail::self_fixed_letter(cache, e)) {
          witness = LevyWitness{LevyWitness::Kind::ExactFixed, e, {*x}, {}, {}};
        }
      }
      rep.stats.explored += static_cast<std::uint64_t>(m.degree());
      for (const auto& act : cache.row(e)) {
        if (!target.count(act.restriction)) queue.push_back(act.restriction);
      }
      queue.push_back(invert(e));
    }
    return true;
  };

  auto finish_budget = [&]() {
    rep.status = ContractionStatus::BudgetExceeded;
    if (rep.note.empty()) rep.note = "inconclusive: budget exhausted before stabilization";
    return rep;
  };
  auto finish_obstruction = [&]() {
    if (!replay_witness(m, *witness)) throw Error("internal: obstruction witness failed to replay");
    rep.status = ContractionStatus::ObstructionFound;
    rep.witness = witness;
    rep.note = "left action admits g.w = w.g with g nontrivial";
    return rep;
  };

  // Seed: identity, generators, inverses, and all their iterated restrictions.
  if (!close_into(W, m.model().identity(), true)) return finish_budget();
  for (int g = 0; g < m.model().rank(); ++g) {
    if (!close_into(W, m.model().generator(g), true)) return finish_budget();
    if (witness) return finish_obstruction();
  }
  rep.stats.peak_size = static_cast<std::int64_t>(W.size());

  for (int iter = 1; iter <= budget.max_depth; ++iter) {
    rep.stats.iterations = iter;

    // Level-1 restrictions of all pairwise products, via the cocycle
    // (g h)|_x = g|_{h.x} * h|_x on cached rows.
    detail::ElementSet frontier;
    bool too_long = false;
    for (const auto& g : W) {
      const auto& grow = cache.row(g);
      for (const auto& h : W) {
        const auto& hrow = cache.row(h);
        for (int x = 0; x < m.degree(); ++x) {
          const auto& hx = hrow[static_cast<std::size_t>(x)];
          GroupElement r = multiply(grow[static_cast<std::size_t>(hx.letter)].restriction, hx.restriction);
          ++rep.stats.explored;
          if (!W.count(r)) {
            if (word_length(r) > budget.max_element_length) too_long = true;
            frontier.insert(std::move(r));
          }
        }
      }
    }

    if (frontier.empty()) {
      rep.status = ContractionStatus::Contracting;
      rep.stats.certificate_depth = 1;
      rep.nucleus.assign(W.begin(), W.end());
      if (!verify_nucleus(m, rep.nucleus, 1)) throw Error("internal: nucleus closure verification failed");
      return rep;
    }

    // Try to absorb the frontier at deeper levels before growing the set.
    {
      detail::ElementSet level = frontier;
      int depth = 1;
      bool aborted = too_long;
      while (!level.empty() && depth < budget.max_depth && !aborted) {
        detail::ElementSet next;
        for (const auto& f : level) {
          if (witness) break;
          if (auto x = detail::self_fixed_letter(cache, f)) {
            witness = LevyWitness{LevyWitness::Kind::ExactFixed, f, {*x}, {}, {}};
            break;
          }
          for (const auto& act : cache.row(f)) {
            ++rep.stats.explored;
            if (rep.stats.explored > node_cap) {
              aborted = true;
              break;
            }
            if (word_length(act.restriction) > budget.max_element_length) {
              aborted = true;
              break;
            }
            if (!W.count(act.restriction)) next.insert(act.restriction);
          }
          if (aborted) break;
        }
        if (witness) return finish_obstruction();
        level = std::move(next);
        ++depth;
      }
      if (level.empty() && !aborted) {
        rep.status = ContractionStatus::Contracting;
        rep.stats.certificate_depth = depth;
        rep.nucleus.assign(W.begin(), W.end());
        if (!verify_nucleus(m, rep.nucleus, depth)) throw Error("internal: nucleus absorption verification failed");
        return rep;
      }
    }

    // Grow by the level-1 frontier, then prune to the recurrent part plus
    // the seed set, keeping the candidate restriction- and inverse-closed.
    detail::ElementSet grown = W;
    for (const auto& f : frontier) {
      if (auto x = detail::self_fixed_letter(cache, f)) {
        witness = LevyWitness{LevyWitness::Kind::ExactFixed, f, {*x}, {}, {}};
        return finish_obstruction();
      }
      if (!close_into(grown, f, true)) return finish_budget();
      if (witness) return finish_obstruction();
    }
    rep.stats.peak_size = std::max(rep.stats.peak_size, static_cast<std::int64_t>(grown.size()));

    detail::ElementSet keep = detail::recurrent_members(cache, grown);
    detail::ElementSet pruned;
    bool ok = close_into(pruned, m.model().identity(), false);
    for (int g = 0; ok && g < m.model().rank(); ++g) ok = close_into(pruned, m.model().generator(g), false);
    for (const auto& e : keep) {
      if (!ok) break;
      ok = close_into(pruned, e, false);
    }
    if (!ok) return finish_budget();

    if (pruned == W) return finish_budget();  // no progress and not certifiable
    W = std::move(pruned);
  }
  return finish_budget();
}

/// Orbit of iterated restrictions along self-fixed letters.
struct RestrictionOrbit {
  enum class Outcome { Cycle, DeadEnd, DepthExhausted };
  std::vector<GroupElement> elements;  // visited elements, orbit order
  std::vector<int> letters;            // chosen fixed letter per step (one fewer than elements on dead end)
  Outcome outcome = Outcome::DeadEnd;
  int cycle_start = -1;
  bool trivial = false;
};

inline RestrictionOrbit restriction_cycle(const BisetMachine& m, const GroupElement& g, int depth) {
  detail::ActionCache cache(m);
  RestrictionOrbit orbit;
  orbit.trivial = g.is_identity();
  GroupElement cur = g;
  for (int step = 0; step < depth; ++step) {
    for (std::size_t i = 0; i < orbit.elements.size(); ++i) {
      if (orbit.elements[i] == cur) {
        orbit.outcome = RestrictionOrbit::Outcome::Cycle;
        orbit.cycle_start = static_cast<int>(i);
        return orbit;
      }
    }
    orbit.elements.push_back(cur);
    const auto& row = cache.row(cur);
    int fixed = -1;
    for (int x = 0; x < static_cast<int>(row.size()); ++x) {
      if (row[static_cast<std::size_t>(x)].letter == x) {
        fixed = x;
        break;
      }
    }
    if (fixed < 0) {
      orbit.outcome = RestrictionOrbit::Outcome::DeadEnd;
      return orbit;
    }
    orbit.letters.push_back(fixed);
    cur = row[static_cast<std::size_t>(fixed)].restriction;
  }
  // One more membership check so a cycle closing exactly at the depth limit is reported.
  for (std::size_t i = 0; i < orbit.elements.size(); ++i) {
    if (orbit.elements[i] == cur) {
      orbit.outcome = RestrictionOrbit::Outcome::Cycle;
      orbit.cycle_start = static_cast<int>(i);
      return orbit;
    }
  }
  orbit.elements.push_back(cur);
  orbit.outcome = RestrictionOrbit::Outcome::DepthExhausted;
  return orbit;
}

namespace detail {

/// Enumerates freely reduced words of each length in [min_len, max_len],
/// shortlex order; stops early when fn returns false.
inline void for_each_reduced_word(const GroupModel& model, std::int64_t min_len, std::int64_t max_len,
                                  const std::function<bool(const GroupElement&)>& fn) {
  const int r = model.rank();
  std::vector<std::int64_t> letters;
  // Letter order within a position: generator 1, its inverse, generator 2, ...
  std::vector<std::int64_t> symbols;
  for (int i = 1; i <= r; ++i) {
    symbols.push_back(i);
    symbols.push_back(-i);
  }
  bool stop = false;
  std::function<void(std::int64_t)> rec = [&](std::int64_t target) {
    if (stop) return;
    if (static_cast<std::int64_t>(letters.size()) == target) {
      GroupElement g{GroupKind::Free, r, letters};
      if (!fn(g)) stop = true;
      return;
    }
    for (std::int64_t s : symbols) {
      if (!letters.empty() && letters.back() == -s) continue;
      letters.push_back(s);
      rec(target);
      letters.pop_back();
      if (stop) return;
    }
  };
  for (std::int64_t len = min_len; len <= max_len && !stop; ++len) rec(len);
}

/// Enumerates abelian vectors with L1 norm in [min_len, max_len] in
/// (norm, lexicographic) order.
inline void for_each_vector(const GroupModel& model, std::int64_t min_len, std::int64_t max_len,
                            const std::function<bool(const GroupElement&)>& fn) {
  const int r = model.rank();
  std::vector<std::int64_t> coords(static_cast<std::size_t>(r), 0);
  bool stop = false;
  std::function<void(int, std::int64_t)> rec = [&](int pos, std::int64_t remaining) {
    if (stop) return;
    if (pos == r) {
      if (remaining == 0) {
        GroupElement g{GroupKind::FreeAbelian, r, coords};
        if (!fn(g)) stop = true;
      }
      return;
    }
    for (std::int64_t c = -remaining; c <= remaining; ++c) {
      coords[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, remaining - (c < 0 ? -c : c));
      if (stop) return;
    }
    coords[static_cast<std::size_t>(pos)] = 0;
  };
  for (std::int64_t len = min_len; len <= max_len && !stop; ++len) rec(0, len);
}

inline void for_each_element(const GroupModel& model, std::int64_t min_len, std::int64_t max_len,
                             const std::function<bool(const GroupElement&)>& fn) {
  if (model.kind() == GroupKind::Free) {
    for_each_reduced_word(model, min_len, max_len, fn);
  } else {
    for_each_vector(model, min_len, max_len, fn);
  }
}

inline std::int64_t count_reduced_words(int rank, std::int64_t min_len, std::int64_t max_len, std::int64_t cap) {
  std::int64_t total = 0;
  for (std::int64_t len = min_len; len <= max_len; ++len) {
    std::int64_t c = 2 * rank;
    for (std::int64_t i = 1; i < len; ++i) {
      c *= 2 * rank - 1;
      if (c > cap) return cap + 1;
    }
    total += (len == 0 ? 1 : c);
    if (total > cap) return cap + 1;
  }
  return total;
}

}  // namespace detail

struct RatioEstimate {
  int depth = 1;
  std::int64_t candidates = 0;    // elements considered
  std::int64_t domain_hits = 0;   // elements found in dom(phi^n)
  bool sampled = false;
  Rational max_ratio{0, 1};
  double root = 0.0;
  std::optional<Rational> exact_root;
  bool degenerate = false;     // only trivial images seen
  bool inconclusive = false;   // no domain element found in range
};

/// Estimates the contraction ratio at iterate depth n: the largest
/// (|phi^n(g)| / |g|)^(1/n) over reduced g with |g| in [ceil(L/2), L] lying
/// in dom(phi^n), where dom(phi) is the stabilizer of the first basis letter
/// and phi(g) = g|_{x0}.
inline RatioEstimate contraction_ratio_estimate(const BisetMachine& m, int n, std::int64_t L,
                                                std::uint64_t seed = 0,
                                                std::int64_t enumeration_cap = 200000,
                                                std::int64_t sample_count = 20000) {
  if (n < 1 || L < 2) throw ParseError("ratio estimation needs n >= 1 and L >= 2");
  RatioEstimate est;
  est.depth = n;
  const std::int64_t lo = (L + 1) / 2;
  std::vector<int> base(static_cast<std::size_t>(n), 0);

  auto consider = [&](const GroupElement& g) {
    ++est.candidates;
    WordAction a = m.act_word(g, base);
    if (a.word != base) return true;
    ++est.domain_hits;
    Rational ratio(word_length(a.restriction), word_length(g));
    if (est.domain_hits == 1 || est.max_ratio < ratio) est.max_ratio = ratio;
    return true;
  };

  std::int64_t population = m.model().kind() == GroupKind::Free
                                ? detail::count_reduced_words(m.model().rank(), lo, L, enumeration_cap)
                                : enumeration_cap;  // vector enumeration below the cap is re-counted lazily
  if (m.model().kind() == GroupKind::FreeAbelian) {
    std::int64_t count = 0;
    detail::for_each_vector(m.model(), lo, L, [&](const GroupElement&) { return ++count <= enumeration_cap; });
    population = count;
  }

  if (population <= enumeration_cap) {
    detail::for_each_element(m.model(), lo, L, consider);
  } else {
    est.sampled = true;
    Rng rng(seed);
    const int r = m.model().rank();
    for (std::int64_t s = 0; s < sample_count; ++s) {
      std::int64_t len = rng.range(lo, L);
      if (m.model().kind() == GroupKind::Free) {
        std::vector<std::int64_t> letters;
        letters.reserve(static_cast<std::size_t>(len));
        for (std::int64_t i = 0; i < len; ++i) {
          while (true) {
            std::int64_t idx = rng.range(1, r);
            std::int64_t sign = rng.below(2) ? 1 : -1;
            std::int64_t letter = sign * idx;
            if (!letters.empty() && letters.back() == -letter) continue;
            letters.push_back(letter);
            break;
          }
        }
        consider(GroupElement{GroupKind::Free, r, std::move(letters)});
      } else {
        // Spread len across coordinates, random signs.
        std::vector<std::int64_t> coords(static_cast<std::size_t>(r), 0);
        for (std::int64_t i = 0; i < len; ++i) {
          coords[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(r)))] += 1;
        }
        for (auto& c : coords) {
          if (rng.below(2)) c = -c;
        }
        consider(GroupElement{GroupKind::FreeAbelian, r, std::move(coords)});
      }
    }
  }

  if (est.domain_hits == 0) {
    est.inconclusive = true;
    return est;
  }
  if (est.max_ratio.num == 0) {
    est.degenerate = true;
    est.root = 0.0;
    est.exact_root = Rational(0, 1);
    return est;
  }
  est.root = std::pow(est.max_ratio.value(), 1.0 / n);
  est.exact_root = exact_root(est.max_ratio, n);
  return est;
}

/// Searches for a Levy-type witness: first by enumerating canonical
/// cyclically reduced g (|g| <= max_g) against words w (1 <= |w| <= max_w)
/// for the exact identity act_word(g, w) = (w, g), then by scanning
/// restriction orbits of the same elements for cycles.
inline std::optional<LevyWitness> levy_search(const BisetMachine& m, std::int64_t max_g, int max_w) {
  if (max_g < 1 || max_w < 1) throw ParseError("levy search bounds must be positive");

  std::vector<GroupElement> candidates;
  detail::for_each_element(m.model(), 1, max_g, [&](const GroupElement& g) {
    if (m.model().kind() == GroupKind::Free && !(conjugacy_representative(g) == g)) return true;
    candidates.push_back(g);
    return true;
  });

  std::vector<std::vector<int>> words;
  {
    std::vector<int> word;
    std::function<void(int)> rec = [&](int target) {
      if (static_cast<int>(word.size()) == target) {
        words.push_back(word);
        return;
      }
      for (int x = 0; x < m.degree(); ++x) {
        word.push_back(x);
        rec(target);
        word.pop_back();
      }
    };
    for (int len = 1; len <= max_w; ++len) rec(len);
  }

  for (const auto& g : candidates) {
    for (const auto& w : words) {
      WordAction a = m.act_word(g, w);
      if (a.word == w && a.restriction == g) {
        LevyWitness witness{LevyWitness::Kind::ExactFixed, g, w, {}, {}};
        if (!replay_witness(m, witness)) throw Error("internal: levy witness failed to replay");
        return witness;
      }
    }
  }

  const int orbit_depth = std::max(2 * max_w, 16);
  for (const auto& g : candidates) {
    RestrictionOrbit orbit = restriction_cycle(m, g, orbit_depth);
    if (orbit.outcome != RestrictionOrbit::Outcome::Cycle || orbit.trivial) continue;
    std::size_t start = static_cast<std::size_t>(orbit.cycle_start);
    LevyWitness witness;
    witness.kind = LevyWitness::Kind::RestrictionCycle;
    bool nontrivial = true;
    for (std::size_t i = start; i < orbit.elements.size(); ++i) {
      if (orbit.elements[i].is_identity()) nontrivial = false;
      witness.cycle.push_back(orbit.elements[i]);
      witness.cycle_letters.push_back(orbit.letters[i]);
    }
    if (!nontrivial) continue;
    if (!replay_witness(m, witness)) throw Error("internal: levy cycle witness failed to replay");
    return witness;
  }
  return std::nullopt;
}

}  // namespace selfsim

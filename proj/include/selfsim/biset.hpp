/* biset.hpp -- wreath-recursion machines: left action and restrictions
 * g.u = v.(g|_u) on words over a finite alphabet */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/common.hpp"
#include "selfsim/group.hpp"

namespace selfsim {

struct Alphabet {
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(labels.size()); }

  int index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return static_cast<int>(i);
    }
    return -1;
  }

  bool single_char() const {
    for (const auto& l : labels) {
      if (l.size() != 1) return false;
    }
    return true;
  }

  /// Words print as concatenated labels when every label is one character,
  /// otherwise dot-separated. The empty word prints as "".
  std::string format_word(std::span<const int> word) const {
    std::string out;
    bool compact = single_char();
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (!compact && i) out += '.';
      out += labels[static_cast<std::size_t>(word[i])];
    }
    return out;
  }

  std::vector<int> parse_word(std::string_view text) const {
    std::vector<int> word;
    if (text.empty()) return word;
    if (single_char()) {
      for (char c : text) {
        int idx = index_of(std::string_view(&c, 1));
        if (idx < 0) throw ParseError(std::string("unknown alphabet letter: ") + c);
        word.push_back(idx);
      }
      return word;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t dot = text.find('.', start);
      std::string_view tok = text.substr(start, dot == std::string_view::npos ? dot : dot - start);
      int idx = index_of(tok);
      if (idx < 0) throw ParseError("unknown alphabet letter: " + std::string(tok));
      word.push_back(idx);
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
    return word;
  }
};

/// Raw (file-level) recursion of one positive generator.
struct GeneratorRecursion {
  std::string name;
  std::vector<int> perm;                  // images of letter indices
  std::vector<std::string> restrictions;  // word/vector syntax, one per letter
};

/// Parsed machine description, before validation.
struct MachineSpec {
  GroupKind kind = GroupKind::Free;
  std::vector<std::string> generator_names;  // free model
  int rank = 0;                              // abelian model
  std::vector<std::string> alphabet;
  std::vector<GeneratorRecursion> recursions;
};

struct LetterAction {
  int letter;
  GroupElement restriction;
};

struct WordAction {
  std::vector<int> word;
  GroupElement restriction;
};

/// Validated machine: per-generator permutations and restrictions plus the
/// derived inverse recursions. Immutable after construction; all operations
/// are pure.
class BisetMachine {
 public:
  static BisetMachine validate(const MachineSpec& spec) {
    GroupModel model = spec.kind == GroupKind::Free ? GroupModel::free_group(spec.generator_names)
                                                    : GroupModel::free_abelian(spec.rank);
    if (spec.alphabet.size() < 2) throw ParseError("alphabet must have size >= 2");
    Alphabet alphabet{spec.alphabet};
    for (int i = 0; i < alphabet.size(); ++i) {
      for (int j = i + 1; j < alphabet.size(); ++j) {
        if (alphabet.labels[static_cast<std::size_t>(i)] == alphabet.labels[static_cast<std::size_t>(j)]) {
          throw ParseError("duplicate alphabet label: " + alphabet.labels[static_cast<std::size_t>(i)]);
        }
      }
    }

    const int d = alphabet.size();
    const int r = model.rank();
    if (static_cast<int>(spec.recursions.size()) != r) {
      throw ParseError("expected exactly one recursion per generator");
    }

    BisetMachine m(std::move(model), std::move(alphabet));
    m.perm_.assign(static_cast<std::size_t>(r), {});
    m.rest_.assign(static_cast<std::size_t>(r), {});
    std::vector<bool> seen(static_cast<std::size_t>(r), false);
    for (const auto& rec : spec.recursions) {
      int gi;
      if (m.model_.kind() == GroupKind::Free) {
        gi = m.model_.generator_index(rec.name);
        if (gi < 0) throw ParseError("recursion for unknown generator: " + rec.name);
      } else {
        // Abelian recursions bind by position; a name, when present, must match.
        gi = static_cast<int>(&rec - spec.recursions.data());
        if (!rec.name.empty() && rec.name != m.model_.generator_names()[static_cast<std::size_t>(gi)] &&
            m.model_.generator_index(rec.name) >= 0 && m.model_.generator_index(rec.name) != gi) {
          throw ParseError("abelian recursion order conflicts with generator name " + rec.name);
        }
      }
      if (seen[static_cast<std::size_t>(gi)]) throw ParseError("duplicate recursion for generator: " + rec.name);
      seen[static_cast<std::size_t>(gi)] = true;

      if (static_cast<int>(rec.perm.size()) != d) throw ParseError("permutation size does not match alphabet");
      std::vector<bool> hit(static_cast<std::size_t>(d), false);
      for (int img : rec.perm) {
        if (img < 0 || img >= d || hit[static_cast<std::size_t>(img)]) {
          throw ParseError("generator " + rec.name + ": perm is not a bijection on the alphabet");
        }
        hit[static_cast<std::size_t>(img)] = true;
      }
      if (static_cast<int>(rec.restrictions.size()) != d) {
        throw ParseError("generator " + rec.name + ": expected one restriction per letter");
      }
      m.perm_[static_cast<std::size_t>(gi)] = rec.perm;
      auto& row = m.rest_[static_cast<std::size_t>(gi)];
      row.reserve(static_cast<std::size_t>(d));
      for (const auto& w : rec.restrictions) row.push_back(m.model_.parse(w));
    }

    // Derived inverse recursions: perm_{s^-1} = perm_s^-1 and
    // (s^-1)|_x = (s|_{perm_s^-1(x)})^-1.
    m.inv_perm_.assign(static_cast<std::size_t>(r), std::vector<int>(static_cast<std::size_t>(d)));
    m.inv_rest_.assign(static_cast<std::size_t>(r), {});
    for (int g = 0; g < r; ++g) {
      auto& ip = m.inv_perm_[static_cast<std::size_t>(g)];
      auto& ir = m.inv_rest_[static_cast<std::size_t>(g)];
      ir.resize(static_cast<std::size_t>(d), m.model_.identity());
      for (int x = 0; x < d; ++x) {
        ip[static_cast<std::size_t>(m.perm_[static_cast<std::size_t>(g)][static_cast<std::size_t>(x)])] = x;
      }
      for (int x = 0; x < d; ++x) {
        int pre = ip[static_cast<std::size_t>(x)];
        ir[static_cast<std::size_t>(x)] = invert(m.rest_[static_cast<std::size_t>(g)][static_cast<std::size_t>(pre)]);
      }
    }

    if (m.model_.kind() == GroupKind::FreeAbelian) m.check_commutation();
    return m;
  }

  const GroupModel& model() const { return model_; }
  const Alphabet& alphabet() const { return alphabet_; }
  int degree() const { return alphabet_.size(); }

  /// One step of a single signed letter (positive or inverse generator).
  std::pair<int, const GroupElement*> step(std::int64_t signed_gen, int letter) const {
    std::size_t g = static_cast<std::size_t>((signed_gen < 0 ? -signed_gen : signed_gen) - 1);
    std::size_t x = static_cast<std::size_t>(letter);
    if (signed_gen > 0) return {perm_[g][x], &rest_[g][x]};
    return {inv_perm_[g][x], &inv_rest_[g][x]};
  }

  /// Full action of g on one letter: g.(x w) = y.(rest.w). Convention: in a
  /// product the rightmost generator acts first, so for g = s1 s2 ... sk,
  /// y = perm_{s1}(...perm_{sk}(x)...) and rest = s1|_.. * ... * sk|_x.
  LetterAction act_letter(const GroupElement& g, int letter) const {
    model_.check(g);
    if (letter < 0 || letter >= degree()) throw ParseError("letter index outside the alphabet");
    std::vector<std::int64_t> letters = letter_decomposition(g);
    int y = letter;
    GroupElement rest = model_.identity();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
      auto [ny, r] = step(*it, y);
      y = ny;
      rest = multiply(*r, rest);
    }
    return {y, std::move(rest)};
  }

  WordAction act_word(const GroupElement& g, std::span<const int> word) const {
    WordAction out{{}, g};
    out.word.reserve(word.size());
    for (int x : word) {
      LetterAction stepped = act_letter(out.restriction, x);
      out.word.push_back(stepped.letter);
      out.restriction = std::move(stepped.restriction);
    }
    return out;
  }

  /// Tabulates the level-n action as a permutation of X^n, indexed
  /// lexicographically with the first letter most significant. The budget
  /// bounds the tabulation work n * d^n.
  std::vector<std::uint64_t> level_action(const GroupElement& g, int level,
                                          std::uint64_t size_budget = (1u << 20)) const {
    model_.check(g);
    if (level < 0) throw ParseError("negative level");
    std::uint64_t total = 1;
    for (int i = 0; i < level; ++i) {
      total *= static_cast<std::uint64_t>(degree());
      if (total * static_cast<std::uint64_t>(level) > size_budget) {
        throw BudgetError("level_action table exceeds the size budget");
      }
    }
    std::vector<std::uint64_t> table(total);
    std::vector<int> word(static_cast<std::size_t>(level), 0);
    std::vector<bool> hit(total, false);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t v = idx;
      for (int i = level - 1; i >= 0; --i) {
        word[static_cast<std::size_t>(i)] = static_cast<int>(v % static_cast<std::uint64_t>(degree()));
        v /= static_cast<std::uint64_t>(degree());
      }
      WordAction a = act_word(g, word);
      std::uint64_t out = 0;
      for (int x : a.word) out = out * static_cast<std::uint64_t>(degree()) + static_cast<std::uint64_t>(x);
      table[idx] = out;
      if (hit[out]) throw Error("level action is not injective; machine tables are corrupt");
      hit[out] = true;
    }
    return table;
  }

 private:
  BisetMachine(GroupModel model, Alphabet alphabet) : model_(std::move(model)), alphabet_(std::move(alphabet)) {}

  // A machine over Z^n is only well defined when the generator recursions
  // commute. Checked by composing the raw letter steps in both orders
  // (signed generators included): same image letter, same restriction.
  void check_commutation() const {
    const int r = model_.rank();
    const int d = degree();
    auto compose = [&](std::int64_t first, std::int64_t second, int x) {
      auto [y, r1] = step(first, x);
      auto [z, r2] = step(second, y);
      return std::make_pair(z, multiply(*r2, *r1));
    };
    for (int i = 0; i < r; ++i) {
      for (int j = i + 1; j < r; ++j) {
        for (std::int64_t si : {std::int64_t(i + 1), std::int64_t(-(i + 1))}) {
          for (std::int64_t sj : {std::int64_t(j + 1), std::int64_t(-(j + 1))}) {
            for (int x = 0; x < d; ++x) {
              auto [y1, r1] = compose(si, sj, x);
              auto [y2, r2] = compose(sj, si, x);
              if (y1 != y2 || !(r1 == r2)) {
                throw ParseError("abelian recursions do not commute; not a Z^n machine");
              }
            }
          }
        }
      }
    }
  }

  GroupModel model_;
  Alphabet alphabet_;
  std::vector<std::vector<int>> perm_, inv_perm_;
  std::vector<std::vector<GroupElement>> rest_, inv_rest_;
};

}  // namespace selfsim

/* group.hpp -- exact words in free groups and vectors in free abelian groups,
 * behind one element interface */

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/common.hpp"

namespace selfsim {

enum class GroupKind { Free, FreeAbelian };

/// One group element. For Free the payload is the freely reduced letter
/// sequence (letter +i / -i is generator i-1 / its inverse, i >= 1); for
/// FreeAbelian it is the coordinate vector, one entry per generator.
struct GroupElement {
  GroupKind kind = GroupKind::Free;
  int rank = 0;
  std::vector<std::int64_t> data;

  bool is_identity() const {
    if (kind == GroupKind::Free) return data.empty();
    return std::all_of(data.begin(), data.end(), [](std::int64_t c) { return c == 0; });
  }

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.kind == b.kind && a.rank == b.rank && a.data == b.data;
  }
  friend bool operator<(const GroupElement& a, const GroupElement& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.data < b.data;
  }
};

inline std::int64_t word_length(const GroupElement& g);

/// Shortlex order: by word length first, then lexicographic payload.
/// Used wherever a deterministic enumeration of a set of elements is needed.
struct ShortLexLess {
  bool operator()(const GroupElement& a, const GroupElement& b) const {
    std::int64_t la = word_length(a);
    std::int64_t lb = word_length(b);
    if (la != lb) return la < lb;
    return a < b;
  }
};

struct ElementHash {
  std::size_t operator()(const GroupElement& g) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(g.kind));
    mix(static_cast<std::uint64_t>(g.rank));
    for (std::int64_t x : g.data) mix(static_cast<std::uint64_t>(x));
    return static_cast<std::size_t>(h);
  }
};

inline void check_same_model(const GroupElement& a, const GroupElement& b) {
  if (a.kind != b.kind || a.rank != b.rank) throw ModelError("elements belong to different group models");
}

inline std::int64_t word_length(const GroupElement& g) {
  if (g.kind == GroupKind::Free) return static_cast<std::int64_t>(g.data.size());
  std::int64_t n = 0;
  for (std::int64_t c : g.data) n += (c < 0 ? -c : c);
  return n;
}

inline GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  check_same_model(g, h);
  GroupElement out{g.kind, g.rank, {}};
  if (g.kind == GroupKind::FreeAbelian) {
    out.data.resize(g.data.size());
    for (std::size_t i = 0; i < g.data.size(); ++i) out.data[i] = g.data[i] + h.data[i];
    return out;
  }
  out.data = g.data;
  for (std::int64_t letter : h.data) {
    if (!out.data.empty() && out.data.back() == -letter) {
      out.data.pop_back();
    } else {
      out.data.push_back(letter);
    }
  }
  return out;
}

inline GroupElement invert(const GroupElement& g) {
  GroupElement out{g.kind, g.rank, {}};
  if (g.kind == GroupKind::FreeAbelian) {
    out.data.reserve(g.data.size());
    for (std::int64_t c : g.data) out.data.push_back(-c);
    return out;
  }
  out.data.reserve(g.data.size());
  for (auto it = g.data.rbegin(); it != g.data.rend(); ++it) out.data.push_back(-*it);
  return out;
}

/// g = conjugator * core * conjugator^-1 with core cyclically reduced.
/// Free model only.
inline std::pair<GroupElement, GroupElement> cyclically_reduce(const GroupElement& g) {
  if (g.kind != GroupKind::Free) throw ModelError("cyclic reduction requires the free model");
  std::size_t lo = 0;
  std::size_t hi = g.data.size();
  while (hi - lo >= 2 && g.data[lo] == -g.data[hi - 1]) {
    ++lo;
    --hi;
  }
  GroupElement core{g.kind, g.rank, {g.data.begin() + static_cast<std::ptrdiff_t>(lo),
                                     g.data.begin() + static_cast<std::ptrdiff_t>(hi)}};
  GroupElement conj{g.kind, g.rank, {g.data.begin(), g.data.begin() + static_cast<std::ptrdiff_t>(lo)}};
  return {core, conj};
}

/// Canonical representative of the conjugacy class: cyclic reduction followed
/// by the lexicographically least rotation. Abelian elements are their own
/// representatives.
inline GroupElement conjugacy_representative(const GroupElement& g) {
  if (g.kind == GroupKind::FreeAbelian) return g;
  GroupElement core = cyclically_reduce(g).first;
  if (core.data.size() <= 1) return core;
  std::vector<std::int64_t> best = core.data;
  std::vector<std::int64_t> rot = core.data;
  for (std::size_t i = 1; i < core.data.size(); ++i) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  core.data = best;
  return core;
}

/// Declared group model: a free group with named generators, or Z^rank with
/// canonical generator names e1..eN. Owns parsing and printing of elements.
class GroupModel {
 public:
  static GroupModel free_group(std::vector<std::string> names) {
    if (names.empty()) throw ParseError("free group needs at least one generator");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty()) throw ParseError("empty generator name");
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        if (names[i] == names[j]) throw ParseError("duplicate generator name: " + names[i]);
      }
    }
    return GroupModel(GroupKind::Free, std::move(names));
  }

  static GroupModel free_abelian(int rank) {
    if (rank < 1) throw ParseError("abelian rank must be >= 1");
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(rank));
    for (int i = 1; i <= rank; ++i) names.push_back("e" + std::to_string(i));
    return GroupModel(GroupKind::FreeAbelian, std::move(names));
  }

  GroupKind kind() const { return kind_; }
  int rank() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& generator_names() const { return names_; }

  int generator_index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  GroupElement identity() const {
    GroupElement g{kind_, rank(), {}};
    if (kind_ == GroupKind::FreeAbelian) g.data.assign(names_.size(), 0);
    return g;
  }

  /// Generator by zero-based index; sign -1 gives the formal inverse.
  GroupElement generator(int index, int sign = 1) const {
    if (index < 0 || index >= rank()) throw ModelError("generator index out of range");
    if (sign != 1 && sign != -1) throw ModelError("generator sign must be +1 or -1");
    GroupElement g = identity();
    if (kind_ == GroupKind::Free) {
      g.data.push_back(sign * (index + 1));
    } else {
      g.data[static_cast<std::size_t>(index)] = sign;
    }
    return g;
  }

  /// Free reduction of a raw letter sequence (signed one-based indices);
  /// for the abelian model the letters are summed coordinatewise.
  GroupElement reduce(std::span<const std::int64_t> letters) const {
    GroupElement g = identity();
    for (std::int64_t letter : letters) {
      std::int64_t idx = letter < 0 ? -letter : letter;
      if (letter == 0 || idx > rank()) throw ModelError("letter refers to an unknown generator");
      if (kind_ == GroupKind::FreeAbelian) {
        g.data[static_cast<std::size_t>(idx - 1)] += (letter < 0 ? -1 : 1);
      } else if (!g.data.empty() && g.data.back() == -letter) {
        g.data.pop_back();
      } else {
        g.data.push_back(letter);
      }
    }
    return g;
  }

  GroupElement from_vector(std::vector<std::int64_t> coords) const {
    if (kind_ != GroupKind::FreeAbelian) throw ModelError("vector element requires the abelian model");
    if (static_cast<int>(coords.size()) != rank()) throw ModelError("vector length does not match rank");
    return GroupElement{kind_, rank(), std::move(coords)};
  }

  /// Word syntax: whitespace-separated tokens `name` or `name^-1`; the empty
  /// string is the identity. Abelian elements also accept the comma-separated
  /// integer vector form.
  GroupElement parse(std::string_view text) const {
    if (kind_ == GroupKind::FreeAbelian && text.find(',') != std::string_view::npos) {
      return parse_vector(text);
    }
    std::vector<std::int64_t> letters;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
      int sign = 1;
      std::string name = tok;
      if (auto pos = tok.rfind("^-1"); pos != std::string::npos && pos + 3 == tok.size()) {
        sign = -1;
        name = tok.substr(0, pos);
      }
      int idx = generator_index(name);
      if (idx < 0) {
        if (kind_ == GroupKind::FreeAbelian && letters.empty() && tok == text) return parse_vector(text);
        throw ParseError("unknown generator symbol: " + tok);
      }
      letters.push_back(sign * (idx + 1));
    }
    return reduce(letters);
  }

  std::string format(const GroupElement& g) const {
    check(g);
    if (kind_ == GroupKind::FreeAbelian) {
      std::string out;
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(g.data[i]);
      }
      return out;
    }
    std::string out;
    for (std::int64_t letter : g.data) {
      if (!out.empty()) out += ' ';
      out += names_[static_cast<std::size_t>((letter < 0 ? -letter : letter) - 1)];
      if (letter < 0) out += "^-1";
    }
    return out;
  }

  void check(const GroupElement& g) const {
    if (g.kind != kind_ || g.rank != rank()) throw ModelError("element does not belong to this group model");
  }

  friend bool operator==(const GroupModel& a, const GroupModel& b) {
    return a.kind_ == b.kind_ && a.names_ == b.names_;
  }

 private:
  GroupModel(GroupKind kind, std::vector<std::string> names) : kind_(kind), names_(std::move(names)) {}

  GroupElement parse_vector(std::string_view text) const {
    std::vector<std::int64_t> coords;
    std::string buf;
    auto flush = [&] {
      if (buf.empty()) throw ParseError("malformed integer vector");
      std::size_t used = 0;
      std::int64_t v = std::stoll(buf, &used);
      if (used != buf.size()) throw ParseError("malformed integer vector entry: " + buf);
      coords.push_back(v);
      buf.clear();
    };
    for (char c : text) {
      if (c == ',') {
        flush();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        buf += c;
      }
    }
    flush();
    return from_vector(std::move(coords));
  }

  GroupKind kind_;
  std::vector<std::string> names_;
};

/// Single-letter decomposition, leftmost factor first. Abelian vectors expand
/// into generator blocks e1^c1 e2^c2 ... .
inline std::vector<std::int64_t> letter_decomposition(const GroupElement& g) {
  if (g.kind == GroupKind::Free) return g.data;
  std::vector<std::int64_t> letters;
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    std::int64_t c = g.data[i];
    std::int64_t letter = (c < 0 ? -static_cast<std::int64_t>(i + 1) : static_cast<std::int64_t>(i + 1));
    for (std::int64_t k = 0; k < (c < 0 ? -c : c); ++k) letters.push_back(letter);
  }
  return letters;
}

}  // namespace selfsim

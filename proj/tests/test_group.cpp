#include <doctest.h>

#include <selfsim/group.hpp>

using namespace selfsim;

namespace {

GroupModel f2() { return GroupModel::free_group({"a", "b"}); }

}  // namespace

TEST_CASE("free reduction") {
  GroupModel m = f2();
  CHECK(m.format(m.parse("a a^-1 b")) == "b");
  CHECK(m.parse("").is_identity());
  CHECK(m.format(m.parse("a b b^-1 a")) == "a a");

  SUBCASE("idempotent on random raw sequences") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::int64_t> raw;
      const std::int64_t len = rng.range(0, 12);
      for (std::int64_t i = 0; i < len; ++i) {
        raw.push_back((rng.below(2) ? 1 : -1) * rng.range(1, 2));
      }
      GroupElement once = m.reduce(raw);
      GroupElement twice = m.reduce(once.data);
      CHECK(once == twice);
    }
  }

  SUBCASE("unknown symbol rejected") {
    CHECK_THROWS_AS(m.parse("a c"), ParseError);
  }
}

TEST_CASE("multiplication and inversion") {
  GroupModel m = f2();
  CHECK(multiply(m.parse("a"), m.parse("a^-1")).is_identity());
  CHECK(m.format(multiply(m.parse("a b"), m.parse("b^-1 a"))) == "a a");

  GroupModel z2 = GroupModel::free_abelian(2);
  CHECK(multiply(z2.parse("1,2"), z2.parse("3,-2")) == z2.parse("4,0"));
  CHECK(invert(z2.parse("2,-1")) == z2.parse("-2,1"));

  CHECK(m.format(invert(m.parse("a b"))) == "b^-1 a^-1");
  CHECK(invert(m.identity()).is_identity());

  SUBCASE("model mismatch") {
    CHECK_THROWS_AS(multiply(m.parse("a"), z2.parse("1,0")), ModelError);
  }

  SUBCASE("associativity and two-sided inverse, all words of length <= 3") {
    std::vector<GroupElement> words;
    std::vector<std::int64_t> letters;
    std::function<void(int)> gen = [&](int remaining) {
      words.push_back(m.reduce(letters));
      if (remaining == 0) return;
      for (std::int64_t s : {1, -1, 2, -2}) {
        if (!letters.empty() && letters.back() == -s) continue;
        letters.push_back(s);
        gen(remaining - 1);
        letters.pop_back();
      }
    };
    gen(3);
    for (const auto& g : words) {
      CHECK(multiply(g, invert(g)).is_identity());
      CHECK(multiply(invert(g), g).is_identity());
      for (const auto& h : words) {
        for (const auto& k : words) {
          CHECK(multiply(multiply(g, h), k) == multiply(g, multiply(h, k)));
        }
      }
    }
  }
}

TEST_CASE("word length") {
  GroupModel m = f2();
  CHECK(word_length(m.parse("a b^-1 a")) == 3);
  CHECK(word_length(m.identity()) == 0);
  GroupModel z2 = GroupModel::free_abelian(2);
  CHECK(word_length(z2.parse("2,-3")) == 5);

  SUBCASE("subadditive on random pairs") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<std::int64_t> raw1, raw2;
      for (std::int64_t i = 0, n = rng.range(0, 10); i < n; ++i) raw1.push_back((rng.below(2) ? 1 : -1) * rng.range(1, 2));
      for (std::int64_t i = 0, n = rng.range(0, 10); i < n; ++i) raw2.push_back((rng.below(2) ? 1 : -1) * rng.range(1, 2));
      GroupElement g = m.reduce(raw1), h = m.reduce(raw2);
      CHECK(word_length(multiply(g, h)) <= word_length(g) + word_length(h));
    }
  }
}

TEST_CASE("cyclic reduction") {
  GroupModel m = f2();

  SUBCASE("conjugate strip") {
    auto [core, conj] = cyclically_reduce(m.parse("a b a^-1"));
    CHECK(m.format(core) == "b");
    CHECK(m.format(conj) == "a");
  }

  SUBCASE("already cyclically reduced") {
    auto [core, conj] = cyclically_reduce(m.parse("a b"));
    CHECK(m.format(core) == "a b");
    CHECK(conj.is_identity());
  }

  SUBCASE("nested strip, verified against the round-trip oracle") {
    // a^-1 b a b^-1 a strips twice: conjugator a^-1 b, core a.
    GroupElement g = m.parse("a^-1 b a b^-1 a");
    auto [core, conj] = cyclically_reduce(g);
    CHECK(multiply(conj, multiply(core, invert(conj))) == g);
    CHECK(core.data.size() >= 1);
    CHECK((core.data.empty() || core.data.front() != -core.data.back() || core.data.size() == 1));
    CHECK(m.format(core) == "a");
    CHECK(m.format(conj) == "a^-1 b");
  }

  SUBCASE("round-trip on random words") {
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<std::int64_t> raw;
      for (std::int64_t i = 0, n = rng.range(0, 12); i < n; ++i) raw.push_back((rng.below(2) ? 1 : -1) * rng.range(1, 2));
      GroupElement g = m.reduce(raw);
      auto [core, conj] = cyclically_reduce(g);
      CHECK(multiply(conj, multiply(core, invert(conj))) == g);
      if (core.data.size() >= 2) CHECK(core.data.front() != -core.data.back());
    }
  }

  SUBCASE("abelian input rejected") {
    CHECK_THROWS_AS(cyclically_reduce(GroupModel::free_abelian(2).parse("1,0")), ModelError);
  }
}

TEST_CASE("conjugacy representative is rotation-least") {
  GroupModel m = f2();
  GroupElement r1 = conjugacy_representative(m.parse("b a"));
  GroupElement r2 = conjugacy_representative(m.parse("a b"));
  CHECK(r1 == r2);
  CHECK(conjugacy_representative(m.parse("a b a^-1")) == conjugacy_representative(m.parse("b")));
}

TEST_CASE("abelian word syntax accepts generator tokens") {
  GroupModel z2 = GroupModel::free_abelian(2);
  CHECK(z2.parse("e1 e2^-1 e1") == z2.parse("2,-1"));
  CHECK(z2.parse("") == z2.identity());
  CHECK(z2.format(z2.parse("0,3")) == "0,3");
}

TEST_CASE("cyclic reduction of the identity") {
  GroupModel m = GroupModel::free_group({"a"});
  auto [core, conj] = cyclically_reduce(m.identity());
  CHECK(core.is_identity());
  CHECK(conj.is_identity());
}

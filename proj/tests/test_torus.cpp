#include <doctest.h>

#include <numeric>
#include <selfsim/torus.hpp>

using namespace selfsim;

TEST_CASE("spectral trichotomy") {
  CHECK(classify({2, 0, 0, 2}).cls == TorusClass::Expanding);

  TorusClassification hyp = classify({3, 1, 1, 1});
  CHECK(hyp.cls == TorusClass::HyperbolicNotExpanding);
  CHECK(hyp.trace == 4);
  CHECK(hyp.det == 2);

  TorusClassification unit = classify({2, 0, 1, 1});
  CHECK(unit.cls == TorusClass::UnitEigenvalue);
  CHECK(unit.unit_sign == 1);

  TorusClassification minus = classify({-2, 0, 1, -1});  // tr=-3, det=2
  CHECK(minus.cls == TorusClass::UnitEigenvalue);
  CHECK(minus.unit_sign == -1);

  SUBCASE("determinant below 2 is rejected") {
    CHECK_THROWS_AS(classify({3, 0, 1, -1}), ParseError);  // det = -3
    CHECK_THROWS_AS(classify({1, 0, 0, 1}), ParseError);   // det = 1
  }

  SUBCASE("root descriptions") {
    CHECK(classify({1, -1, 1, 1}).roots == "complex pair");          // disc = -4
    CHECK(classify({2, 0, 0, 2}).roots == "repeated rational");      // disc = 0
    CHECK(classify({3, 0, 0, 2}).roots == "distinct rational");      // disc = 1
    CHECK(classify({3, 1, 1, 2}).roots == "irrational quadratic");   // disc = 5
  }

  SUBCASE("agrees with the floating-point eigenvalue test") {
    for (std::int64_t a = -3; a <= 3; ++a)
      for (std::int64_t b = -3; b <= 3; ++b)
        for (std::int64_t c = -3; c <= 3; ++c)
          for (std::int64_t d = -3; d <= 3; ++d) {
            IntMatrix2 A{a, b, c, d};
            if (A.det() < 2 || A.det() > 9) continue;
            CHECK(classify(A).cls == classify_by_float(A));
          }
  }

  SUBCASE("invariant under GL2(Z) conjugation") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
      IntMatrix2 A{rng.range(-3, 3), rng.range(-3, 3), rng.range(-3, 3), rng.range(-3, 3)};
      if (A.det() < 2) continue;
      // Random unimodular U from elementary shears.
      IntMatrix2 U{1, 0, 0, 1};
      for (int s = 0; s < 4; ++s) {
        std::int64_t k = rng.range(-2, 2);
        if (rng.below(2)) {
          U = IntMatrix2{U.a + k * U.c, U.b + k * U.d, U.c, U.d};
        } else {
          U = IntMatrix2{U.a, U.b, U.c + k * U.a, U.d + k * U.b};
        }
      }
      std::int64_t du = U.a * U.d - U.b * U.c;
      IntMatrix2 Uinv{U.d / du, -U.b / du, -U.c / du, U.a / du};
      auto mul = [](const IntMatrix2& X, const IntMatrix2& Y) {
        return IntMatrix2{X.a * Y.a + X.b * Y.c, X.a * Y.b + X.b * Y.d, X.c * Y.a + X.d * Y.c,
                          X.c * Y.b + X.d * Y.d};
      };
      IntMatrix2 B = mul(mul(U, A), Uinv);
      CHECK(B.trace() == A.trace());
      CHECK(B.det() == A.det());
      CHECK(classify(B).cls == classify(A).cls);
    }
  }
}

TEST_CASE("torus biset recursion") {
  SUBCASE("doubling map") {
    BisetMachine m = torus_biset({2, 0, 0, 2});
    CHECK(m.degree() == 4);
    CHECK(m.alphabet().labels[0] == "0,0");

    // act (1,0) on representative (1,0): lands on (0,0) with restriction (1,0).
    GroupElement e1 = m.model().parse("1,0");
    int rep10 = m.alphabet().index_of("1,0");
    REQUIRE(rep10 >= 0);
    LetterAction a = m.act_letter(e1, rep10);
    CHECK(m.alphabet().labels[static_cast<std::size_t>(a.letter)] == "0,0");
    CHECK(a.restriction == e1);

    for (int x = 0; x < m.degree(); ++x) {
      LetterAction id = m.act_letter(m.model().identity(), x);
      CHECK(id.letter == x);
      CHECK(id.restriction.is_identity());
    }
  }

  SUBCASE("unit-eigenvalue example: (0,1) is fixed with itself as restriction") {
    BisetMachine m = torus_biset({2, 0, 1, 1});
    CHECK(m.degree() == 2);
    GroupElement v = m.model().parse("0,1");
    int rep00 = m.alphabet().index_of("0,0");
    REQUIRE(rep00 >= 0);
    LetterAction a = m.act_letter(v, rep00);
    CHECK(a.letter == rep00);
    CHECK(a.restriction == v);
  }

  SUBCASE("alphabet size equals the determinant") {
    for (IntMatrix2 A : {IntMatrix2{2, 1, 0, 3}, IntMatrix2{3, 1, 1, 2}, IntMatrix2{-1, 2, -3, 1}}) {
      CHECK(torus_biset(A).degree() == A.det());
    }
  }
}

TEST_CASE("unit eigenvector witness") {
  auto w = unit_eigen_witness({2, 0, 1, 1});
  REQUIRE(w.has_value());
  CHECK((*w)[0] == 0);
  CHECK((*w)[1] == 1);

  CHECK(!unit_eigen_witness({2, 0, 0, 2}).has_value());
  CHECK_THROWS_AS(unit_eigen_witness({3, 0, 1, -1}), ParseError);  // det = -3 < 2

  SUBCASE("replay over the sweep range") {
    for (std::int64_t a = -3; a <= 3; ++a)
      for (std::int64_t b = -3; b <= 3; ++b)
        for (std::int64_t c = -3; c <= 3; ++c)
          for (std::int64_t d = -3; d <= 3; ++d) {
            IntMatrix2 A{a, b, c, d};
            if (A.det() < 2 || A.det() > 9) continue;
            TorusClassification cls = classify(A);
            auto v = unit_eigen_witness(A);
            CHECK(v.has_value() == (cls.cls == TorusClass::UnitEigenvalue));
            if (v) {
              auto img = A.apply((*v)[0], (*v)[1]);
              CHECK(img[0] == cls.unit_sign * (*v)[0]);
              CHECK(img[1] == cls.unit_sign * (*v)[1]);
              CHECK(std::gcd(std::abs((*v)[0]), std::abs((*v)[1])) == 1);
            }
          }
  }
}

TEST_CASE("nucleus oracle on selected matrices") {
  Budget budget{500, 50, 30};

  SUBCASE("expanding with a slow eigenvalue still certifies") {
    BisetMachine m = torus_biset({3, 1, 1, 2});  // eigenvalues (5 +- sqrt 5)/2
    ContractionReport rep = nucleus(m, budget);
    CHECK(rep.status == ContractionStatus::Contracting);
    CHECK(rep.stats.certificate_depth > 1);
    CHECK(verify_nucleus(m, rep.nucleus, rep.stats.certificate_depth));
  }

  SUBCASE("hyperbolic but not expanding stays inconclusive") {
    ContractionReport rep = nucleus(torus_biset({3, 1, 1, 1}), budget);
    CHECK(rep.status == ContractionStatus::BudgetExceeded);
  }

  SUBCASE("small sweep agrees with the classifier") {
    for (const auto& row : torus_sweep(2, 5, budget)) {
      CHECK(row.agree);
      CHECK(row.float_agree);
      CHECK(row.unit_witness_ok);
    }
  }
}

TEST_CASE("lattice handles a zero diagonal") {
  IntMatrix2 A{0, -2, 3, 0};  // det 6, complex spectrum
  CHECK(classify(A).cls == TorusClass::Expanding);
  BisetMachine m = torus_biset(A);
  CHECK(m.degree() == 6);
  ContractionReport rep = nucleus(m);
  CHECK(rep.status == ContractionStatus::Contracting);
}

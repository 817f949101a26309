/* torus.hpp -- torus endomorphisms: exact spectral trichotomy, induced
 * Z^2 biset via lattice coset recursion, unit-eigenvalue witnesses */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/biset.hpp"
#include "selfsim/common.hpp"
#include "selfsim/contraction.hpp"
#include "selfsim/group.hpp"

namespace selfsim {

struct IntMatrix2 {
  std::int64_t a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]

  std::int64_t trace() const { return a + d; }
  std::int64_t det() const { return a * d - b * c; }
  std::int64_t discriminant() const { return trace() * trace() - 4 * det(); }

  std::array<std::int64_t, 2> apply(std::int64_t x, std::int64_t y) const {
    return {a * x + b * y, c * x + d * y};
  }

  std::string str() const {
    return "[[" + std::to_string(a) + "," + std::to_string(b) + "],[" + std::to_string(c) + "," +
           std::to_string(d) + "]]";
  }
};

enum class TorusClass { Expanding, HyperbolicNotExpanding, UnitEigenvalue, NonHyperbolicOther };

inline std::string to_string(TorusClass c) {
  switch (c) {
    case TorusClass::Expanding: return "expanding";
    case TorusClass::HyperbolicNotExpanding: return "hyperbolic_not_expanding";
    case TorusClass::UnitEigenvalue: return "unit_eigenvalue";
    case TorusClass::NonHyperbolicOther: return "non_hyperbolic_other";
  }
  return "?";
}

struct TorusClassification {
  TorusClass cls = TorusClass::Expanding;
  int unit_sign = 0;  // +1 / -1 when cls == UnitEigenvalue
  std::int64_t trace = 0;
  std::int64_t det = 0;
  std::int64_t discriminant = 0;
  std::string roots;  // "complex pair" | "repeated rational" | "distinct rational" | "irrational quadratic"
};

inline void require_det_at_least_two(const IntMatrix2& A) {
  if (A.det() < 2) throw ParseError("determinant must be at least 2, got " + std::to_string(A.det()));
}

/// Exact trichotomy for p(x) = x^2 - tr x + det with det >= 2:
/// complex roots have |x|^2 = det > 1; real roots straddle the unit circle
/// exactly when |tr| > det + 1, and touch it exactly when |tr| = det + 1
/// (p(+1) = 0 for tr = det + 1, p(-1) = 0 for tr = -(det + 1)).
inline TorusClassification classify(const IntMatrix2& A) {
  require_det_at_least_two(A);
  TorusClassification out;
  out.trace = A.trace();
  out.det = A.det();
  out.discriminant = A.discriminant();

  const std::int64_t abs_tr = out.trace < 0 ? -out.trace : out.trace;
  if (out.discriminant < 0) {
    out.roots = "complex pair";
    out.cls = TorusClass::Expanding;
    return out;
  }
  if (out.discriminant == 0) {
    out.roots = "repeated rational";
  } else if (integer_root(out.discriminant, 2)) {
    out.roots = "distinct rational";
  } else {
    out.roots = "irrational quadratic";
  }
  if (abs_tr < out.det + 1) {
    out.cls = TorusClass::Expanding;
  } else if (abs_tr == out.det + 1) {
    out.cls = TorusClass::UnitEigenvalue;
    out.unit_sign = out.trace > 0 ? 1 : -1;
  } else {
    out.cls = TorusClass::HyperbolicNotExpanding;
  }
  return out;
}

/// Floating-point cross-check of the classification via the eigenvalue
/// moduli; independent of the integer tests above. Sanity only.
inline TorusClass classify_by_float(const IntMatrix2& A, double tol = 1e-9) {
  const double tr = static_cast<double>(A.trace());
  const double det = static_cast<double>(A.det());
  const double disc = tr * tr - 4.0 * det;
  double m1, m2;
  if (disc < 0) {
    m1 = m2 = std::sqrt(det);
  } else {
    const double s = std::sqrt(disc);
    m1 = std::fabs((tr + s) / 2.0);
    m2 = std::fabs((tr - s) / 2.0);
  }
  const bool unit1 = std::fabs(m1 - 1.0) <= tol;
  const bool unit2 = std::fabs(m2 - 1.0) <= tol;
  if (unit1 || unit2) return TorusClass::UnitEigenvalue;
  if (m1 > 1.0 && m2 > 1.0) return TorusClass::Expanding;
  if ((m1 > 1.0) != (m2 > 1.0)) return TorusClass::HyperbolicNotExpanding;
  return TorusClass::NonHyperbolicOther;
}

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Column Hermite form of A: H = [[h11, 0], [h21, h22]] with column span
/// equal to A Z^2, h11, h22 > 0 and 0 <= h21 < h22.
struct Hermite2 {
  std::int64_t h11 = 1, h21 = 0, h22 = 1;
};

inline Hermite2 column_hermite(const IntMatrix2& A) {
  // Columns (a, c) and (b, d); zero the top entry of the second column.
  std::int64_t a = A.a, c = A.c, b = A.b, d = A.d;
  while (b != 0) {
    std::int64_t q = floor_div(a, b);
    std::int64_t na = a - q * b, nc = c - q * d;
    a = b;
    c = d;
    b = na;
    d = nc;
  }
  if (a < 0) {
    a = -a;
    c = -c;
  }
  if (d < 0) d = -d;
  if (a == 0 || d == 0) throw ParseError("matrix is singular");
  std::int64_t h21 = c % d;
  if (h21 < 0) h21 += d;
  return {a, h21, d};
}

}  // namespace detail

/// Coset data of the sublattice A Z^2 <= Z^2: canonical representatives and
/// exact reduction, via the column Hermite form.
class TorusLattice {
 public:
  explicit TorusLattice(const IntMatrix2& A) : A_(A), H_(detail::column_hermite(A)) {
    require_det_at_least_two(A);
    for (std::int64_t i = 0; i < H_.h11; ++i) {
      for (std::int64_t j = 0; j < H_.h22; ++j) reps_.push_back({i, j});
    }
  }

  const IntMatrix2& matrix() const { return A_; }
  std::int64_t degree() const { return A_.det(); }
  const std::vector<std::array<std::int64_t, 2>>& representatives() const { return reps_; }

  /// Canonical representative of v + A Z^2.
  std::array<std::int64_t, 2> reduce(std::int64_t x, std::int64_t y) const {
    std::int64_t k1 = detail::floor_div(x, H_.h11);
    x -= k1 * H_.h11;
    y -= k1 * H_.h21;
    std::int64_t k2 = detail::floor_div(y, H_.h22);
    y -= k2 * H_.h22;
    return {x, y};
  }

  int rep_index(std::array<std::int64_t, 2> r) const {
    return static_cast<int>(r[0] * H_.h22 + r[1]);
  }

  /// Exact A^{-1} w for w in A Z^2; divisibility is asserted.
  std::array<std::int64_t, 2> preimage(std::int64_t x, std::int64_t y) const {
    const std::int64_t det = A_.det();
    const std::int64_t px = A_.d * x - A_.b * y;
    const std::int64_t py = -A_.c * x + A_.a * y;
    if (px % det != 0 || py % det != 0) throw Error("internal: vector is not in the sublattice A Z^2");
    return {px / det, py / det};
  }

 private:
  IntMatrix2 A_;
  detail::Hermite2 H_;
  std::vector<std::array<std::int64_t, 2>> reps_;
};

/// The Z^2 biset of the torus endomorphism induced by A: alphabet = coset
/// representatives of A Z^2, left action v.(x w) = y.(u w) where
/// y = rep(v + r_x) and u = A^{-1}(v + r_x - r_y).
inline BisetMachine torus_biset(const IntMatrix2& A) {
  TorusLattice lattice(A);
  MachineSpec spec;
  spec.kind = GroupKind::FreeAbelian;
  spec.rank = 2;
  for (const auto& r : lattice.representatives()) {
    spec.alphabet.push_back(std::to_string(r[0]) + "," + std::to_string(r[1]));
  }
  for (int gen = 0; gen < 2; ++gen) {
    GeneratorRecursion rec;
    rec.name = "e" + std::to_string(gen + 1);
    const std::int64_t vx = gen == 0 ? 1 : 0;
    const std::int64_t vy = gen == 0 ? 0 : 1;
    for (const auto& r : lattice.representatives()) {
      auto y = lattice.reduce(vx + r[0], vy + r[1]);
      auto u = lattice.preimage(vx + r[0] - y[0], vy + r[1] - y[1]);
      rec.perm.push_back(lattice.rep_index(y));
      rec.restrictions.push_back(std::to_string(u[0]) + "," + std::to_string(u[1]));
    }
    spec.recursions.push_back(std::move(rec));
  }
  return BisetMachine::validate(spec);
}

/// Primitive integer eigenvector for the eigenvalue +1 or -1, when present:
/// kernel of A -+ Id, gcd-normalized, first nonzero coordinate positive.
inline std::optional<std::array<std::int64_t, 2>> unit_eigen_witness(const IntMatrix2& A) {
  TorusClassification cls = classify(A);
  if (cls.cls != TorusClass::UnitEigenvalue) return std::nullopt;
  const std::int64_t s = cls.unit_sign;
  // Kernel of [[a - s, b], [c, d - s]].
  std::int64_t vx = A.b, vy = s - A.a;
  if (vx == 0 && vy == 0) {
    vx = A.d - s;
    vy = -A.c;
  }
  if (vx == 0 && vy == 0) throw Error("internal: kernel extraction failed");
  std::int64_t g = std::gcd(vx < 0 ? -vx : vx, vy < 0 ? -vy : vy);
  vx /= g;
  vy /= g;
  if (vx < 0 || (vx == 0 && vy < 0)) {
    vx = -vx;
    vy = -vy;
  }
  auto img = A.apply(vx, vy);
  if (img[0] != s * vx || img[1] != s * vy) throw Error("internal: eigenvector replay failed");
  return std::array<std::int64_t, 2>{vx, vy};
}

struct SweepRow {
  IntMatrix2 matrix;
  TorusClass cls = TorusClass::Expanding;
  ContractionStatus nucleus_status = ContractionStatus::BudgetExceeded;
  bool agree = false;         // (nucleus contracting) == (class expanding)
  bool float_agree = false;   // integer classifier == floating classifier
  bool unit_witness_ok = true;  // levy witness found and replayed (unit class only)
  std::int64_t nucleus_size = 0;
};

/// Oracle sweep over all integer matrices with entries in [-range, range]
/// and determinant in [2, det_max]: the generic nucleus algorithm against
/// the exact spectral classifier.
inline std::vector<SweepRow> torus_sweep(std::int64_t range, std::int64_t det_max, const Budget& budget = {},
                                         std::int64_t levy_max_g = 8, int levy_max_w = 3) {
  std::vector<SweepRow> rows;
  for (std::int64_t a = -range; a <= range; ++a) {
    for (std::int64_t b = -range; b <= range; ++b) {
      for (std::int64_t c = -range; c <= range; ++c) {
        for (std::int64_t d = -range; d <= range; ++d) {
          IntMatrix2 A{a, b, c, d};
          if (A.det() < 2 || A.det() > det_max) continue;
          SweepRow row;
          row.matrix = A;
          TorusClassification cls = classify(A);
          row.cls = cls.cls;
          row.float_agree = classify_by_float(A) == cls.cls;
          BisetMachine machine = torus_biset(A);
          ContractionReport rep = nucleus(machine, budget);
          row.nucleus_status = rep.status;
          row.nucleus_size = static_cast<std::int64_t>(rep.nucleus.size());
          row.agree = (rep.status == ContractionStatus::Contracting) == (cls.cls == TorusClass::Expanding);
          if (cls.cls == TorusClass::UnitEigenvalue) {
            auto witness = levy_search(machine, levy_max_g, levy_max_w);
            row.unit_witness_ok = witness.has_value() && replay_witness(machine, *witness);
          }
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

}  // namespace selfsim

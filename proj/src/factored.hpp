#pragma once

#include <string>
#include <vector>

#include "series.hpp"

namespace qtno {

// One factor (1 - c * X^e)^mult of a product kept in symbolic form.
struct Factor {
    Rational c;
    ExpVec e;
    long mult = 1;
};

// coeff * X^shift * prod of factors.  Kept unexpanded so that products,
// inverses and powers are exact regardless of windows; expansion into a
// Series happens once, at the end.  `zero` marks an exact zero (a vanishing
// factor with positive multiplicity).
struct FactoredSeries {
    Rational coeff = Rational(1);
    ExpVec shift;
    std::vector<Factor> factors;
    bool zero = false;
};

FactoredSeries fs_one();
FactoredSeries fs_mono(const Rational& c, const ExpVec& e);
FactoredSeries fs_factor(const Rational& c, const ExpVec& e, long mult = 1);

FactoredSeries fs_mul(FactoredSeries a, const FactoredSeries& b);
FactoredSeries fs_inv(FactoredSeries a);
FactoredSeries fs_pow(FactoredSeries a, long k);

// Canonical form over a table: constant factors folded into coeff,
// non-ascending factor monomials flipped via (1-cX^e) = (-c)X^e(1-c^-1 X^-e),
// factors merged by (monomial, coefficient) and sorted, zero detected.
// A vanishing factor with negative multiplicity throws StructureError.
FactoredSeries fs_normalize(const FactoredSeries& a, const VarTable& vt);

// Structural equality of canonical forms.
bool fs_equal(const FactoredSeries& a, const FactoredSeries& b, const VarTable& vt);

// Expand into a truncated series over vt.
Series fs_expand(const FactoredSeries& a, const VarTablePtr& vt);

// mul(s, fs_expand(a, vt)) computed factor by factor: binomial factors as two
// shifted copies of the running product, geometric factors as ray divisions
// when their direction is componentwise nonnegative (dense fallback
// otherwise).  Much cheaper than expanding `a` when s is large.
Series fs_apply(Series s, const FactoredSeries& a, const VarTablePtr& vt);

std::string fs_str(const FactoredSeries& a, const VarTable& vt);

// Infinite multi-base product prod_{i_1..i_k >= 0} (1 - c X^{e + sum i_j b_j}),
// truncated to the factors whose monomial is reachable inside the ordinary
// windows.  Every base must be componentwise >= 0 with a positive exponent
// in at least one ordinary variable.
FactoredSeries fs_pochhammer_inf(const VarTablePtr& vt, const Mono& arg,
                                 const std::vector<ExpVec>& bases, long mult = 1);

// Finite product prod_{i=0}^{n-1} (1 - c X^{e + i b}).
FactoredSeries fs_pochhammer_fin(const Mono& arg, const ExpVec& base, int n, long mult = 1);

}  // namespace qtno

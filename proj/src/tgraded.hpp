#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "series.hpp"

namespace qtno {

// Series in a grading variable T truncated at T^order, with coefficients
// that are Series over the inner variables.  T is kept out of the inner
// variable table; its truncation is an ordinary quotient, so dropping
// slots above the order is always sound.
struct TGraded {
    VarTablePtr vt;
    int order = 0;
    std::vector<Series> slot;  // size order+1

    TGraded() = default;
    TGraded(VarTablePtr v, int ord);

    Series& operator[](int n) { return slot[static_cast<size_t>(n)]; }
    const Series& operator[](int n) const { return slot[static_cast<size_t>(n)]; }
};

TGraded tg_zero(VarTablePtr vt, int order);
TGraded tg_one(VarTablePtr vt, int order);
// T^n * s
TGraded tg_mono(VarTablePtr vt, int order, int n, const Series& s);

TGraded operator+(const TGraded& a, const TGraded& b);
TGraded operator-(const TGraded& a, const TGraded& b);
TGraded operator*(const TGraded& a, const TGraded& b);  // convolution in T
TGraded operator*(const TGraded& a, const Rational& c);
TGraded mul_slotwise(const TGraded& a, const Series& s);

// In-place multiplication by (1 - m T^d) and by its inverse.
void tg_mul_one_minus(TGraded& a, const Mono& m, int d);
void tg_div_one_minus(TGraded& a, const Mono& m, int d);

// exp of a graded series with zero constant slot; log of one with constant
// slot 1.  Recurrences in the grading, exact per slot.
TGraded exp_T(const TGraded& a);
TGraded log_T(const TGraded& a);

// Plethystic exponential: Exp(A) = exp(sum_{r>=1} A(v^r, T^r)/r), where
// v^r raises every inner variable to its r-th power.
TGraded plethystic_exp(const TGraded& a);

// First difference in report order: grading slot ascending, then canonical
// monomial order inside the slot.
std::optional<std::pair<int, Diff>> first_difference_tg(const TGraded& a, const TGraded& b,
                                                        const Window& w);
std::optional<std::pair<int, Diff>> first_difference_tg(const TGraded& a, const TGraded& b);

}  // namespace qtno

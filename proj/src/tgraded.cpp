#include "tgraded.hpp"

namespace qtno {

TGraded::TGraded(VarTablePtr v, int ord) : vt(std::move(v)), order(ord) {
    if (ord < 0) throw ConfigError("negative grading order");
    slot.assign(static_cast<size_t>(ord) + 1, Series(vt));
}

TGraded tg_zero(VarTablePtr vt, int order) { return TGraded(std::move(vt), order); }

TGraded tg_one(VarTablePtr vt, int order) {
    TGraded r(vt, order);
    r[0] = Series::constant(vt, Rational(1));
    return r;
}

TGraded tg_mono(VarTablePtr vt, int order, int n, const Series& s) {
    TGraded r(std::move(vt), order);
    if (n < 0) throw ConfigError("negative grading exponent");
    if (n <= order) r[n] = s;
    return r;
}

namespace {

void check_compatible(const TGraded& a, const TGraded& b) {
    if (a.order != b.order || !a.vt || !b.vt || !a.vt->same(*b.vt))
        throw StructureError("graded series over different tables or orders");
}

}  // namespace

TGraded operator+(const TGraded& a, const TGraded& b) {
    check_compatible(a, b);
    TGraded r = a;
    for (int n = 0; n <= r.order; ++n) r[n] += b[n];
    return r;
}

TGraded operator-(const TGraded& a, const TGraded& b) {
    check_compatible(a, b);
    TGraded r = a;
    for (int n = 0; n <= r.order; ++n) r[n] -= b[n];
    return r;
}

TGraded operator*(const TGraded& a, const TGraded& b) {
    check_compatible(a, b);
    TGraded r(a.vt, a.order);
    for (int i = 0; i <= a.order; ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; i + j <= a.order; ++j) {
            if (b[j].is_zero()) continue;
            r[i + j] += mul(a[i], b[j]);
        }
    }
    return r;
}

TGraded operator*(const TGraded& a, const Rational& c) {
    TGraded r = a;
    for (int n = 0; n <= r.order; ++n) r[n] *= c;
    return r;
}

TGraded mul_slotwise(const TGraded& a, const Series& s) {
    TGraded r(a.vt, a.order);
    for (int n = 0; n <= a.order; ++n) r[n] = mul(a[n], s);
    return r;
}

void tg_mul_one_minus(TGraded& a, const Mono& m, int d) {
    if (d <= 0) throw ConfigError("grading degree of a factor must be positive");
    for (int n = a.order; n >= d; --n) a[n] -= mul_mono(a[n - d], m);
}

void tg_div_one_minus(TGraded& a, const Mono& m, int d) {
    if (d <= 0) throw ConfigError("grading degree of a factor must be positive");
    for (int n = d; n <= a.order; ++n) a[n] += mul_mono(a[n - d], m);
}

TGraded exp_T(const TGraded& a) {
    if (!a[0].is_zero()) throw StructureError("exp of a graded series with a constant slot");
    TGraded e = tg_one(a.vt, a.order);
    for (int n = 1; n <= a.order; ++n) {
        Series acc(a.vt);
        for (int r = 1; r <= n; ++r) {
            if (a[r].is_zero()) continue;
            acc += mul(a[r], e[n - r]) * Rational(r);
        }
        e[n] = acc * Rational(1, n);
    }
    return e;
}

TGraded log_T(const TGraded& a) {
    if (first_difference(a[0], Series::constant(a.vt, Rational(1))).has_value())
        throw StructureError("log of a graded series whose constant slot is not 1");
    TGraded l = tg_zero(a.vt, a.order);
    for (int n = 1; n <= a.order; ++n) {
        Series acc = a[n];
        for (int r = 1; r < n; ++r) {
            if (l[r].is_zero() || a[n - r].is_zero()) continue;
            acc -= mul(l[r], a[n - r]) * Rational(r, n);
        }
        l[n] = acc;
    }
    return l;
}

TGraded plethystic_exp(const TGraded& a) {
    if (!a[0].is_zero())
        throw StructureError("plethystic exp of a graded series with a constant slot");
    TGraded sum = tg_zero(a.vt, a.order);
    for (int r = 1; r <= a.order; ++r) {
        for (int n = 1; r * n <= a.order; ++n) {
            if (a[n].is_zero()) continue;
            sum[r * n] += scale_vars(a[n], r) * Rational(1, r);
        }
    }
    return exp_T(sum);
}

std::optional<std::pair<int, Diff>> first_difference_tg(const TGraded& a, const TGraded& b,
                                                        const Window& w) {
    check_compatible(a, b);
    for (int n = 0; n <= a.order; ++n)
        if (auto d = first_difference(a[n], b[n], w)) return std::make_pair(n, *d);
    return std::nullopt;
}

std::optional<std::pair<int, Diff>> first_difference_tg(const TGraded& a, const TGraded& b) {
    check_compatible(a, b);
    return first_difference_tg(a, b, Window::full(*a.vt));
}

}  // namespace qtno

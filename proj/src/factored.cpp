#include "factored.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qtno {

FactoredSeries fs_one() { return FactoredSeries{}; }

FactoredSeries fs_mono(const Rational& c, const ExpVec& e) {
    FactoredSeries f;
    f.coeff = c;
    f.shift = e;
    f.zero = c.is_zero();
    return f;
}

FactoredSeries fs_factor(const Rational& c, const ExpVec& e, long mult) {
    FactoredSeries f;
    if (mult != 0) f.factors.push_back(Factor{c, e, mult});
    return f;
}

FactoredSeries fs_mul(FactoredSeries a, const FactoredSeries& b) {
    if (a.zero || b.zero) return fs_mono(Rational(0), ExpVec{});
    a.coeff *= b.coeff;
    a.shift = a.shift + b.shift;
    a.factors.insert(a.factors.end(), b.factors.begin(), b.factors.end());
    return a;
}

FactoredSeries fs_inv(FactoredSeries a) {
    if (a.zero || a.coeff.is_zero()) throw StructureError("inverse of a vanishing product");
    a.coeff = a.coeff.inv();
    a.shift = -a.shift;
    for (auto& f : a.factors) f.mult = -f.mult;
    return a;
}

FactoredSeries fs_pow(FactoredSeries a, long k) {
    if (k == 0) return fs_one();
    if (a.zero) {
        if (k < 0) throw StructureError("inverse of a vanishing product");
        return a;
    }
    a.coeff = a.coeff.pow(k);
    ExpVec s;
    for (int v = 0; v < kMaxVars; ++v) s[v] = static_cast<int16_t>(k * a.shift[v]);
    a.shift = s;
    for (auto& f : a.factors) f.mult *= k;
    return a;
}

FactoredSeries fs_normalize(const FactoredSeries& a, const VarTable& vt) {
    if (a.zero || a.coeff.is_zero()) return fs_mono(Rational(0), ExpVec{});
    FactoredSeries r;
    r.coeff = a.coeff;
    r.shift = a.shift;
    std::map<std::pair<ExpVec, Rational>, long> merged;
    long zero_mult = 0;
    for (const auto& f : a.factors) {
        if (f.mult == 0) continue;
        Rational c = f.c;
        ExpVec e = f.e;
        long m = f.mult;
        if (c.is_zero()) continue;  // factor is identically 1
        if (!e.is_zero() && !ascending_dir(vt, e)) {
            // (1 - c X^e) = (-c) X^e (1 - c^-1 X^-e)
            r.coeff *= (-c).pow(m);
            for (int v = 0; v < kMaxVars; ++v)
                r.shift[v] = static_cast<int16_t>(r.shift[v] + m * e[v]);
            c = c.inv();
            e = -e;
        }
        if (e.is_zero()) {
            if (c == Rational(1)) {
                zero_mult += m;
                continue;
            }
            r.coeff *= (Rational(1) - c).pow(m);
            continue;
        }
        merged[{e, c}] += m;
    }
    if (zero_mult > 0) return fs_mono(Rational(0), ExpVec{});
    if (zero_mult < 0) throw StructureError("division by a vanishing factor");
    for (const auto& [key, m] : merged)
        if (m != 0) r.factors.push_back(Factor{key.second, key.first, m});
    return r;
}

bool fs_equal(const FactoredSeries& a, const FactoredSeries& b, const VarTable& vt) {
    FactoredSeries x = fs_normalize(a, vt), y = fs_normalize(b, vt);
    if (x.zero != y.zero) return false;
    if (x.zero) return true;
    if (!(x.coeff == y.coeff) || x.shift != y.shift || x.factors.size() != y.factors.size())
        return false;
    for (size_t i = 0; i < x.factors.size(); ++i) {
        if (!(x.factors[i].c == y.factors[i].c) || x.factors[i].e != y.factors[i].e ||
            x.factors[i].mult != y.factors[i].mult)
            return false;
    }
    return true;
}

Series fs_expand(const FactoredSeries& a, const VarTablePtr& vt) {
    FactoredSeries n = fs_normalize(a, *vt);
    if (n.zero) return Series(vt);
    Series acc = Series::constant(vt, Rational(1));
    for (const auto& f : n.factors) {
        if (f.mult > 0) {
            for (long i = 0; i < f.mult; ++i) acc -= mul_mono(acc, Mono{f.c, f.e});
        } else {
            Series g = geometric(vt, Mono{f.c, f.e});
            for (long i = 0; i < -f.mult; ++i) acc = mul(acc, g);
        }
    }
    return mul_mono(acc, Mono{n.coeff, n.shift});
}

Series fs_apply(Series s, const FactoredSeries& a, const VarTablePtr& vt) {
    FactoredSeries n = fs_normalize(a, *vt);
    if (n.zero) return Series(vt);
    for (const auto& f : n.factors) {
        if (f.mult > 0) {
            for (long i = 0; i < f.mult; ++i) s = mul_one_minus(s, Mono{f.c, f.e});
        } else {
            bool nonneg = true;
            for (int v = 0; v < vt->nvars(); ++v)
                if (f.e[v] < 0) nonneg = false;
            if (nonneg) {
                for (long i = 0; i < -f.mult; ++i) s = div_one_minus(s, Mono{f.c, f.e});
            } else {
                Series g = geometric(vt, Mono{f.c, f.e});
                for (long i = 0; i < -f.mult; ++i) s = mul(s, g);
            }
        }
    }
    return mul_mono(s, Mono{n.coeff, n.shift});
}

std::string fs_str(const FactoredSeries& a, const VarTable& vt) {
    if (a.zero) return "0";
    std::ostringstream os;
    os << a.coeff.str();
    if (!a.shift.is_zero()) os << "*" << mono_str(vt, a.shift);
    for (const auto& f : a.factors) {
        os << " * (1 - " << term_str(vt, f.e, f.c) << ")";
        if (f.mult != 1) os << "^" << f.mult;
    }
    return os.str();
}

namespace {

bool ordinary_reachable(const VarTable& vt, const ExpVec& e) {
    for (int v = 0; v < vt.nvars(); ++v)
        if (!vt.var(v).laurent() && e[v] > vt.var(v).max_exp) return false;
    return true;
}

void poch_rec(const VarTablePtr& vt, const Mono& arg, const std::vector<ExpVec>& bases,
              size_t j, const ExpVec& e, long mult, FactoredSeries& out) {
    if (j == bases.size()) {
        out.factors.push_back(Factor{arg.c, e, mult});
        return;
    }
    ExpVec cur = e;
    while (ordinary_reachable(*vt, cur)) {
        poch_rec(vt, arg, bases, j + 1, cur, mult, out);
        cur = cur + bases[j];
    }
}

}  // namespace

FactoredSeries fs_pochhammer_inf(const VarTablePtr& vt, const Mono& arg,
                                 const std::vector<ExpVec>& bases, long mult) {
    for (const auto& b : bases) {
        bool ord_pos = false;
        for (int v = 0; v < vt->nvars(); ++v) {
            if (b[v] < 0)
                throw StructureError("infinite product base must be componentwise nonnegative");
            if (b[v] > 0 && !vt->var(v).laurent()) ord_pos = true;
        }
        if (!ord_pos)
            throw StructureError("infinite product base needs a positive ordinary exponent");
    }
    FactoredSeries out;
    if (mult != 0 && !arg.c.is_zero()) poch_rec(vt, arg, bases, 0, arg.e, mult, out);
    return out;
}

FactoredSeries fs_pochhammer_fin(const Mono& arg, const ExpVec& base, int n, long mult) {
    if (n < 0) throw ConfigError("finite product length must be >= 0");
    FactoredSeries out;
    if (mult == 0 || arg.c.is_zero()) return out;
    ExpVec cur = arg.e;
    for (int i = 0; i < n; ++i) {
        out.factors.push_back(Factor{arg.c, cur, mult});
        cur = cur + base;
    }
    return out;
}

}  // namespace qtno

#include "hooks.hpp"

namespace qtno {

Mono var_mono(const VarTablePtr& vt, const std::string& name, int k) {
    return Mono{Rational(1), ExpVec::unit(vt->require(name), static_cast<int16_t>(k))};
}

FactoredSeries fs_hook_c(const Partition& lam, const Mono& q, const Mono& t) {
    FactoredSeries r;
    for (const auto& s : cells(lam)) {
        Mono m = mono_mul(mono_pow(q, s.arm), mono_pow(t, s.leg + 1));
        r.factors.push_back(Factor{m.c, m.e, 1});
    }
    return r;
}

FactoredSeries fs_hook_cprime(const Partition& lam, const Mono& q, const Mono& t) {
    FactoredSeries r;
    for (const auto& s : cells(lam)) {
        Mono m = mono_mul(mono_pow(q, s.arm + 1), mono_pow(t, s.leg));
        r.factors.push_back(Factor{m.c, m.e, 1});
    }
    return r;
}

FactoredSeries fs_hook_b(const Partition& lam, const Mono& q, const Mono& t) {
    return fs_mul(fs_hook_c(lam, q, t), fs_inv(fs_hook_cprime(lam, q, t)));
}

FactoredSeries fs_poch_lambda(const Partition& lam, const Mono& z, const Mono& q, const Mono& t) {
    FactoredSeries r;
    for (const auto& s : cells(lam)) {
        Mono m = mono_mul(z, mono_mul(mono_pow(q, s.coarm), mono_pow(t, -s.coleg)));
        r.factors.push_back(Factor{m.c, m.e, 1});
    }
    return r;
}

FactoredSeries fs_qtno_summand(const Partition& lam, const Mono& u, const Mono& q,
                               const Mono& t) {
    FactoredSeries r;
    for (const auto& s : cells(lam)) {
        Mono qa1tl = mono_mul(mono_pow(q, s.arm + 1), mono_pow(t, s.leg));
        Mono qatl1 = mono_mul(mono_pow(q, s.arm), mono_pow(t, s.leg + 1));
        Mono un = mono_mul(u, qa1tl);
        Mono ud = mono_mul(mono_pow(u, -1), qatl1);
        r.factors.push_back(Factor{un.c, un.e, 1});
        r.factors.push_back(Factor{ud.c, ud.e, 1});
        r.factors.push_back(Factor{qa1tl.c, qa1tl.e, -1});
        r.factors.push_back(Factor{qatl1.c, qatl1.e, -1});
    }
    return r;
}

FactoredSeries fs_genus_hook(const Partition& lam, int g, const Mono& Z, const Mono& W) {
    Mono pre{Rational(1), ExpVec{}};
    FactoredSeries r;
    for (const auto& s : cells(lam)) {
        // Each parenthesis at (z, w) = (Z, 1/W) is -W^(-k) (1 - monomial); the
        // two denominator signs cancel and the numerator ones come in pairs.
        pre = mono_mul(pre, mono_pow(W, (1 - g) * (4 * s.leg + 2)));
        Mono num = mono_mul(mono_pow(Z, 2 * s.arm + 1), mono_pow(W, 2 * s.leg + 1));
        Mono d1 = mono_mul(mono_pow(Z, 2 * s.arm + 2), mono_pow(W, 2 * s.leg));
        Mono d2 = mono_mul(mono_pow(Z, 2 * s.arm), mono_pow(W, 2 * s.leg + 2));
        if (g != 0) r.factors.push_back(Factor{num.c, num.e, 2L * g});
        r.factors.push_back(Factor{d1.c, d1.e, -1});
        r.factors.push_back(Factor{d2.c, d2.e, -1});
    }
    return fs_mul(fs_mono(pre.c, pre.e), r);
}

}  // namespace qtno

#include "nekrasov.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "factored.hpp"
#include "hooks.hpp"

namespace qtno {

namespace {

std::optional<Diff> diff_in_claims(const Series& a, const Series& b) {
    const VarTable& vt = *a.table();
    Window w = Window::full(vt);
    for (int v = 0; v < vt.nvars(); ++v)
        w.hi[static_cast<size_t>(v)] = std::min(
            {w.hi[static_cast<size_t>(v)], a.claimed_top(v), b.claimed_top(v)});
    return first_difference(a, b, w);
}

std::string diff_str(const VarTable& vt, int slot, const Diff& d) {
    std::ostringstream os;
    os << "T^" << slot << " at " << mono_str(vt, d.e) << ": " << d.lhs.str() << " vs "
       << d.rhs.str();
    return os.str();
}

// Box partitions la_1 <= m, length <= n of a given size.
std::vector<Partition> box_of_size(int k, int n, int m) {
    std::vector<Partition> out;
    if (k == 0) {
        out.push_back({});
        return out;
    }
    for (auto& la : all_of_size(k))
        if ((int)la.size() <= n && la[0] <= m) out.push_back(std::move(la));
    return out;
}

}  // namespace

// ===========================================================================
// Main u-deformed identity.
// ===========================================================================

VarTablePtr qt_hook_table(int deg, int ulo, int uhi) {
    return VarTable::make({{"q", 0, deg}, {"t", 0, deg}, {"u", ulo, uhi}});
}

TGraded qt_hook_sum(int K, const VarTablePtr& vt) {
    Mono q = var_mono(vt, "q"), t = var_mono(vt, "t"), u = var_mono(vt, "u");
    TGraded s = tg_zero(vt, K);
    s[0] = Series::constant(vt, Rational(1));
    for (int k = 1; k <= K; ++k)
        for (const auto& la : all_of_size(k)) s[k] += fs_expand(fs_qtno_summand(la, u, q, t), vt);
    return s;
}

TGraded qt_hook_product(int K, const VarTablePtr& vt) {
    Mono q = var_mono(vt, "q"), t = var_mono(vt, "t"), u = var_mono(vt, "u");
    Series seed = Series::constant(vt, Rational(1));
    seed += Series::monomial(vt, Rational(1), mono_mul(q, t).e);
    seed -= Series::monomial(vt, Rational(1), mono_mul(u, q).e);
    seed -= Series::monomial(vt, Rational(1), mono_mul(mono_pow(u, -1), t).e);
    seed = div_one_minus(seed, q);
    seed = div_one_minus(seed, t);
    TGraded a = tg_zero(vt, K);
    for (int n = 1; n <= K; ++n) a[n] = seed;
    return plethystic_exp(a);
}

// ===========================================================================
// t = q: hook multisets.
// ===========================================================================

VarTablePtr hook_multiset_table(int deg, int ulo, int uhi) {
    return VarTable::make({{"q", 0, deg}, {"u", ulo, uhi}});
}

TGraded hook_multiset_sum(int K, const VarTablePtr& vt) {
    Mono q = var_mono(vt, "q"), u = var_mono(vt, "u");
    TGraded s = tg_zero(vt, K);
    s[0] = Series::constant(vt, Rational(1));
    // With both cell parameters equal, the per-cell ratio depends only on the
    // hook length a + l + 1.
    for (int k = 1; k <= K; ++k)
        for (const auto& la : all_of_size(k)) s[k] += fs_expand(fs_qtno_summand(la, u, q, q), vt);
    return s;
}

TGraded hook_multiset_product(int K, const VarTablePtr& vt) {
    Mono q = var_mono(vt, "q"), u = var_mono(vt, "u");
    Series seed = Series::constant(vt, Rational(1));
    seed += Series::monomial(vt, Rational(1), mono_pow(q, 2).e);
    seed -= Series::monomial(vt, Rational(1), mono_mul(u, q).e);
    seed -= Series::monomial(vt, Rational(1), mono_mul(mono_pow(u, -1), q).e);
    seed = div_one_minus(seed, q);
    seed = div_one_minus(seed, q);
    TGraded a = tg_zero(vt, K);
    for (int n = 1; n <= K; ++n) a[n] = seed;
    return plethystic_exp(a);
}

// ===========================================================================
// Hook squares.
// ===========================================================================

VarTablePtr hook_square_table(int K) { return VarTable::make({{"s", 0, K}}); }

TGraded hook_square_sum(int K, const VarTablePtr& vt) {
    ExpVec se = var_mono(vt, "s").e;
    TGraded out = tg_zero(vt, K);
    out[0] = Series::constant(vt, Rational(1));
    for (int k = 1; k <= K; ++k)
        for (const auto& la : all_of_size(k)) {
            FactoredSeries f;
            for (int h : hooks_multiset(la))
                f.factors.push_back(Factor{Rational(1, (long)h * h), se, 1});
            out[k] += fs_expand(f, vt);
        }
    return out;
}

TGraded hook_square_product(int K, const VarTablePtr& vt) {
    ExpVec se = var_mono(vt, "s").e;
    TGraded l = tg_zero(vt, K);
    for (int n = 1; n <= K; ++n) {
        Rational c(0);
        for (long d : divisors(n)) c += Rational(1, d);
        l[n] = Series::constant(vt, c) - Series::monomial(vt, c, se);
    }
    return exp_T(l);
}

// ===========================================================================
// Genus-weighted hook functions.
// ===========================================================================

VarTablePtr genus_hook_table(int deg, int g, int n_max) {
    int wb = -2;
    if (g >= 2) wb += (1 - g) * 2 * n_max * n_max;  // deepest normalizing prefactor
    return VarTable::make({{"Z", 0, deg}, {"W", wb, deg}});
}

TGraded genus_hook_sum(int g, int K, const VarTablePtr& vt) {
    Mono Z = var_mono(vt, "Z"), W = var_mono(vt, "W");
    TGraded s = tg_zero(vt, K);
    s[0] = Series::constant(vt, Rational(1));
    for (int k = 1; k <= K; ++k)
        for (const auto& la : all_of_size(k)) s[k] += fs_expand(fs_genus_hook(la, g, Z, W), vt);
    return s;
}

TGraded genus0_product(int K, const VarTablePtr& vt) {
    Mono z2 = var_mono(vt, "Z", 2), w2 = var_mono(vt, "W", 2);
    Series seed = mul(geometric(vt, z2), geometric(vt, w2));
    seed = mul_mono(seed, w2);
    TGraded a = tg_zero(vt, K);
    a[1] = seed;
    return plethystic_exp(a);
}

TGraded genus1_product(int K, const VarTablePtr& vt) {
    Mono z2 = var_mono(vt, "Z", 2), w2 = var_mono(vt, "W", 2);
    Mono zw = mono_mul(var_mono(vt, "Z"), var_mono(vt, "W"));
    Series seed = Series::constant(vt, Rational(1));
    seed = mul_one_minus(seed, zw);
    seed = mul_one_minus(seed, zw);
    seed = div_one_minus(seed, z2);
    seed = div_one_minus(seed, w2);
    TGraded a = tg_zero(vt, K);
    for (int n = 1; n <= K; ++n) a[n] = seed;
    return plethystic_exp(a);
}

HrvReport hrv_pipeline(int g, int n_max, int deg) {
    HrvReport rep;
    rep.g = g;
    rep.n_max = n_max;
    rep.deg = deg;
    auto vt = genus_hook_table(deg, g, n_max);
    int zi = vt->require("Z"), wi = vt->require("W");

    TGraded S = genus_hook_sum(g, n_max, vt);
    TGraded L = log_T(S);
    rep.hbar.assign(static_cast<size_t>(n_max) + 1, Series(vt));
    for (int n = 1; n <= n_max; ++n) {
        Series acc(vt);
        for (long d : divisors(n)) {
            int mu = mobius(d);
            if (mu == 0) continue;
            // U_{n/d} with both variables raised to the d-th power
            Series u = scale_vars(L[(int)(n / d)], (int)d) * Rational(n / d);
            acc += u * Rational(mu);
        }
        acc = mul_one_minus(acc, Mono{Rational(1), ExpVec::unit(zi, 2)});
        acc = mul_one_minus(acc, Mono{Rational(1), ExpVec::unit(wi, -2)});
        rep.hbar[static_cast<size_t>(n)] = acc * Rational(-1, n);
    }

    for (int n = 1; n <= n_max && rep.detail.empty(); ++n) {
        const Series& h = rep.hbar[static_cast<size_t>(n)];
        if (g == 1) {
            ExpVec zwinv{};
            zwinv[zi] = 1;
            zwinv[wi] = -1;
            Series target = Series::monomial(vt, Rational(1), ExpVec::unit(zi, 2));
            target += Series::monomial(vt, Rational(1), ExpVec::unit(wi, -2));
            target -= Series::monomial(vt, Rational(2), zwinv);
            if (auto d = diff_in_claims(h, target)) {
                rep.closed_form_pass = false;
                rep.detail = "reduced trace " + std::to_string(n) + ": " + diff_str(*vt, n, *d);
            }
        } else if (g == 0) {
            // The scale-invariance of the degree-n log slot collapses the
            // reduced trace to 1 at n = 1 and 0 beyond; the closed product
            // form W^{2n}/((1-Z^{2n})(1-W^{2n})) is carried by the unreduced
            // slot n * L[n] itself.
            Series un = L[n] * Rational(n);
            Series target = mul(geometric(vt, Mono{Rational(1), ExpVec::unit(zi, 2 * n)}),
                                geometric(vt, Mono{Rational(1), ExpVec::unit(wi, 2 * n)}));
            target = mul_mono(target, Mono{Rational(1), ExpVec::unit(wi, 2 * n)});
            if (auto d = diff_in_claims(un, target)) {
                rep.closed_form_pass = false;
                rep.detail = "scaled log " + std::to_string(n) + ": " + diff_str(*vt, n, *d);
            }
            Series collapsed = (n == 1) ? Series::constant(vt, Rational(1)) : Series(vt);
            if (rep.detail.empty()) {
                if (auto d = diff_in_claims(h, collapsed)) {
                    rep.closed_form_pass = false;
                    rep.detail = "reduced trace " + std::to_string(n) + ": " + diff_str(*vt, n, *d);
                }
            }
        }
    }

    if (g >= 1) {
        // Sign/polynomiality evidence for hbar_n at (z, -w): the recorded
        // series lives at (Z, W) = (z, 1/w), so a term c Z^i W^e is the
        // z^i w^{-e} coefficient and picks up (-1)^e under w -> -w.
        for (int n = 1; n <= n_max; ++n) {
            const Series& h = rep.hbar[static_cast<size_t>(n)];
            for (const auto& [e, c] : h.terms()) {
                if (e[zi] > h.claimed_top(zi) || e[wi] > h.claimed_top(wi)) continue;
                ++rep.evidence_checked;
                bool neg = c < Rational(0);
                bool odd = (e[wi] % 2) != 0;
                if (neg != odd) ++rep.evidence_violations;   // (-1)^e c < 0
                if (e[wi] > 0) ++rep.evidence_violations;    // not a polynomial in w
                rep.max_weight = std::max(rep.max_weight, e[zi] - e[wi]);
            }
        }
    }
    return rep;
}

// ===========================================================================
// f_{n,m}: three builders.
// ===========================================================================

VarTablePtr fnm_table(int n, int m, int J) {
    return VarTable::make({{"q", 0, J}, {"t", 0, J}, {"u", -n * m, n * m}});
}

TGraded fnm_hook_form(int n, int m, const VarTablePtr& vt, int max_slot) {
    Mono q = var_mono(vt, "q"), t = var_mono(vt, "t"), u = var_mono(vt, "u");
    int nm = n * m;
    int order = max_slot >= 0 ? std::min(nm, max_slot) : nm;
    TGraded out = tg_zero(vt, order);
    for (int k = 0; k <= order; ++k) {
        for (const auto& la : box_of_size(k, n, m)) {
            FactoredSeries f = fs_qtno_summand(la, u, q, t);
            for (const auto& s : cells(la)) {
                Mono a1 = mono_mul(mono_pow(q, s.coarm), mono_pow(t, n - s.coleg));
                Mono a2 = mono_mul(mono_pow(q, m - s.coarm), mono_pow(t, s.coleg));
                Mono b1 = mono_mul(u, mono_mul(mono_pow(q, s.coarm + 1),
                                               mono_pow(t, n - s.coleg - 1)));
                Mono b2 = mono_mul(u, a2);
                f.factors.push_back(Factor{a1.c, a1.e, 1});
                f.factors.push_back(Factor{a2.c, a2.e, 1});
                f.factors.push_back(Factor{b1.c, b1.e, -1});
                f.factors.push_back(Factor{b2.c, b2.e, -1});
            }
            out[k] += fs_expand(f, vt);
        }
    }
    FactoredSeries box;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j) {
            Mono e = mono_mul(u, mono_mul(mono_pow(q, j), mono_pow(t, i - 1)));
            box.factors.push_back(Factor{e.c, e.e, 1});
        }
    return mul_slotwise(out, fs_expand(box, vt));
}

TGraded fnm_single_sum(int n, int m, const VarTablePtr& vt) {
    int nm = n * m;
    int J = vt->var(vt->require("q")).max_exp;
    long Dq = (long)n * m * (m - 1) / 2;        // deepest q-dip of the box product
    long Dt = (long)m * n * (n + 1) / 2;        // deepest t-dip
    auto vt2 = VarTable::make({{"q", (int)-Dq, (int)(J + Dq)},
                               {"t", (int)-Dt, (int)(J + Dt)},
                               {"u", 0, nm}});
    Mono q2 = var_mono(vt2, "q"), t2 = var_mono(vt2, "t"), u2 = var_mono(vt2, "u");
    int t2i = vt2->require("t");

    std::vector<Series> cls(static_cast<size_t>(nm) + 1, Series(vt2));
    for (const auto& la : in_box(m, n)) {
        int a = part_size(la);
        Partition lc = conjugate(la);
        FactoredSeries f = fs_mul(principal_P_fs(la, n, q2, t2), principal_P_fs(lc, m, t2, q2));
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= m; ++j) {
                int lai = i <= (int)la.size() ? la[static_cast<size_t>(i - 1)] : 0;
                int lcj = j <= (int)lc.size() ? lc[static_cast<size_t>(j - 1)] : 0;
                Mono e = mono_mul(u2, mono_mul(mono_pow(q2, j - lai), mono_pow(t2, i - lcj - 1)));
                f.factors.push_back(Factor{e.c, e.e, 1});
            }
        Series v = fs_expand(f, vt2);
        v = mul_mono(v, Mono{Rational(a % 2 ? -1 : 1), ExpVec::unit(t2i, a)});
        cls[static_cast<size_t>(a)] += v;
    }

    int ui = vt->require("u");
    TGraded out = tg_zero(vt, nm);
    for (int a = 0; a <= nm; ++a) {
        ExpVec sh{};
        sh[ui] = static_cast<int16_t>(-a);
        out[a] = transplant(cls[static_cast<size_t>(a)], vt, sh);
    }
    return out;
}

TGraded fnm_double_sum(int n, int m, const VarTablePtr& vt, int jobs) {
    int nm = n * m;
    int J = vt->var(vt->require("q")).max_exp;
    long Kq = (long)n * m * (m + 1) / 2;        // q-shift of the empty class
    long Kt = (long)m * n * (n - 1) / 2;        // t-shift of the empty class

    // Per-|la| sandboxes: class (|la|, |mu|) lands at q-shift Kq - m(|la|+|mu|),
    // so exponents up to J + max(0, m(|la|+nm) - Kq) can still reach the window.
    std::vector<VarTablePtr> vts(static_cast<size_t>(nm) + 1);
    for (int a = 0; a <= nm; ++a) {
        int tq = (int)(J + std::max(0L, (long)m * (a + nm) - Kq));
        int tt = (int)(J + std::max(0L, (long)(n - 1) * (a + nm) - Kt));
        vts[static_cast<size_t>(a)] = VarTable::make({{"q", 0, tq}, {"t", 0, tt}});
    }

    std::vector<std::vector<Series>> cls(static_cast<size_t>(nm) + 1);
    for (int a = 0; a <= nm; ++a)
        cls[static_cast<size_t>(a)].assign(static_cast<size_t>(nm) + 1,
                                           Series(vts[static_cast<size_t>(a)]));

    std::vector<Partition> tasks = in_box(m, n);
    std::sort(tasks.begin(), tasks.end(), [](const Partition& x, const Partition& y) {
        return part_size(x) > part_size(y);
    });
    std::vector<Partition> targets_c = in_box(m, n), targets_d = in_box(n, m);

    std::atomic<size_t> next{0};
    std::vector<std::mutex> mx(static_cast<size_t>(nm) + 1);
    std::mutex fail_mx;
    std::string failure;

    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Partition& la = tasks[i];
            int a = part_size(la);
            const VarTablePtr& sv = vts[static_cast<size_t>(a)];
            try {
                Mono q = var_mono(sv, "q"), t = var_mono(sv, "t");
                MacParams pqt{sv, q, t}, ptq{sv, t, q};
                Partition lc = conjugate(la);
                FactoredSeries ab =
                    fs_mul(principal_P_fs(la, n, q, t), principal_P_fs(lc, m, t, q));
                std::vector<Mono> ec, ed;
                for (int r = 1; r <= n; ++r) {
                    int lar = r <= (int)la.size() ? la[static_cast<size_t>(r - 1)] : 0;
                    ec.push_back(mono_mul(mono_pow(q, lar), mono_pow(t, n - r)));
                }
                for (int r = 1; r <= m; ++r) {
                    int lcr = r <= (int)lc.size() ? lc[static_cast<size_t>(r - 1)] : 0;
                    ed.push_back(mono_mul(mono_pow(t, lcr), mono_pow(q, m - r)));
                }
                auto C = eval_skew_alphabet_batch(Kind::P, targets_c, {}, ec, pqt);
                auto D = eval_skew_alphabet_batch(Kind::P, targets_d, {}, ed, ptq);
                std::vector<Series> local(static_cast<size_t>(nm) + 1, Series(sv));
                for (const auto& mu : targets_c) {
                    Series s = mul(C.at(mu), D.at(conjugate(mu)));
                    if (s.is_zero()) continue;
                    s = fs_apply(std::move(s), ab, sv);
                    local[static_cast<size_t>(part_size(mu))] += s;
                }
                std::lock_guard<std::mutex> lk(mx[static_cast<size_t>(a)]);
                for (int b = 0; b <= nm; ++b)
                    cls[static_cast<size_t>(a)][static_cast<size_t>(b)] +=
                        local[static_cast<size_t>(b)];
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(fail_mx);
                if (failure.empty())
                    failure = "pair sum at " + partition_str(la) + ": " + e.what();
            }
        }
    };

    int nthreads = jobs > 0 ? jobs
                            : (int)std::min<unsigned>(
                                  8, std::max<unsigned>(1, std::thread::hardware_concurrency()));
    nthreads = std::min<int>(nthreads, (int)tasks.size());
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (!failure.empty()) throw StructureError(failure);

    int ui = vt->require("u"), qi = vt->require("q"), ti = vt->require("t");
    TGraded out = tg_zero(vt, nm);
    for (int a = 0; a <= nm; ++a)
        for (int b = 0; b <= nm; ++b) {
            const Series& w = cls[static_cast<size_t>(a)][static_cast<size_t>(b)];
            if (w.is_zero()) continue;
            long s = a + b;
            ExpVec sh{};
            sh[qi] = static_cast<int16_t>(Kq - m * s);
            sh[ti] = static_cast<int16_t>(Kt - (n - 1) * s);
            sh[ui] = static_cast<int16_t>(nm - s);
            Rational sign(((nm - s) % 2) ? -1 : 1);
            out[a] += transplant(w * sign, vt, sh);
        }
    return out;
}

FnmResult fnm(int n, int m, int J, int jobs) {
    FnmResult r;
    r.n = n;
    r.m = m;
    r.J = J;
    auto vt = fnm_table(n, m, J);
    r.double_sum = fnm_double_sum(n, m, vt, jobs);
    r.single_sum = fnm_single_sum(n, m, vt);
    r.hook_form = fnm_hook_form(n, m, vt);

    int nm = n * m;
    int ui = vt->require("u"), qi = vt->require("q"), ti = vt->require("t");
    auto require_claims = [&](const TGraded& f, const char* who) {
        for (int k = 0; k <= nm; ++k) {
            if (f[k].claimed_top(qi) < J || f[k].claimed_top(ti) < J ||
                f[k].claimed_top(ui) < nm - k)
                throw StructureError(std::string(who) +
                                     ": claims fall short of the structural box at T^" +
                                     std::to_string(k));
        }
    };
    require_claims(r.double_sum, "pair sum");
    require_claims(r.single_sum, "single sum");
    require_claims(r.hook_form, "hook form");

    auto cmp = [&](const TGraded& x, const TGraded& y, const char* names) {
        for (int k = 0; k <= nm; ++k) {
            Window w = Window::full(*vt);
            w.hi[static_cast<size_t>(ui)] = nm - k;
            if (auto d = first_difference(x[k], y[k], w))
                throw StructureError(std::string(names) + " disagree: " + diff_str(*vt, k, *d));
        }
    };
    cmp(r.double_sum, r.single_sum, "pair sum and single sum");
    cmp(r.double_sum, r.hook_form, "pair sum and hook form");
    return r;
}

// ===========================================================================
// Views and checks.
// ===========================================================================

const QtMap* TgView::get(int k, int b) const {
    auto it = slice.find({k, b});
    return it == slice.end() ? nullptr : &it->second;
}

TgView tg_view(const TGraded& a) {
    const VarTablePtr& vt = a.vt;
    int qi = vt->require("q"), ti = vt->require("t"), ui = vt->require("u");
    TgView v;
    v.order = a.order;
    for (int k = 0; k <= a.order; ++k) {
        // Terms above a slot's claimed top are quotient leftovers of dropped
        // higher content, not coefficients of the represented object.
        auto inside = [&](const ExpVec& e) {
            for (int x = 0; x < vt->nvars(); ++x)
                if (e[x] > a[k].claimed_top(x)) return false;
            return true;
        };
        for (const auto& [e, c] : a[k].terms()) {
            for (int x = 0; x < vt->nvars(); ++x)
                if (x != qi && x != ti && x != ui && e[x] != 0)
                    throw ConfigError("tg_view: a variable besides q, t, u appears");
            if (inside(e)) v.slice[{k, e[ui]}][{e[qi], e[ti]}] += c;
        }
    }
    for (auto it = v.slice.begin(); it != v.slice.end();) {
        auto& mp = it->second;
        for (auto jt = mp.begin(); jt != mp.end();)
            jt = jt->second.is_zero() ? mp.erase(jt) : std::next(jt);
        it = mp.empty() ? v.slice.erase(it) : std::next(it);
    }
    return v;
}

namespace {

Rational map_at(const QtMap* m, int x, int y) {
    if (!m) return Rational(0);
    auto it = m->find({x, y});
    return it == m->end() ? Rational(0) : it->second;
}

// Compare two shifted slices on the box x, y <= cap (negative coordinates
// included: entries escaping a nonnegative support must cancel).
bool shifted_equal(const QtMap* A, std::pair<int, int> sa, const QtMap* B,
                   std::pair<int, int> sb, int cap, std::string* why) {
    auto scan = [&](const QtMap* src, std::pair<int, int> sh) -> std::optional<std::string> {
        if (!src) return std::nullopt;
        for (const auto& [xy, c] : *src) {
            int x = xy.first + sh.first, y = xy.second + sh.second;
            if (x > cap || y > cap) continue;
            Rational lhs = map_at(A, x - sa.first, y - sa.second);
            Rational rhs = map_at(B, x - sb.first, y - sb.second);
            if (lhs != rhs) {
                std::ostringstream os;
                os << "q^" << x << " t^" << y << ": " << lhs.str() << " vs " << rhs.str();
                return os.str();
            }
        }
        return std::nullopt;
    };
    for (auto* p : {A, B}) {
        auto bad = scan(p, p == A ? sa : sb);
        if (bad) {
            *why = *bad;
            return false;
        }
    }
    return true;
}

QtMap box_product_map(int n, int m) {
    QtMap p{{{0, 0}, Rational(1)}};
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j) {
            QtMap np = p;
            for (const auto& [xy, c] : p) np[{xy.first + j, xy.second + i}] -= c;
            for (auto it = np.begin(); it != np.end();)
                it = it->second.is_zero() ? np.erase(it) : std::next(it);
            p = std::move(np);
        }
    return p;
}

// Elementary symmetric polynomials of the alphabet {q^{j-1} t^i : i<=n, j<=m}.
std::vector<QtMap> elementary_maps(int n, int m, int kmax) {
    std::vector<QtMap> e(static_cast<size_t>(kmax) + 1);
    e[0][{0, 0}] = Rational(1);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j)
            for (int k = kmax - 1; k >= 0; --k) {
                if (e[static_cast<size_t>(k)].empty()) continue;
                for (const auto& [xy, c] : e[static_cast<size_t>(k)])
                    e[static_cast<size_t>(k) + 1][{xy.first + j - 1, xy.second + i}] += c;
            }
    for (auto& mp : e)
        for (auto it = mp.begin(); it != mp.end();)
            it = it->second.is_zero() ? mp.erase(it) : std::next(it);
    return e;
}

// Equality of exact maps restricted to x <= xcap, y <= ycap.
bool maps_equal_boxed(const QtMap& a, const QtMap& b, int xcap, int ycap, std::string* why) {
    auto scan = [&](const QtMap& s, const QtMap& o) -> std::optional<std::string> {
        for (const auto& [xy, c] : s) {
            if (xy.first > xcap || xy.second > ycap) continue;
            auto it = o.find(xy);
            Rational other = it == o.end() ? Rational(0) : it->second;
            if (c != other) {
                std::ostringstream os;
                os << "q^" << xy.first << " t^" << xy.second << ": " << c.str() << " vs "
                   << other.str();
                return os.str();
            }
        }
        return std::nullopt;
    };
    auto bad = scan(a, b);
    if (!bad) bad = scan(b, a);
    if (bad) {
        *why = *bad;
        return false;
    }
    return true;
}

}  // namespace

CheckReport check_grading_reversal(const TgView& v, int n, int m) {
    int nm = n * m;
    CheckReport rep;
    std::string why;
    for (const auto& [kb, mp] : v.slice) {
        int k = kb.first, b = kb.second;
        int k2 = nm - k - b;
        const QtMap* other = (k2 < 0 || k2 > v.order) ? nullptr : v.get(k2, b);
        QtMap empty;
        if (!maps_equal_boxed(mp, other ? *other : empty, INT32_MAX, INT32_MAX, &why)) {
            rep.pass = false;
            rep.detail = "T^" + std::to_string(k) + " u^" + std::to_string(b) +
                         " vs T^" + std::to_string(k2) + ": " + why;
            return rep;
        }
    }
    return rep;
}

CheckReport check_u_inversion(const TgView& v, int n, int m, int J) {
    (void)n;
    (void)m;
    CheckReport rep;
    std::set<std::pair<int, int>> keys;
    for (const auto& [kb, mp] : v.slice) {
        keys.insert(kb);
        keys.insert({kb.first + kb.second, -kb.second});  // mirror partner
    }
    for (const auto& [k, b] : keys) {
        int cap = J + std::min(0, b);
        std::string why;
        if (!shifted_equal(v.get(k, b), {0, b}, v.get(k + b, -b), {b, 0}, cap, &why)) {
            rep.pass = false;
            rep.detail =
                "T^" + std::to_string(k) + " u^" + std::to_string(b) + ": " + why;
            return rep;
        }
    }
    return rep;
}

CheckReport check_transpose(const TgView& vnm, const TgView& vmn, int n, int m, int J) {
    (void)n;
    (void)m;
    CheckReport rep;
    std::set<std::pair<int, int>> keys;
    for (const auto& [kb, mp] : vnm.slice) keys.insert(kb);
    for (const auto& [kb, mp] : vmn.slice) keys.insert(kb);
    for (const auto& [k, b] : keys) {
        int cap = J + std::min(0, b);
        const QtMap* a = vnm.get(k, b);
        const QtMap* c = vmn.get(k, b);
        QtMap swapped;
        if (c)
            for (const auto& [xy, r] : *c) swapped[{xy.second, xy.first}] = r;
        std::string why;
        if (!shifted_equal(a, {0, b}, c ? &swapped : nullptr, {b, 0}, cap, &why)) {
            rep.pass = false;
            rep.detail =
                "T^" + std::to_string(k) + " u^" + std::to_string(b) + ": " + why;
            return rep;
        }
    }
    return rep;
}

CheckReport check_special_values(const TgView& v, int n, int m, int J) {
    int nm = n * m;
    CheckReport rep;
    if (J < nm) {
        rep.pass = false;
        rep.detail = "window too small: need q,t degree >= " + std::to_string(nm);
        return rep;
    }
    QtMap box = box_product_map(n, m);
    QtMap empty;
    std::string why;

    // u = t: every grading slot collapses; only T^0 survives, equal to the
    // box product.  Sums over u are complete up to t-degree J - nm.
    for (int k = 0; k <= v.order; ++k) {
        QtMap acc;
        for (const auto& [kb, mp] : v.slice) {
            if (kb.first != k) continue;
            for (const auto& [xy, c] : mp) acc[{xy.first, xy.second + kb.second}] += c;
        }
        if (!maps_equal_boxed(acc, k == 0 ? box : empty, J, J - nm, &why)) {
            rep.pass = false;
            rep.detail = "u=t, T^" + std::to_string(k) + ": " + why;
            return rep;
        }
    }

    // u = 1/q: only T^{nm} survives.
    for (int k = 0; k <= v.order; ++k) {
        QtMap acc;
        for (const auto& [kb, mp] : v.slice) {
            if (kb.first != k) continue;
            for (const auto& [xy, c] : mp) acc[{xy.first - kb.second, xy.second}] += c;
        }
        if (!maps_equal_boxed(acc, k == nm ? box : empty, J - nm, J, &why)) {
            rep.pass = false;
            rep.detail = "u=1/q, T^" + std::to_string(k) + ": " + why;
            return rep;
        }
    }

    // f(u, uT) at u -> 0: coefficients below u^{-k} vanish and the u^{-k}
    // slice is the signed elementary symmetric polynomial.
    auto e = elementary_maps(n, m, std::min(nm, v.order));
    for (const auto& [kb, mp] : v.slice) {
        if (kb.second >= -kb.first) continue;
        if (!mp.empty()) {
            rep.pass = false;
            rep.detail = "T^" + std::to_string(kb.first) + " u^" + std::to_string(kb.second) +
                         ": nonzero below the u = 0 limit line";
            return rep;
        }
    }
    for (int k = 0; k <= std::min(nm, v.order); ++k) {
        QtMap target = e[static_cast<size_t>(k)];
        if (k % 2)
            for (auto& [xy, c] : target) c = -c;
        const QtMap* got = v.get(k, -k);
        if (!maps_equal_boxed(got ? *got : empty, target, J, J, &why)) {
            rep.pass = false;
            rep.detail = "u->0 limit, T^" + std::to_string(k) + ": " + why;
            return rep;
        }
    }
    return rep;
}

EvidenceReport fnm_conjecture_evidence(const TGraded& f, int n, int m, int J) {
    int nm = n * m;
    EvidenceReport rep;
    TgView v = tg_view(f);
    for (const auto& [kb, mp] : v.slice)
        for (const auto& [xy, c] : mp)
            if (!c.is_integer()) {
                rep.integral = false;
                if (rep.detail.empty())
                    rep.detail = "non-integer at T^" + std::to_string(kb.first) + " u^" +
                                 std::to_string(kb.second) + " q^" + std::to_string(xy.first) +
                                 " t^" + std::to_string(xy.second) + ": " + c.str();
            }

    // After (u, q, t) -> (-z/w, z^2, 1/w^2), the (z^Z w^{-X}) coefficient of
    // the T^k slot collects u^b q^eq t^et entries with Z = 2 eq + b and
    // X = 2 et + b, weighted by (-1)^b.  Check nonnegativity wherever every
    // candidate source lies inside the computed q,t box.
    for (int k = 0; k <= v.order; ++k) {
        std::set<std::pair<int, int>> targets;
        for (const auto& [kb, mp] : v.slice) {
            if (kb.first != k) continue;
            for (const auto& [xy, c] : mp)
                targets.insert({2 * xy.first + kb.second, 2 * xy.second + kb.second});
        }
        for (const auto& [Zx, Xx] : targets) {
            Rational sum(0);
            bool known = true;
            for (int b = -nm; b <= nm && known; ++b) {
                if (((Zx - b) % 2) != 0) continue;
                int eq = (Zx - b) / 2, et = (Xx - b) / 2;
                if (eq < 0 || et < 0) continue;
                if (eq > J || et > J) {
                    known = false;
                    break;
                }
                Rational c = map_at(v.get(k, b), eq, et);
                sum += (b % 2) ? -c : c;
            }
            if (!known) continue;
            ++rep.checked;
            if (sum < Rational(0)) {
                ++rep.violations;
                if (rep.detail.empty())
                    rep.detail = "negative coefficient at T^" + std::to_string(k) + " z^" +
                                 std::to_string(Zx) + " w^-" + std::to_string(Xx) + ": " +
                                 sum.str();
            }
        }
    }
    return rep;
}

CheckReport stable_limit_check(int K, int deg) {
    CheckReport rep;
    // Box cells of a size-k partition push per-cell factors down to
    // q,t-exponents side - k; the box must be tall enough that every
    // finite-size factor through grading K sits above the window.
    int side = deg + K + 1;
    auto vt = qt_hook_table(deg, -K, 2 * K);
    int ui = vt->require("u");

    TGraded lhs = fnm_hook_form(side, side, vt, K);
    Mono q = var_mono(vt, "q"), t = var_mono(vt, "t"), u = var_mono(vt, "u");
    Series poch =
        fs_expand(fs_pochhammer_inf(vt, mono_mul(u, q), {q.e, t.e}), vt);
    TGraded sum_side = mul_slotwise(qt_hook_sum(K, vt), poch);

    // Closed product (uq, u^{-1} t T; q, t, T)_inf / (T, qt T; q, t, T)_inf:
    // the T^0 layer of the first family is the pochhammer prefactor; the
    // T-carrying layers of all four families seed every log slot.
    Series seed = Series::constant(vt, Rational(1));
    seed += Series::monomial(vt, Rational(1), mono_mul(q, t).e);
    seed -= Series::monomial(vt, Rational(1), mono_mul(u, q).e);
    seed -= Series::monomial(vt, Rational(1), mono_mul(mono_pow(u, -1), t).e);
    seed = div_one_minus(seed, q);
    seed = div_one_minus(seed, t);
    TGraded logseed = tg_zero(vt, K);
    for (int r = 1; r <= K; ++r) logseed[r] = seed;
    TGraded prod_side = mul_slotwise(plethystic_exp(logseed), poch);

    auto cmp = [&](const TGraded& a, const TGraded& b, const char* names) {
        for (int k = 0; k <= K; ++k) {
            Window w = Window::full(*vt);
            for (int x = 0; x < vt->nvars(); ++x)
                w.hi[static_cast<size_t>(x)] =
                    std::min({w.hi[static_cast<size_t>(x)], a[k].claimed_top(x),
                              b[k].claimed_top(x)});
            if (w.hi[static_cast<size_t>(ui)] < K - k) {
                rep.pass = false;
                rep.detail = std::string(names) + ": u claims fall short at T^" +
                             std::to_string(k);
                return;
            }
            if (auto d = first_difference(a[k], b[k], w)) {
                rep.pass = false;
                rep.detail = std::string(names) + ": " + diff_str(*vt, k, *d);
                return;
            }
        }
    };
    cmp(lhs, sum_side, "box form vs hook sum");
    if (rep.pass) cmp(lhs, prod_side, "box form vs closed product");
    return rep;
}

}  // namespace qtno

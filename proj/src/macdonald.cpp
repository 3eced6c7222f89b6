#include "macdonald.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "errors.hpp"

namespace qtno {

namespace {

long floordiv(long a, long b) {
    long q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

using Mat = std::vector<std::vector<Rational>>;

// Gaussian elimination over exact rationals; returns false when singular.
bool solve_linear(Mat A, std::vector<Rational> b, std::vector<Rational>& x) {
    int n = (int)A.size();
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!A[r][c].is_zero()) { piv = r; break; }
        if (piv < 0) return false;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c || A[r][c].is_zero()) continue;
            Rational f = A[r][c] / A[c][c];
            for (int cc = c; cc < n; ++cc) A[r][cc] -= f * A[c][cc];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, Rational(0));
    for (int i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return true;
}

bool invert_matrix(const Mat& M, Mat& inv) {
    int n = (int)M.size();
    Mat A = M;
    inv.assign(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!A[r][c].is_zero()) { piv = r; break; }
        if (piv < 0) return false;
        std::swap(A[c], A[piv]);
        std::swap(inv[c], inv[piv]);
        Rational d = A[c][c];
        for (int cc = 0; cc < n; ++cc) {
            A[c][cc] /= d;
            inv[c][cc] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || A[r][c].is_zero()) continue;
            Rational f = A[r][c];
            for (int cc = 0; cc < n; ++cc) {
                A[r][cc] -= f * A[c][cc];
                inv[r][cc] -= f * inv[c][cc];
            }
        }
    }
    return true;
}

Rational map_get(const std::map<Partition, Rational>& m, const Partition& k) {
    auto it = m.find(k);
    return it == m.end() ? Rational(0) : it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// QtProd and branching coefficients
// ---------------------------------------------------------------------------

void QtProd::add(int a, int l, long m) {
    if (m == 0) return;
    auto it = f.emplace(std::make_pair(a, l), 0L).first;
    it->second += m;
    if (it->second == 0) f.erase(it);
}

void QtProd::add_all(const QtProd& o, long scale) {
    for (const auto& [k, m] : o.f) add(k.first, k.second, m * scale);
}

QtProd psi_factors(const Partition& la, const Partition& mu) {
    if (!horizontal_strip(la, mu))
        throw StructureError("psi_factors: not a horizontal strip");
    QtProd p;
    Partition lac = conjugate(la), muc = conjugate(mu);
    int lmu = (int)mu.size();
    for (int i = 1; i <= (int)la.size(); ++i) {
        int li = la[i - 1], mi = i <= lmu ? mu[i - 1] : 0;
        if (li == mi) continue;  // row does not meet the strip
        for (int j = 1; j <= mi; ++j) {
            if (lac[j - 1] != muc[j - 1]) continue;  // column meets the strip
            int amu = mi - j, lmu_ = muc[j - 1] - i;
            int ala = li - j, lla = lac[j - 1] - i;
            p.add(amu, lmu_ + 1, +1);
            p.add(amu + 1, lmu_, -1);
            p.add(ala, lla + 1, -1);
            p.add(ala + 1, lla, +1);
        }
    }
    return p;
}

QtProd phi_factors(const Partition& la, const Partition& mu) {
    if (!horizontal_strip(la, mu))
        throw StructureError("phi_factors: not a horizontal strip");
    QtProd p;
    Partition lac = conjugate(la), muc = conjugate(mu);
    for (int j = 1; j <= (int)lac.size(); ++j) {
        int lcj = lac[j - 1], mcj = j <= (int)muc.size() ? muc[j - 1] : 0;
        if (lcj == mcj) continue;  // column does not meet the strip
        for (int i = 1; i <= lcj; ++i) {
            int ala = la[i - 1] - j, lla = lcj - i;
            p.add(ala, lla + 1, +1);
            p.add(ala + 1, lla, -1);
            if (i <= mcj) {  // cell also lies in mu
                int amu = mu[i - 1] - j, lmu_ = mcj - i;
                p.add(amu, lmu_ + 1, -1);
                p.add(amu + 1, lmu_, +1);
            }
        }
    }
    return p;
}

QtProd b_factors(const Partition& la) {
    QtProd p;
    for (const auto& c : cells(la)) {
        p.add(c.arm, c.leg + 1, +1);
        p.add(c.arm + 1, c.leg, -1);
    }
    return p;
}

FactoredSeries qtprod_fs(const QtProd& p, const Mono& q, const Mono& t) {
    FactoredSeries fs = fs_one();
    for (const auto& [al, m] : p.f) {
        Mono arg = mono_mul(mono_pow(q, al.first), mono_pow(t, al.second));
        fs = fs_mul(std::move(fs), fs_factor(arg.c, arg.e, m));
    }
    return fs;
}

Rational qtprod_eval(const QtProd& p, const Rational& q0, const Rational& t0) {
    for (const auto& [al, m] : p.f)
        if (m < 0 && (Rational(1) - q0.pow(al.first) * t0.pow(al.second)).is_zero())
            throw StructureError("qtprod_eval: vanishing factor with negative multiplicity");
    Rational out(1);
    for (const auto& [al, m] : p.f) {
        Rational v = Rational(1) - q0.pow(al.first) * t0.pow(al.second);
        if (v.is_zero()) return Rational(0);
        out *= v.pow(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// BranchingCache
// ---------------------------------------------------------------------------

QtProd BranchingCache::get(Kind k, const Partition& la, const Partition& mu) {
    std::tuple<int, Partition, Partition> key{(int)k, la, mu};
    {
        std::lock_guard<std::mutex> lk(mx_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
    }
    QtProd p = (k == Kind::P) ? psi_factors(la, mu) : phi_factors(la, mu);
    std::lock_guard<std::mutex> lk(mx_);
    map_.emplace(std::move(key), p);
    return p;
}

size_t BranchingCache::entries() const {
    std::lock_guard<std::mutex> lk(mx_);
    return map_.size();
}

void BranchingCache::clear() {
    std::lock_guard<std::mutex> lk(mx_);
    map_.clear();
}

namespace {

std::string cache_part_str(const Partition& p) {
    if (p.empty()) return "-";
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(p[i]);
    }
    return s;
}

bool parse_long(const std::string& s, long& out) {
    if (s.empty()) return false;
    size_t pos = 0;
    try {
        out = std::stol(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

bool cache_parse_part(const std::string& s, Partition& out) {
    out.clear();
    if (s == "-") return true;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        long v;
        if (!parse_long(tok, v) || v <= 0) return false;
        out.push_back((int)v);
    }
    return !out.empty() && is_partition(out);
}

}  // namespace

bool BranchingCache::save(const std::string& path) const {
    std::map<std::tuple<int, Partition, Partition>, QtProd> snap;
    {
        std::lock_guard<std::mutex> lk(mx_);
        snap = map_;
    }
    std::ofstream out(path);
    if (!out) return false;
    out << "qtno-branching-cache 1\n";
    for (const auto& [k, p] : snap) {
        out << (std::get<0>(k) == 0 ? 'P' : 'Q') << '|' << cache_part_str(std::get<1>(k))
            << '|' << cache_part_str(std::get<2>(k)) << '|';
        bool first = true;
        for (const auto& [al, m] : p.f) {
            if (!first) out << ';';
            first = false;
            out << al.first << ',' << al.second << ',' << m;
        }
        out << '\n';
    }
    return (bool)out;
}

bool BranchingCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line) || line != "qtno-branching-cache 1") return false;
    std::map<std::tuple<int, Partition, Partition>, QtProd> tmp;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        size_t start = 0;
        while (true) {
            size_t pos = line.find('|', start);
            if (pos == std::string::npos) {
                f.push_back(line.substr(start));
                break;
            }
            f.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (f.size() != 4 || f[0].size() != 1 || (f[0][0] != 'P' && f[0][0] != 'Q'))
            return false;
        Partition la, mu;
        if (!cache_parse_part(f[1], la) || !cache_parse_part(f[2], mu)) return false;
        QtProd p;
        if (!f[3].empty()) {
            std::stringstream ss(f[3]);
            std::string trip;
            while (std::getline(ss, trip, ';')) {
                std::stringstream ts(trip);
                std::string a, l, m;
                if (!std::getline(ts, a, ',') || !std::getline(ts, l, ',') ||
                    !std::getline(ts, m, ','))
                    return false;
                std::string rest;
                if (std::getline(ts, rest, ',')) return false;
                long av, lv, mv;
                if (!parse_long(a, av) || !parse_long(l, lv) || !parse_long(m, mv))
                    return false;
                if (av < 0 || lv < 0 || mv == 0) return false;
                p.add((int)av, (int)lv, mv);
            }
        }
        tmp.insert_or_assign(std::make_tuple(f[0][0] == 'P' ? 0 : 1, la, mu), p);
    }
    std::lock_guard<std::mutex> lk(mx_);
    for (auto& [k, v] : tmp) map_.insert_or_assign(k, std::move(v));
    return true;
}

BranchingCache& branching_cache() {
    static BranchingCache c;
    return c;
}

// ---------------------------------------------------------------------------
// Skew evaluation
// ---------------------------------------------------------------------------

std::vector<Partition> partitions_between(const Partition& mu, const Partition& la) {
    std::vector<Partition> out;
    if (!contains(la, mu)) return out;
    int L = (int)la.size();
    if (L == 0) {
        out.push_back({});
        return out;
    }
    Partition cur(L, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == L) {
            Partition p = cur;
            while (!p.empty() && p.back() == 0) p.pop_back();
            out.push_back(std::move(p));
            return;
        }
        int lo = i < (int)mu.size() ? mu[i] : 0;
        int hi = i == 0 ? la[0] : std::min(la[i], cur[i - 1]);
        for (int v = lo; v <= hi; ++v) {
            cur[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

namespace {

// All rho with mu <= rho <= nu such that nu/rho is a horizontal strip
// (interlacing: rho_i >= nu_{i+1}).
std::vector<Partition> substrips(const Partition& nu, const Partition& mu) {
    std::vector<Partition> out;
    if (!contains(nu, mu)) return out;
    int L = (int)nu.size();
    if (L == 0) {
        out.push_back({});
        return out;
    }
    Partition cur(L, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == L) {
            Partition p = cur;
            while (!p.empty() && p.back() == 0) p.pop_back();
            out.push_back(std::move(p));
            return;
        }
        int lo = std::max(i + 1 < L ? nu[i + 1] : 0, i < (int)mu.size() ? mu[i] : 0);
        for (int v = lo; v <= nu[i]; ++v) {
            cur[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

}  // namespace

Series eval_skew_alphabet(Kind k, const Partition& la, const Partition& mu,
                          const std::vector<Mono>& entries, const MacParams& P) {
    if (!is_partition(la) || !is_partition(mu))
        throw ConfigError("eval_skew_alphabet: invalid partition");
    if (!contains(la, mu)) return Series(P.vt);
    int J = (int)entries.size();
    std::map<std::pair<Partition, int>, Series> memo;
    std::map<std::pair<Partition, Partition>, Series> cser;
    auto coeff_series = [&](const Partition& nu, const Partition& rho) -> const Series& {
        auto key = std::make_pair(nu, rho);
        auto it = cser.find(key);
        if (it == cser.end()) {
            QtProd pr = branching_cache().get(k, nu, rho);
            it = cser.emplace(std::move(key), fs_expand(qtprod_fs(pr, P.q, P.t), P.vt))
                     .first;
        }
        return it->second;
    };
    std::function<const Series&(const Partition&, int)> rec =
        [&](const Partition& nu, int j) -> const Series& {
        auto key = std::make_pair(nu, j);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Series val(P.vt);
        if (j == 0) {
            if (nu == mu) val = Series::constant(P.vt, Rational(1));
        } else if ((int)nu.size() - (int)mu.size() > j) {
            // removing a horizontal strip lowers the length by at most one
        } else {
            for (const auto& rho : substrips(nu, mu)) {
                const Series& sub = rec(rho, j - 1);
                if (sub.is_zero()) continue;
                long d = part_size(nu) - part_size(rho);
                if (d == 0) {
                    val += sub;  // nu == rho: coefficient 1, entry power 0
                    continue;
                }
                Series t = mul_mono(sub, mono_pow(entries[j - 1], (int)d));
                val += mul(t, coeff_series(nu, rho));
            }
        }
        return memo.emplace(std::move(key), std::move(val)).first->second;
    };
    return rec(la, J);
}

namespace {

// s * prod (1 - q^a t^l)^mult, factor by factor: positive powers as two
// shifted copies, negative powers as ray divisions.  Dense fallback when an
// instantiated direction is constant or has a negative component.
Series apply_qtprod(Series s, const QtProd& pr, const MacParams& P) {
    for (const auto& [al, mult] : pr.f) {
        if (mult == 0) continue;
        Mono m = mono_mul(mono_pow(P.q, al.first), mono_pow(P.t, al.second));
        bool fast = !m.e.is_zero();
        for (int v = 0; fast && v < P.vt->nvars(); ++v)
            if (m.e[v] < 0) fast = false;
        if (!fast) {
            QtProd one;
            one.add(al.first, al.second, mult);
            s = mul(s, fs_expand(qtprod_fs(one, P.q, P.t), P.vt));
            continue;
        }
        for (long i = 0; i < mult; ++i) s = mul_one_minus(s, m);
        for (long i = 0; i > mult; --i) s = div_one_minus(s, m);
    }
    return s;
}

}  // namespace

std::map<Partition, Series> eval_skew_alphabet_batch(Kind k, const std::vector<Partition>& las,
                                                     const Partition& mu,
                                                     const std::vector<Mono>& entries,
                                                     const MacParams& P) {
    if (!is_partition(mu))
        throw ConfigError("eval_skew_alphabet_batch: invalid partition");
    for (const auto& la : las)
        if (!is_partition(la))
            throw ConfigError("eval_skew_alphabet_batch: invalid partition");
    int J = (int)entries.size();
    std::map<std::pair<Partition, int>, Series> memo;
    std::function<const Series&(const Partition&, int)> rec =
        [&](const Partition& nu, int j) -> const Series& {
        auto key = std::make_pair(nu, j);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Series val(P.vt);
        if (j == 0) {
            if (nu == mu) val = Series::constant(P.vt, Rational(1));
        } else if ((int)nu.size() - (int)mu.size() > j) {
            // removing a horizontal strip lowers the length by at most one
        } else {
            for (const auto& rho : substrips(nu, mu)) {
                const Series& sub = rec(rho, j - 1);
                if (sub.is_zero()) continue;
                long d = part_size(nu) - part_size(rho);
                if (d == 0) {
                    val += sub;  // nu == rho: coefficient 1, entry power 0
                    continue;
                }
                Series t = mul_mono(sub, mono_pow(entries[j - 1], (int)d));
                val += apply_qtprod(std::move(t), branching_cache().get(k, nu, rho), P);
            }
        }
        return memo.emplace(std::move(key), std::move(val)).first->second;
    };
    std::map<Partition, Series> out;
    for (const auto& la : las)
        out.emplace(la, contains(la, mu) ? rec(la, J) : Series(P.vt));
    return out;
}

Series eval_P(const Partition& la, const std::vector<Mono>& entries, const MacParams& P) {
    return eval_skew_alphabet(Kind::P, la, {}, entries, P);
}

Series eval_skew_Q(const Partition& la, const Partition& mu,
                   const std::vector<Mono>& entries, const MacParams& P) {
    return eval_skew_alphabet(Kind::Q, la, mu, entries, P);
}

Series eval_skew_tail_geom(Kind k, const Partition& la, const Partition& mu,
                           const std::vector<Mono>& head, const Mono& pre,
                           const Mono& base, const MacParams& P, int extra) {
    const VarTable& vt = *P.vt;
    if (!contains(la, mu)) return Series(P.vt);
    long d = part_size(la) - part_size(mu);
    if (d == 0) return Series::constant(P.vt, Rational(1));
    if (base.c.is_zero() || !ascending_dir(vt, base.e))
        throw ConfigError("eval_skew_tail_geom: tail ratio must be ascending");
    int h = (int)head.size();
    long n_trunc = h;
    for (int v = 0; v < vt.nvars(); ++v) {
        if (base.e[v] <= 0) continue;  // only directions the tail grows in
        if (P.q.e[v] < 0 || P.t.e[v] < 0)
            throw ConfigError(
                "eval_skew_tail_geom: parameters must not lower a tail direction");
        long fl = (long)pre.e[v] + (long)h * base.e[v];
        for (const auto& m : head) fl = std::min(fl, (long)m.e[v]);
        // A term touching entry pre*base^n has exponent at least
        // (d-1)*fl + pre + n*base here; once that exceeds the window top the
        // entry cannot contribute inside the window.
        long rhs = (long)vt.var(v).max_exp - (d - 1) * fl - (long)pre.e[v];
        n_trunc = std::max(n_trunc, floordiv(rhs, (long)base.e[v]) + 1);
    }
    std::vector<Mono> entries = head;
    for (long m = h; m < n_trunc + extra; ++m)
        entries.push_back(mono_mul(pre, mono_pow(base, (int)m)));
    Series s = eval_skew_alphabet(k, la, mu, entries, P);
    std::vector<std::pair<int, int32_t>> tops;
    for (int v = 0; v < vt.nvars(); ++v)
        if (base.e[v] > 0) tops.push_back({v, vt.var(v).max_exp});
    return restrict_tops(s, tops);
}

Series skew_geom(Kind k, const Partition& la, const Partition& mu, const Mono& pre,
                 const Mono& base, const MacParams& P, int extra) {
    return eval_skew_tail_geom(k, la, mu, {}, pre, base, P, extra);
}

// ---------------------------------------------------------------------------
// Closed principal forms
// ---------------------------------------------------------------------------

FactoredSeries principal_P_fs(const Partition& la, int n, const Mono& q, const Mono& t) {
    Mono tn = mono_pow(t, (int)n_stat(la));
    FactoredSeries fs = fs_mono(tn.c, tn.e);
    fs = fs_mul(std::move(fs), fs_poch_lambda(la, mono_pow(t, n), q, t));
    fs = fs_mul(std::move(fs), fs_inv(fs_hook_c(la, q, t)));
    return fs;
}

Series principal_P(const Partition& la, int n, const MacParams& P) {
    return fs_expand(principal_P_fs(la, n, P.q, P.t), P.vt);
}

FactoredSeries principal_P_inf_fs(const Partition& la, const Mono& q, const Mono& t) {
    Mono tn = mono_pow(t, (int)n_stat(la));
    FactoredSeries fs = fs_mono(tn.c, tn.e);
    fs = fs_mul(std::move(fs), fs_inv(fs_hook_c(la, q, t)));
    return fs;
}

Series principal_P_inf(const Partition& la, const MacParams& P) {
    return fs_expand(principal_P_inf_fs(la, P.q, P.t), P.vt);
}

Series skew_Q_principal(const Partition& la, const Partition& mu, const Mono& a,
                        const MacParams& P) {
    return skew_geom(Kind::Q, la, mu, a, P.t, P);
}

// ---------------------------------------------------------------------------
// q,t-binomials and plethystic substitution
// ---------------------------------------------------------------------------

Series qt_binomial(const Partition& la, const Partition& mu, const MacParams& P) {
    if (!contains(la, mu)) return Series(P.vt);
    Mono one{Rational(1), ExpVec{}};
    Series qser = skew_geom(Kind::Q, la, mu, one, P.t, P);
    FactoredSeries cf =
        fs_mul(fs_hook_cprime(la, P.q, P.t), fs_inv(fs_hook_cprime(mu, P.q, P.t)));
    Series out = mul(qser, fs_expand(cf, P.vt));
    return mul_mono(out, mono_pow(P.t, (int)(n_stat(mu) - n_stat(la))));
}

Series plethystic_eval(const Partition& la, const Partition& mu, const Mono& a,
                       const Mono& b, const MacParams& P) {
    Series acc(P.vt);
    if (!contains(la, mu)) return acc;
    MacParams Pswap{P.vt, P.t, P.q};
    Partition muc = conjugate(mu);
    for (const auto& nu : partitions_between(mu, la)) {
        Series f1 = skew_geom(Kind::P, la, nu, a, P.t, P);
        if (f1.is_zero()) continue;
        Series f2 = skew_geom(Kind::Q, conjugate(nu), muc, b, P.q, Pswap);
        if (f2.is_zero()) continue;
        Series term = mul(f1, f2);
        if ((part_size(nu) - part_size(mu)) % 2)
            acc -= term;
        else
            acc += term;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Refined vertex
// ---------------------------------------------------------------------------

Series refined_vertex(const Partition& la, const Partition& mu, const Partition& nu,
                      const VarTablePtr& vt) {
    Mono Z = var_mono(vt, "Z"), W = var_mono(vt, "W");
    Mono q = mono_pow(Z, 2), t = mono_pow(W, 2);
    MacParams schur{vt, Z, Z};  // equal parameters: Schur specialisation
    Partition lac = conjugate(la), nuc = conjugate(nu);
    Partition etamax;
    for (size_t i = 0; i < std::min(lac.size(), mu.size()); ++i)
        etamax.push_back(std::min(lac[i], mu[i]));
    std::vector<Mono> headA, headB;
    for (int i = 1; i <= (int)nu.size(); ++i)
        headA.push_back(mono_mul(mono_pow(t, i - 1), mono_pow(q, -nu[i - 1])));
    for (int i = 1; i <= (int)nuc.size(); ++i)
        headB.push_back(mono_mul(mono_pow(q, i - 1), mono_pow(t, -nuc[i - 1])));
    Mono one{Rational(1), ExpVec{}};
    Series acc(vt);
    for (const auto& eta : partitions_between({}, etamax)) {
        Series sA = eval_skew_tail_geom(Kind::P, lac, eta, headA, one, t, schur);
        if (sA.is_zero()) continue;
        Series sB = eval_skew_tail_geom(Kind::P, mu, eta, headB, one, q, schur);
        if (sB.is_zero()) continue;
        acc += mul_mono(mul(sA, sB), mono_pow(W, -2 * (int)part_size(eta)));
    }
    long pz = 2 * (n_stat(conjugate(mu)) + n_stat(nuc)) + part_size(la) + part_size(mu) +
              part_size(nu);
    long pw = -2 * n_stat(mu);
    acc = mul(acc, fs_expand(fs_inv(fs_hook_c(nu, q, t)), vt));
    return mul_mono(acc, mono_mul(mono_pow(Z, (int)pz), mono_pow(W, (int)pw)));
}

// ---------------------------------------------------------------------------
// Numeric polynomial helpers
// ---------------------------------------------------------------------------

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            PolyExp e(ea.size());
            for (size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
            auto [it, ins] = r.emplace(std::move(e), ca * cb);
            if (!ins) {
                it->second += ca * cb;
                if (it->second.is_zero()) r.erase(it);
            }
        }
    return r;
}

Poly power_sum_poly(int r, int d) {
    Poly p;
    for (int i = 0; i < d; ++i) {
        PolyExp e(d, 0);
        e[i] = r;
        p.emplace(std::move(e), Rational(1));
    }
    return p;
}

Poly monomial_sym_poly(const Partition& nu, int d) {
    Poly p;
    if ((int)nu.size() > d) return p;
    PolyExp e(nu.rbegin(), nu.rend());
    e.insert(e.begin(), d - nu.size(), 0);
    do {
        p.emplace(e, Rational(1));
    } while (std::next_permutation(e.begin(), e.end()));
    return p;
}

Rational poly_eval(const Poly& p, const std::vector<Rational>& x) {
    Rational s(0);
    for (const auto& [e, c] : p) {
        Rational t = c;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i]) t *= x[i].pow(e[i]);
        s += t;
    }
    return s;
}

Rational m_eval(const Partition& nu, const std::vector<Rational>& x) {
    int d = (int)x.size();
    if ((int)nu.size() > d) return Rational(0);
    PolyExp e(nu.rbegin(), nu.rend());
    e.insert(e.begin(), d - nu.size(), 0);
    Rational s(0);
    do {
        Rational t(1);
        for (int i = 0; i < d; ++i)
            if (e[i]) t *= x[i].pow(e[i]);
        s += t;
    } while (std::next_permutation(e.begin(), e.end()));
    return s;
}

Rational z_stat_rat(const Partition& p) {
    std::map<int, int> mult;
    for (int v : p) ++mult[v];
    Rational z(1);
    for (const auto& [v, m] : mult) z *= Rational(v).pow(m) * factorial(m);
    return z;
}

PMTransition pm_transition(int n) {
    PMTransition tr;
    tr.parts = all_of_size(n);
    int N = (int)tr.parts.size(), d = n;
    tr.M.assign(N, std::vector<Rational>(N, Rational(0)));
    for (int i = 0; i < N; ++i) {
        Poly p;
        p.emplace(PolyExp(d, 0), Rational(1));
        for (int part : tr.parts[i]) p = poly_mul(p, power_sum_poly(part, d));
        for (int j = 0; j < N; ++j) {
            PolyExp key(tr.parts[j].begin(), tr.parts[j].end());
            key.resize(d, 0);  // descending exponent vector
            auto it = p.find(key);
            if (it != p.end()) tr.M[i][j] = it->second;
        }
    }
    if (!invert_matrix(tr.M, tr.Minv))
        throw StructureError("pm_transition: transition matrix is singular");
    return tr;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt oracle
// ---------------------------------------------------------------------------

Poly GSOracle::expand(const Partition& la, int d) const {
    auto it = mcoeff.find(la);
    if (it == mcoeff.end()) throw ConfigError("GSOracle::expand: partition out of range");
    Poly out;
    for (const auto& [nu, c] : it->second) {
        for (const auto& [e, mc] : monomial_sym_poly(nu, d)) {
            auto [jt, ins] = out.emplace(e, c * mc);
            if (!ins) jt->second += c * mc;
        }
    }
    for (auto jt = out.begin(); jt != out.end();)
        jt = jt->second.is_zero() ? out.erase(jt) : std::next(jt);
    return out;
}

Rational GSOracle::inner_PP(const Partition& la, const Partition& mu) const {
    if (part_size(la) != part_size(mu)) return Rational(0);
    const auto& ca = mcoeff.at(la);
    const auto& cb = mcoeff.at(mu);
    Rational s(0);
    for (const auto& [a, va] : ca)
        for (const auto& [b, vb] : cb) s += va * vb * gram_m.at({a, b});
    return s;
}

GSOracle gram_schmidt_oracle(int max_size, const Rational& q0, const Rational& t0) {
    GSOracle o;
    o.max_size = max_size;
    o.q0 = q0;
    o.t0 = t0;
    for (int n = 0; n <= max_size; ++n) {
        PMTransition tr = pm_transition(n);
        int N = (int)tr.parts.size();
        std::vector<Rational> w(N);
        for (int i = 0; i < N; ++i) {
            Rational z = z_stat_rat(tr.parts[i]);
            for (int part : tr.parts[i])
                z *= (Rational(1) - q0.pow(part)) / (Rational(1) - t0.pow(part));
            w[i] = z;
        }
        Mat G(N, std::vector<Rational>(N, Rational(0)));
        for (int a = 0; a < N; ++a)
            for (int b = a; b < N; ++b) {
                Rational s(0);
                for (int m = 0; m < N; ++m) s += tr.Minv[a][m] * tr.Minv[b][m] * w[m];
                G[a][b] = s;
                G[b][a] = s;
                o.gram_m[{tr.parts[a], tr.parts[b]}] = s;
                o.gram_m[{tr.parts[b], tr.parts[a]}] = s;
            }
        for (int li = 0; li < N; ++li) {
            const Partition& la = tr.parts[li];
            std::vector<int> lower;
            for (int mi = 0; mi < N; ++mi)
                if (mi != li && dominance_leq(tr.parts[mi], la)) lower.push_back(mi);
            int K = (int)lower.size();
            std::map<Partition, Rational> row;
            row[la] = Rational(1);
            if (K) {
                Mat A(K, std::vector<Rational>(K, Rational(0)));
                std::vector<Rational> rhs(K);
                for (int r = 0; r < K; ++r) {
                    for (int c = 0; c < K; ++c) A[r][c] = G[lower[r]][lower[c]];
                    rhs[r] = -G[lower[r]][li];
                }
                std::vector<Rational> u;
                if (!solve_linear(A, rhs, u))
                    throw StructureError(
                        "gram_schmidt_oracle: singular system; resample parameters");
                for (int c = 0; c < K; ++c)
                    if (!u[c].is_zero()) row[tr.parts[lower[c]]] = u[c];
            }
            o.mcoeff[la] = std::move(row);
        }
    }
    return o;
}

// ---------------------------------------------------------------------------
// Interpolation polynomials
// ---------------------------------------------------------------------------

std::vector<Partition> interp_basis(int size, int n) {
    std::vector<Partition> out;
    for (int k = 0; k <= size; ++k)
        for (const auto& p : all_of_size(k))
            if ((int)p.size() <= n) out.push_back(p);
    return out;
}

std::vector<Rational> interp_point(const Partition& la, int n, const Rational& q0,
                                   const Rational& t0) {
    std::vector<Rational> x(n);
    for (int i = 1; i <= n; ++i) {
        long li = i <= (int)la.size() ? la[i - 1] : 0;
        x[i - 1] = q0.pow(li) * t0.pow(n - i);
    }
    return x;
}

Rational InterpPoly::eval(const std::vector<Rational>& x) const {
    if ((int)x.size() != n) throw ConfigError("InterpPoly::eval: wrong arity");
    Rational s(0);
    for (const auto& [nu, c] : coeff) s += c * m_eval(nu, x);
    return s;
}

InterpPoly interpolation_solve(const Partition& mu, int n, const Rational& q0,
                               const Rational& t0) {
    if (!is_partition(mu)) throw ConfigError("interpolation_solve: invalid partition");
    if ((int)mu.size() > n)
        throw ConfigError("interpolation_solve: more rows than variables");
    InterpPoly ip;
    ip.mu = mu;
    ip.n = n;
    ip.q0 = q0;
    ip.t0 = t0;
    std::vector<Partition> unk;
    for (const auto& p : interp_basis(part_size(mu), n))
        if (p != mu) unk.push_back(p);
    int K = (int)unk.size();
    ip.coeff[mu] = Rational(1);
    if (K == 0) return ip;
    Mat A(K, std::vector<Rational>(K, Rational(0)));
    std::vector<Rational> b(K);
    for (int r = 0; r < K; ++r) {
        auto pt = interp_point(unk[r], n, q0, t0);
        for (int c = 0; c < K; ++c) A[r][c] = m_eval(unk[c], pt);
        b[r] = -m_eval(mu, pt);
    }
    std::vector<Rational> sol;
    if (!solve_linear(A, b, sol))
        throw StructureError("interpolation_solve: singular system; resample parameters");
    for (int c = 0; c < K; ++c)
        if (!sol[c].is_zero()) ip.coeff[unk[c]] = sol[c];
    return ip;
}

SpotCheck interpolation_spot_check(const Partition& mu, int n, const Rational& q0,
                                   const Rational& t0) {
    SpotCheck r;
    auto fail = [&](const std::string& s) {
        r.pass = false;
        if (!r.detail.empty()) r.detail += "; ";
        r.detail += s;
    };
    InterpPoly ip = interpolation_solve(mu, n, q0, t0);
    int sz = (int)part_size(mu);

    // 1. vanishing at the defining points, at extra non-containing points of
    //    larger size, and non-vanishing at mu itself
    for (const auto& la : interp_basis(sz, n))
        if (la != mu && !ip.eval(interp_point(la, n, q0, t0)).is_zero())
            fail("vanishing at size <= |mu|");
    for (int s = sz + 1; s <= sz + 2; ++s)
        for (const auto& la : all_of_size(s))
            if ((int)la.size() <= n && !contains(la, mu) &&
                !ip.eval(interp_point(la, n, q0, t0)).is_zero())
                fail("vanishing above |mu| at non-containing shapes");
    Rational at_mu = ip.eval(interp_point(mu, n, q0, t0));
    if (at_mu.is_zero()) fail("nonzero value at mu");

    // 2. closed normalisation value at mu
    {
        Rational want(1);
        for (const auto& c : cells(mu))
            want *= Rational(1) - q0.pow(c.arm + 1) * t0.pow(c.leg);
        want *= q0.pow(n_stat(conjugate(mu))) * t0.pow((long)(n - 1) * sz - 2 * n_stat(mu));
        if (sz % 2) want = -want;
        if (at_mu != want) fail("normalisation value at mu");
    }

    // 3. stability: one more variable at (t0 x, 1) rescales by t0^{|mu|}
    {
        InterpPoly ip1 = interpolation_solve(mu, n + 1, q0, t0);
        static const long num[] = {3, 5, 9, 2, 7, 11};
        static const long den[] = {2, 7, 4, 9, 3, 5};
        for (int rep = 0; rep < 2; ++rep) {
            std::vector<Rational> x(n), xext(n + 1);
            for (int i = 0; i < n; ++i) {
                x[i] = Rational(num[(i + 3 * rep) % 6], den[(i + 2 * rep) % 6]);
                xext[i] = t0 * x[i];
            }
            xext[n] = Rational(1);
            if (ip1.eval(xext) != t0.pow(sz) * ip.eval(x)) fail("stability");
        }
    }

    // 4. top-degree part matches the Gram-Schmidt construction
    {
        GSOracle gs = gram_schmidt_oracle(sz, q0, t0);
        const auto& grow = gs.mcoeff.at(mu);
        for (const auto& nu : all_of_size(sz))
            if ((int)nu.size() <= n && map_get(ip.coeff, nu) != map_get(grow, nu))
                fail("top-degree coefficients");
    }

    // 5. binomial expansion of ip(a x) on inverse-parameter polynomials
    {
        Rational qi = q0.inv(), ti = t0.inv();
        auto bas = interp_basis(sz, n);
        std::map<Partition, InterpPoly> ip_qt, ip_inv;
        for (const auto& nu : bas) {
            ip_qt.emplace(nu, nu == mu ? ip : interpolation_solve(nu, n, q0, t0));
            ip_inv.emplace(nu, interpolation_solve(nu, n, qi, ti));
        }
        std::vector<Rational> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = Rational(2 * i + 3, 2 * i + 5);
        std::vector<Rational> tds(n);
        for (int i = 1; i <= n; ++i) tds[i - 1] = t0.pow(-(long)(n - i));
        const Rational a_samples[] = {Rational(2, 5), Rational(7, 3), Rational(11, 6)};
        bool done = false;
        for (const Rational& a0 : a_samples) {
            std::vector<Rational> atds(n), axs(n);
            for (int i = 0; i < n; ++i) {
                atds[i] = a0 * tds[i];
                axs[i] = a0 * xs[i];
            }
            bool usable = true;
            for (const auto& nu : bas)
                if (ip_qt.at(nu).eval(atds).is_zero()) usable = false;
            if (!usable) continue;
            Rational top = ip.eval(atds);
            Rational sum(0);
            bool ok = true;
            for (const auto& nu : bas) {
                Rational bden = ip_inv.at(nu).eval(interp_point(nu, n, qi, ti));
                if (bden.is_zero()) {
                    fail("binomial: zero normalisation at inverse parameters");
                    ok = false;
                    break;
                }
                Rational bnum = ip_inv.at(nu).eval(interp_point(mu, n, qi, ti));
                sum += a0.pow(part_size(nu)) * (bnum / bden) * (top / ip_qt.at(nu).eval(atds)) *
                       ip_inv.at(nu).eval(xs);
            }
            if (ok && sum != ip.eval(axs)) fail("binomial expansion");
            done = true;
            break;
        }
        if (!done) fail("binomial: no usable scaling value");
    }
    return r;
}

}  // namespace qtno

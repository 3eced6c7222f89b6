#include "series.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qtno {

namespace {

constexpr long kMaxIter = 200000;

int32_t sat(int64_t x) {
    if (x > kInfExp) return kInfExp;
    if (x < -kInfExp) return -kInfExp;
    return static_cast<int32_t>(x);
}

// Absorbing at +/-kInfExp: an infinite operand stays infinite instead of
// decaying by the finite offset (horizons read "exact everywhere" and
// support minima of the zero series read "no terms"; both must survive
// shifts).  The positive check runs first so empty-support beats any
// negative offset.
int32_t sat_add(int32_t a, int32_t b) {
    if (a >= kInfExp || b >= kInfExp) return kInfExp;
    if (a <= -kInfExp || b <= -kInfExp) return -kInfExp;
    return sat(static_cast<int64_t>(a) + b);
}

// Fate of an exponent vector relative to the window.  A quotient drop (an
// ordinary variable above its top) wins over everything: the term does not
// exist in the quotient ring.  Otherwise an exponent below any bottom is a
// hard error, and a Laurent exponent above its top is a drop that costs the
// affected horizons.
enum class Fate { Keep, DropQuotient, DropLaurent, Below };

Fate classify(const VarTable& vt, const ExpVec& e) {
    bool lau_over = false, below = false;
    for (int v = 0; v < vt.nvars(); ++v) {
        const VarSpec& s = vt.var(v);
        if (e[v] > s.max_exp) {
            if (!s.laurent()) return Fate::DropQuotient;
            lau_over = true;
        } else if (e[v] < s.min_exp) {
            below = true;
        }
    }
    if (below) return Fate::Below;
    return lau_over ? Fate::DropLaurent : Fate::Keep;
}

}  // namespace

ExpVec operator+(const ExpVec& a, const ExpVec& b) {
    ExpVec r;
    for (int i = 0; i < kMaxVars; ++i) r[i] = static_cast<int16_t>(a[i] + b[i]);
    return r;
}

ExpVec operator-(const ExpVec& a, const ExpVec& b) {
    ExpVec r;
    for (int i = 0; i < kMaxVars; ++i) r[i] = static_cast<int16_t>(a[i] - b[i]);
    return r;
}

ExpVec operator-(const ExpVec& a) {
    ExpVec r;
    for (int i = 0; i < kMaxVars; ++i) r[i] = static_cast<int16_t>(-a[i]);
    return r;
}

ExpVec operator*(int k, const ExpVec& a) {
    ExpVec r;
    for (int i = 0; i < kMaxVars; ++i) r[i] = static_cast<int16_t>(k * a[i]);
    return r;
}

std::pair<int, std::string> var_rank(const std::string& name) {
    static const std::vector<std::string> fixed = {"q", "t", "u", "T", "p", "s", "Z", "W",
                                                   "a", "b", "c", "d", "v", "w", "z"};
    for (size_t i = 0; i < fixed.size(); ++i)
        if (name == fixed[i]) return {static_cast<int>(i), ""};
    auto numbered = [&](char head, int base) -> int {
        if (name.size() < 2 || name[0] != head) return -1;
        int n = 0;
        for (size_t i = 1; i < name.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
            n = n * 10 + (name[i] - '0');
            if (n > 5000) return -1;
        }
        return base + n;
    };
    if (int r = numbered('x', 100); r >= 0) return {r, ""};
    if (int r = numbered('y', 10000); r >= 0) return {r, ""};
    return {1000000, name};
}

VarTablePtr VarTable::make(std::vector<VarSpec> specs) {
    if (specs.size() > kMaxVars)
        throw ConfigError("too many variables (max " + std::to_string(kMaxVars) + ")");
    std::sort(specs.begin(), specs.end(), [](const VarSpec& a, const VarSpec& b) {
        return var_rank(a.name) < var_rank(b.name);
    });
    auto vt = std::make_shared<VarTable>();
    for (size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        if (s.name.empty()) throw ConfigError("empty variable name");
        if (i > 0 && specs[i - 1].name == s.name) throw ConfigError("duplicate variable " + s.name);
        if (s.min_exp > 0 || s.max_exp < 0)
            throw ConfigError("window of " + s.name + " must contain exponent 0");
        vt->has_laurent_ = vt->has_laurent_ || s.laurent();
    }
    vt->vars_ = std::move(specs);
    return vt;
}

int VarTable::index(const std::string& name) const {
    for (int i = 0; i < nvars(); ++i)
        if (vars_[static_cast<size_t>(i)].name == name) return i;
    return -1;
}

int VarTable::require(const std::string& name) const {
    int i = index(name);
    if (i < 0) throw ConfigError("unknown variable " + name);
    return i;
}

bool VarTable::same(const VarTable& o) const {
    if (nvars() != o.nvars()) return false;
    for (int i = 0; i < nvars(); ++i) {
        const auto& a = vars_[static_cast<size_t>(i)];
        const auto& b = o.vars_[static_cast<size_t>(i)];
        if (a.name != b.name || a.min_exp != b.min_exp || a.max_exp != b.max_exp) return false;
    }
    return true;
}

bool VarTable::in_window(const ExpVec& e) const {
    for (int i = 0; i < nvars(); ++i) {
        if (e[i] < vars_[static_cast<size_t>(i)].min_exp) return false;
        if (e[i] > vars_[static_cast<size_t>(i)].max_exp) return false;
    }
    for (int i = nvars(); i < kMaxVars; ++i)
        if (e[i] != 0) return false;
    return true;
}

std::string VarTable::str() const {
    std::ostringstream os;
    for (int i = 0; i < nvars(); ++i) {
        const auto& v = vars_[static_cast<size_t>(i)];
        if (i) os << ",";
        os << v.name << "[" << v.min_exp << ".." << v.max_exp << "]";
    }
    return os.str();
}

Window Window::full(const VarTable& vt) {
    Window w;
    for (int i = 0; i < kMaxVars; ++i) {
        if (i < vt.nvars()) {
            w.lo[static_cast<size_t>(i)] = vt.var(i).min_exp;
            w.hi[static_cast<size_t>(i)] = vt.var(i).max_exp;
        }
    }
    return w;
}

Series::Series(VarTablePtr vt) : vt_(std::move(vt)) {
    hor_.fill(kInfExp);
    sm_.fill(kInfExp);  // empty support: vacuously high lower bound
}

Series Series::constant(VarTablePtr vt, const Rational& c) {
    Series s(std::move(vt));
    if (!c.is_zero()) {
        if (!s.vt_->in_window(ExpVec{}))
            throw WindowError("window does not contain the constant exponent");
        s.terms_.emplace(ExpVec{}, c);
        s.sm_.fill(0);
    }
    return s;
}

Series Series::monomial(VarTablePtr vt, const Rational& c, const ExpVec& e) {
    Series s(std::move(vt));
    if (c.is_zero()) return s;
    if (!s.vt_->in_window(e)) throw WindowError("monomial outside window: " + mono_str(*s.vt_, e));
    s.terms_.emplace(e, c);
    for (int v = 0; v < kMaxVars; ++v) s.sm_[static_cast<size_t>(v)] = e[v];
    return s;
}

int32_t Series::claimed_top(int v) const {
    return std::min(hor_[static_cast<size_t>(v)], vt_->var(v).max_exp);
}

Rational Series::coeff_raw(const ExpVec& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational Series::coeff(const ExpVec& e) const {
    for (int v = 0; v < vt_->nvars(); ++v) {
        if (e[v] < vt_->var(v).min_exp || e[v] > claimed_top(v))
            throw WindowError("coefficient at " + mono_str(*vt_, e) +
                              " is outside the exactness box of " + vt_->var(v).name);
    }
    return coeff_raw(e);
}

void Series::check_same_table(const Series& o) const {
    if (!vt_ || !o.vt_ || !vt_->same(*o.vt_))
        throw StructureError("series over different variable tables");
}

void Series::add_term(const ExpVec& e, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Series& Series::operator+=(const Series& o) {
    check_same_table(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    for (size_t v = 0; v < kMaxVars; ++v) {
        hor_[v] = std::min(hor_[v], o.hor_[v]);
        sm_[v] = std::min(sm_[v], o.sm_[v]);
    }
    return *this;
}

Series& Series::operator-=(const Series& o) {
    check_same_table(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    for (size_t v = 0; v < kMaxVars; ++v) {
        hor_[v] = std::min(hor_[v], o.hor_[v]);
        sm_[v] = std::min(sm_[v], o.sm_[v]);
    }
    return *this;
}

Series& Series::operator*=(const Rational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

Series Series::operator-() const {
    Series r = *this;
    for (auto& [e, v] : r.terms_) v = -v;
    return r;
}

Series mul(const Series& a, const Series& b) {
    a.check_same_table(b);
    const VarTable& vt = *a.vt_;
    Series r(a.vt_);

    bool both = !a.terms_.empty() && !b.terms_.empty();
    for (size_t v = 0; v < static_cast<size_t>(vt.nvars()); ++v) {
        int32_t lo = sat_add(a.sm_[v], b.sm_[v]);
        r.sm_[v] = lo;
        // True support of the product never dips below the window bottom.
        if (both && lo < vt.var(static_cast<int>(v)).min_exp)
            throw WindowError("product support can reach below the window bottom of " +
                              vt.var(static_cast<int>(v)).name + "; deepen the window");
        r.hor_[v] = std::min(sat_add(a.hor_[v], b.sm_[v]), sat_add(b.hor_[v], a.sm_[v]));
    }

    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            ExpVec e = ea + eb;
            switch (classify(vt, e)) {
                case Fate::Keep:
                    r.add_term(e, ca * cb);
                    break;
                case Fate::DropQuotient:
                    break;
                case Fate::DropLaurent:
                    for (int v = 0; v < vt.nvars(); ++v)
                        if (e[v] > vt.var(v).max_exp)
                            r.hor_[static_cast<size_t>(v)] =
                                std::min(r.hor_[static_cast<size_t>(v)], vt.var(v).max_exp);
                    break;
                case Fate::Below:
                    throw WindowError("product term " + mono_str(vt, e) +
                                      " below a window bottom");
            }
        }
    }
    return r;
}

Series mul_mono(const Series& a, const Mono& m) {
    if (m.c.is_zero()) return Series(a.vt_);
    const VarTable& vt = *a.vt_;
    Series r(a.vt_);
    for (size_t v = 0; v < static_cast<size_t>(vt.nvars()); ++v) {
        int32_t lo = sat_add(a.sm_[v], m.e[static_cast<int>(v)]);
        r.sm_[v] = lo;
        if (!a.terms_.empty() && lo < vt.var(static_cast<int>(v)).min_exp)
            throw WindowError("shifted support can reach below the window bottom of " +
                              vt.var(static_cast<int>(v)).name);
        r.hor_[v] = sat_add(a.hor_[v], m.e[static_cast<int>(v)]);
    }
    for (const auto& [ea, ca] : a.terms_) {
        ExpVec e = ea + m.e;
        switch (classify(vt, e)) {
            case Fate::Keep:
                r.add_term(e, ca * m.c);
                break;
            case Fate::DropQuotient:
                break;
            case Fate::DropLaurent:
                for (int v = 0; v < vt.nvars(); ++v)
                    if (e[v] > vt.var(v).max_exp)
                        r.hor_[static_cast<size_t>(v)] =
                            std::min(r.hor_[static_cast<size_t>(v)], vt.var(v).max_exp);
                break;
            case Fate::Below:
                throw WindowError("shifted term below a window bottom");
        }
    }
    return r;
}

Series pow_int(const Series& a, long k) {
    if (k < 0) return pow_int(invert(a), -k);
    Series r = Series::constant(a.table(), Rational(1));
    Series base = a;
    while (k > 0) {
        if (k & 1) r = mul(r, base);
        k >>= 1;
        if (k) base = mul(base, base);
    }
    return r;
}

bool ascending_dir(const VarTable& vt, const ExpVec& d) {
    if (d.is_zero()) return false;
    bool all_nonneg = true;
    for (int v = 0; v < vt.nvars(); ++v) {
        if (d[v] < 0) all_nonneg = false;
        if (d[v] > 0 && !vt.var(v).laurent()) return true;
    }
    return all_nonneg;
}

Series invert(const Series& a) {
    if (a.is_zero()) throw StructureError("inverse of zero");
    const VarTablePtr& vt = a.table();
    for (int v = 0; v < vt->nvars(); ++v)
        if (a.horizon(v) != kInfExp)
            throw StructureError("inverse of a series with a degraded horizon in " +
                                 vt->var(v).name);

    // Unit term: every other exponent differs from it by an ascending step.
    const ExpVec* mu0 = nullptr;
    for (const auto& [cand, c] : a.terms()) {
        bool ok = true;
        for (const auto& [mu, c2] : a.terms()) {
            if (mu == cand) continue;
            if (!ascending_dir(*vt, mu - cand)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            mu0 = &cand;
            break;
        }
    }
    if (!mu0) throw StructureError("series has no unit term; cannot invert");
    Rational c0 = a.coeff_raw(*mu0);

    // Accumulate sum_k H^k in a window shifted by +mu0, so the final shift
    // by -mu0 lands exactly in the original window.
    std::vector<VarSpec> shifted;
    for (int v = 0; v < vt->nvars(); ++v) {
        VarSpec s = vt->var(v);
        s.laurent_mark = s.laurent();
        s.min_exp += (*mu0)[v];
        s.max_exp += (*mu0)[v];
        if (s.min_exp > 0)
            throw WindowError("inverse support reaches below the window bottom of " + s.name);
        if (s.max_exp < 0)
            throw WindowError("inverse support sits above the window top of " + s.name);
        shifted.push_back(s);
    }
    VarTablePtr tvt = VarTable::make(shifted);

    Series h(tvt);
    {
        SeriesBuilder hb(tvt);
        for (const auto& [mu, c] : a.terms()) {
            if (mu == *mu0) continue;
            hb.add(mu - *mu0, -(c / c0), false);
        }
        h = hb.take();
    }

    Series acc = Series::constant(tvt, Rational(1));
    Series p = Series::constant(tvt, Rational(1));
    long iter = 0;
    while (true) {
        p = mul(p, h);
        acc += p;  // folds horizon clamps even when p has died
        if (p.is_zero()) break;
        if (++iter > kMaxIter) throw StructureError("inverse does not truncate");
    }

    Series r(vt);
    for (const auto& [e, c] : acc.terms_) r.terms_.emplace(e - *mu0, c / c0);
    for (size_t v = 0; v < kMaxVars; ++v) {
        int16_t sh = (*mu0)[static_cast<int>(v)];
        r.hor_[v] = (acc.hor_[v] >= kInfExp) ? kInfExp : sat(static_cast<int64_t>(acc.hor_[v]) - sh);
        r.sm_[v] = (acc.sm_[v] >= kInfExp) ? kInfExp : sat(static_cast<int64_t>(acc.sm_[v]) - sh);
    }
    return r;
}

Series geometric(VarTablePtr vt, const Mono& m) {
    if (m.c.is_zero()) return Series::constant(std::move(vt), Rational(1));
    if (m.e.is_zero()) throw StructureError("geometric series in a constant direction");
    bool has_negative = false;
    for (int v = 0; v < vt->nvars(); ++v)
        if (m.e[v] < 0) has_negative = true;

    SeriesBuilder b(vt);
    Rational ck(1);
    for (long k = 0;; ++k) {
        if (k > kMaxIter) throw StructureError("geometric series does not truncate");
        ExpVec e = static_cast<int>(k) * m.e;
        Fate f = classify(*vt, e);
        if (f == Fate::DropQuotient) break;  // the whole tail is quotient-zero from here on
        if (f == Fate::Below) throw WindowError("geometric tail reaches below a window bottom");
        if (f == Fate::DropLaurent) {
            if (has_negative)
                throw WindowError("geometric tail keeps descending beyond a Laurent top");
            for (int v = 0; v < vt->nvars(); ++v)
                if (m.e[v] > 0 && vt->var(v).laurent())
                    b.set_horizon(vt->var(v).name, vt->var(v).max_exp);
            break;
        }
        b.add(e, ck, false);
        ck *= m.c;
    }
    return b.take();
}

Series mul_one_minus(const Series& a, const Mono& m) {
    return a - mul_mono(a, m);
}

Series div_one_minus(const Series& a, const Mono& m) {
    if (m.c.is_zero()) return a;
    if (m.e.is_zero()) throw StructureError("division by (1 - constant) direction");
    const VarTable& vt = *a.vt_;
    for (int v = 0; v < vt.nvars(); ++v)
        if (m.e[v] < 0)
            throw ConfigError("div_one_minus needs a componentwise nonnegative direction");

    Series r(a.vt_);
    r.terms_ = a.terms_;
    for (size_t v = 0; v < static_cast<size_t>(vt.nvars()); ++v) {
        r.sm_[v] = a.sm_[v];
        // Claims of mul(a, geometric(m)): the geometric tail is exact except
        // past a Laurent top it drives through.
        int32_t geo_hor = kInfExp;
        int iv = static_cast<int>(v);
        if (m.e[iv] > 0 && vt.var(iv).laurent()) geo_hor = vt.var(iv).max_exp;
        r.hor_[v] = std::min(a.hor_[v], sat_add(a.sm_[v], geo_hor));
    }

    // Exponents are map-ordered and e + m.e is strictly later in that order,
    // so a single forward sweep finishes each coefficient before it is read.
    for (auto it = r.terms_.begin(); it != r.terms_.end(); ++it) {
        if (it->second.is_zero()) continue;
        ExpVec e = it->first + m.e;
        switch (classify(vt, e)) {
            case Fate::Keep:
                r.terms_[e] += it->second * m.c;
                break;
            case Fate::DropQuotient:
                break;
            case Fate::DropLaurent:
                for (int v = 0; v < vt.nvars(); ++v)
                    if (e[v] > vt.var(v).max_exp)
                        r.hor_[static_cast<size_t>(v)] =
                            std::min(r.hor_[static_cast<size_t>(v)], vt.var(v).max_exp);
                break;
            case Fate::Below:
                throw WindowError("propagated term below a window bottom");
        }
    }
    for (auto it = r.terms_.begin(); it != r.terms_.end();)
        it = it->second.is_zero() ? r.terms_.erase(it) : std::next(it);
    return r;
}

Series exp_series(const Series& a) {
    if (!a.coeff_raw(ExpVec{}).is_zero())
        throw StructureError("exp of a series with a constant term");
    Series acc = Series::constant(a.table(), Rational(1));
    Series p = Series::constant(a.table(), Rational(1));
    long k = 0;
    while (true) {
        ++k;
        if (k > kMaxIter) throw StructureError("exp does not truncate");
        p = mul(p, a) * Rational(1, k);
        acc += p;
        if (p.is_zero()) break;
    }
    return acc;
}

Series log_series(const Series& a) {
    if (!(a.coeff_raw(ExpVec{}) == Rational(1)))
        throw StructureError("log of a series whose constant term is not 1");
    Series h = a - Series::constant(a.table(), Rational(1));
    Series acc(a.table());
    Series p = Series::constant(a.table(), Rational(1));
    long k = 0;
    while (true) {
        ++k;
        if (k > kMaxIter) throw StructureError("log does not truncate");
        p = mul(p, h);
        acc += p * Rational((k % 2) ? 1 : -1, k);
        if (p.is_zero()) break;
    }
    return acc;
}

Series substitute(const Series& a, const std::vector<std::pair<int, Mono>>& images) {
    const VarTablePtr& vt = a.table();
    std::array<Mono, kMaxVars> target;
    for (int v = 0; v < kMaxVars; ++v)
        target[static_cast<size_t>(v)] = Mono{Rational(1), ExpVec::unit(v)};
    bool monotone = true;
    for (const auto& [v, m] : images) {
        if (v < 0 || v >= vt->nvars()) throw ConfigError("substitution of unknown variable");
        if (m.c.is_zero()) throw StructureError("substitution image with zero coefficient");
        target[static_cast<size_t>(v)] = m;
        for (int w = 0; w < kMaxVars; ++w)
            if (m.e[w] < 0) monotone = false;
    }

    std::vector<int> degraded;
    for (int v = 0; v < vt->nvars(); ++v)
        if (a.horizon(v) != kInfExp) degraded.push_back(v);
    if (!degraded.empty() && !monotone)
        throw StructureError(
            "substitution with descending images on a series with degraded horizons");

    Series r(vt);

    if (!degraded.empty()) {
        // Support lower bound of the image object, valid for hidden terms
        // too because the images are monotone.
        for (int w = 0; w < vt->nvars(); ++w) {
            int64_t lo = 0;
            for (int v = 0; v < vt->nvars(); ++v)
                lo += static_cast<int64_t>(a.support_min(v)) * target[static_cast<size_t>(v)].e[w];
            if (lo < vt->var(w).min_exp)
                throw WindowError("substitution image can reach below the window bottom of " +
                                  vt->var(w).name);
            r.sm_[static_cast<size_t>(w)] = sat(lo);
        }
        // Content missing or unreliable in the input exceeds the horizon of
        // some degraded variable v, so (images being monotone) its image
        // carries a v-exponent at or above v's landing bound.  Claims are
        // box intersections: clamping v's own horizon below that bound puts
        // every such image outside the claimed box through the v-coordinate
        // alone, so no other variable's claim needs to pay for it.
        for (int v : degraded) {
            int64_t land = (static_cast<int64_t>(a.horizon(v)) + 1) *
                           target[static_cast<size_t>(v)].e[v];
            for (int x = 0; x < vt->nvars(); ++x)
                if (x != v)
                    land += static_cast<int64_t>(a.support_min(x)) *
                            target[static_cast<size_t>(x)].e[v];
            r.hor_[static_cast<size_t>(v)] =
                std::min(r.hor_[static_cast<size_t>(v)], sat(land - 1));
        }
    }

    for (const auto& [e, c] : a.terms()) {
        ExpVec img;
        Rational cc = c;
        for (int v = 0; v < vt->nvars(); ++v) {
            if (e[v] == 0) continue;
            const Mono& m = target[static_cast<size_t>(v)];
            img = img + e[v] * m.e;
            if (!m.c.is_one()) cc *= m.c.pow(e[v]);
        }
        if (degraded.empty())
            for (int w = 0; w < vt->nvars(); ++w)
                r.sm_[static_cast<size_t>(w)] =
                    std::min(r.sm_[static_cast<size_t>(w)], static_cast<int32_t>(img[w]));
        switch (classify(*vt, img)) {
            case Fate::Keep:
                r.add_term(img, cc);
                break;
            case Fate::DropQuotient:
                break;
            case Fate::DropLaurent:
                for (int w = 0; w < vt->nvars(); ++w)
                    if (img[w] > vt->var(w).max_exp)
                        r.hor_[static_cast<size_t>(w)] =
                            std::min(r.hor_[static_cast<size_t>(w)], vt->var(w).max_exp);
                break;
            case Fate::Below:
                throw WindowError("substitution image below a window bottom");
        }
    }
    return r;
}

Series scale_vars(const Series& a, int r) {
    if (r < 1) throw ConfigError("scale_vars needs r >= 1");
    if (r == 1) return a;
    std::vector<std::pair<int, Mono>> images;
    for (int v = 0; v < a.table()->nvars(); ++v)
        images.emplace_back(v, Mono{Rational(1), ExpVec::unit(v, static_cast<int16_t>(r))});
    return substitute(a, images);
}

Series restrict_tops(const Series& a, const std::vector<std::pair<int, int32_t>>& tops) {
    Series r = a;
    for (const auto& [v, top] : tops) {
        if (v < 0 || v >= a.table()->nvars()) throw ConfigError("restrict of unknown variable");
        r.hor_[static_cast<size_t>(v)] = std::min(r.hor_[static_cast<size_t>(v)], top);
        for (auto it = r.terms_.begin(); it != r.terms_.end();) {
            if (it->first[v] > top)
                it = r.terms_.erase(it);
            else
                ++it;
        }
    }
    return r;
}

std::optional<Diff> first_difference(const Series& a, const Series& b, const Window& w) {
    a.check_same_table(b);
    const VarTable& vt = *a.table();
    for (int v = 0; v < vt.nvars(); ++v) {
        if (w.lo[static_cast<size_t>(v)] < vt.var(v).min_exp)
            throw WindowError("comparison box below the window of " + vt.var(v).name);
        if (w.hi[static_cast<size_t>(v)] > a.claimed_top(v) ||
            w.hi[static_cast<size_t>(v)] > b.claimed_top(v))
            throw WindowError("window too small: comparison box exceeds the exactness claims in " +
                              vt.var(v).name);
    }
    auto inside = [&](const ExpVec& e) {
        for (int v = 0; v < vt.nvars(); ++v)
            if (e[v] < w.lo[static_cast<size_t>(v)] || e[v] > w.hi[static_cast<size_t>(v)])
                return false;
        return true;
    };
    auto ia = a.terms().begin(), ea = a.terms().end();
    auto ib = b.terms().begin(), eb = b.terms().end();
    while (true) {
        while (ia != ea && !inside(ia->first)) ++ia;
        while (ib != eb && !inside(ib->first)) ++ib;
        if (ia == ea && ib == eb) break;
        if (ib == eb || (ia != ea && ia->first < ib->first))
            return Diff{ia->first, ia->second, Rational(0)};
        if (ia == ea || ib->first < ia->first) return Diff{ib->first, Rational(0), ib->second};
        if (!(ia->second == ib->second)) return Diff{ia->first, ia->second, ib->second};
        ++ia;
        ++ib;
    }
    return std::nullopt;
}

std::optional<Diff> first_difference(const Series& a, const Series& b) {
    return first_difference(a, b, Window::full(*a.table()));
}

Series transplant(const Series& a, const VarTablePtr& dst, const ExpVec& shift) {
    const VarTable& sv = *a.table();
    const VarTable& dv = *dst;
    std::vector<int> to_dst(static_cast<size_t>(sv.nvars()), -1);
    for (int i = 0; i < sv.nvars(); ++i) {
        to_dst[static_cast<size_t>(i)] = dv.index(sv.var(i).name);
        if (to_dst[static_cast<size_t>(i)] < 0 && a.horizon(i) < kInfExp)
            throw ConfigError("transplant: dropped variable " + sv.var(i).name +
                              " carries a truncation claim");
    }
    std::vector<bool> clamped(static_cast<size_t>(dv.nvars()), false);
    SeriesBuilder b(dst);
    for (const auto& [e, c] : a.terms()) {
        ExpVec ed{};
        for (int j = 0; j < dv.nvars(); ++j) ed[j] = shift[j];
        for (int i = 0; i < sv.nvars(); ++i) {
            int j = to_dst[static_cast<size_t>(i)];
            if (j < 0) {
                if (e[i] != 0)
                    throw ConfigError("transplant: dropped variable " + sv.var(i).name +
                                      " appears in a term");
                continue;
            }
            ed[j] = static_cast<int16_t>(ed[j] + e[i]);
        }
        bool dropped = false;
        for (int j = 0; j < dv.nvars(); ++j) {
            const VarSpec& s = dv.var(j);
            if (s.laurent() && ed[j] > s.max_exp) {
                dropped = true;
                clamped[static_cast<size_t>(j)] = true;
            }
        }
        if (!dropped) b.add(ed, c);  // quotient drop above ordinary tops; throw below bottoms
    }
    for (int j = 0; j < dv.nvars(); ++j) {
        const std::string& name = dv.var(j).name;
        int i = sv.index(name);
        long hor = kInfExp, sm = shift[j];
        if (i >= 0) {
            long h = a.horizon(i);
            // A variable without a hard bottom is only ever exact up to its
            // window top (arithmetic quotient-drops higher terms without
            // recording it), so the claim that survives a shift into a
            // different window is min(horizon, source window top).
            if (!sv.var(i).laurent())
                h = std::min(h, static_cast<long>(sv.var(i).max_exp));
            hor = h >= kInfExp ? static_cast<long>(kInfExp) : h + shift[j];
            sm = static_cast<long>(a.support_min(i)) + shift[j];
        }
        if (clamped[static_cast<size_t>(j)]) hor = std::min(hor, static_cast<long>(dv.var(j).max_exp));
        hor = std::min(hor, static_cast<long>(kInfExp));
        b.set_horizon(name, static_cast<int32_t>(hor));
        b.set_support_min(name, static_cast<int32_t>(std::min(sm, static_cast<long>(kInfExp))));
    }
    return b.take();
}

Series clamp_window_tops(const Series& a) {
    const VarTable& vt = *a.table();
    std::vector<std::pair<int, int32_t>> tops;
    for (int v = 0; v < vt.nvars(); ++v) tops.emplace_back(v, vt.var(v).max_exp);
    return restrict_tops(a, tops);
}

std::string mono_str(const VarTable& vt, const ExpVec& e) {
    std::ostringstream os;
    bool any = false;
    for (int v = 0; v < vt.nvars(); ++v) {
        if (e[v] == 0) continue;
        if (any) os << "*";
        os << vt.var(v).name;
        if (e[v] != 1) os << "^" << e[v];
        any = true;
    }
    if (!any) return "1";
    return os.str();
}

std::string term_str(const VarTable& vt, const ExpVec& e, const Rational& c) {
    std::string m = mono_str(vt, e);
    if (m == "1") return c.str();
    if (c.is_one()) return m;
    if ((-c).is_one()) return "-" + m;
    return c.str() + "*" + m;
}

std::string Series::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first && c.sign() < 0) {
            os << " - " << term_str(*vt_, e, -c);
            continue;
        }
        if (!first) os << " + ";
        os << term_str(*vt_, e, c);
        first = false;
    }
    return os.str();
}

SeriesBuilder::SeriesBuilder(VarTablePtr vt) : vt_(std::move(vt)) {
    hor_.fill(kInfExp);
    sm_.fill(kInfExp);
}

void SeriesBuilder::add(const ExpVec& e, const Rational& c, bool drop_ordinary) {
    if (taken_) throw StructureError("builder already consumed");
    if (c.is_zero()) return;
    for (int v = vt_->nvars(); v < kMaxVars; ++v)
        if (e[v] != 0) throw StructureError("builder term uses an exponent slot with no variable");
    switch (classify(*vt_, e)) {
        case Fate::Keep:
            break;
        case Fate::DropQuotient:
            if (drop_ordinary) return;
            throw WindowError("builder term above an ordinary window top");
        case Fate::DropLaurent:
            throw WindowError("builder term above a Laurent window top");
        case Fate::Below:
            throw WindowError("builder term below a window bottom");
    }
    auto [it, fresh] = terms_.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void SeriesBuilder::set_horizon(const std::string& var, int32_t h) {
    int v = vt_->require(var);
    hor_[static_cast<size_t>(v)] = std::min(hor_[static_cast<size_t>(v)], h);
}

void SeriesBuilder::set_support_min(const std::string& var, int32_t m) {
    int v = vt_->require(var);
    sm_[static_cast<size_t>(v)] = m;
    sm_explicit_[v] = true;
}

Series SeriesBuilder::take() {
    if (taken_) throw StructureError("builder already consumed");
    taken_ = true;
    Series s(vt_);
    s.terms_ = std::move(terms_);
    s.hor_ = hor_;
    for (int v = 0; v < kMaxVars; ++v) {
        if (sm_explicit_[v]) {
            s.sm_[static_cast<size_t>(v)] = sm_[static_cast<size_t>(v)];
        } else {
            int32_t m = kInfExp;
            for (const auto& [e, c] : s.terms_) m = std::min<int32_t>(m, e[v]);
            s.sm_[static_cast<size_t>(v)] = m;
        }
    }
    return s;
}

}  // namespace qtno

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace qtno {

// Truncated multivariate Laurent series over Rational.
//
// Every variable carries a window [min_exp, max_exp].  Ordinary variables
// (min_exp == 0) are handled as a quotient ring: exponents above max_exp
// form an ideal, so dropping them is always sound and needs no bookkeeping.
// Laurent variables (min_exp < 0) have no such ideal.  For them a series
// tracks, per variable,
//
//   hor_[v]  exactness horizon: stored coefficients agree with the
//            represented object at every exponent vector E with
//            E[w] <= hor_[w] for all w.  kInfExp means the object has no
//            support above the window top in v at all.
//   sm_[v]   a true lower bound on the support of the represented object,
//            tracked through constructions and operations, never inferred
//            from stored terms after the fact.
//
// Multiplication may drop products above a Laurent top; the horizon is
// clamped there.  A product whose support could reach below a window
// bottom is an error: windows must be deep enough to hold every principal
// part that actually arises.  Coefficient extraction and comparison check
// the requested exponents against the claimed box and fail loudly instead
// of returning silently wrong values.

constexpr int kMaxVars = 12;
constexpr int32_t kInfExp = INT32_MAX / 4;

struct ExpVec {
    std::array<int16_t, kMaxVars> e{};

    int16_t operator[](int i) const { return e[static_cast<size_t>(i)]; }
    int16_t& operator[](int i) { return e[static_cast<size_t>(i)]; }

    bool operator==(const ExpVec& o) const { return e == o.e; }
    bool operator!=(const ExpVec& o) const { return e != o.e; }
    bool operator<(const ExpVec& o) const { return e < o.e; }

    bool is_zero() const {
        for (auto x : e)
            if (x != 0) return false;
        return true;
    }

    static ExpVec unit(int i, int16_t k = 1) {
        ExpVec r;
        r[i] = k;
        return r;
    }
};

ExpVec operator+(const ExpVec& a, const ExpVec& b);
ExpVec operator-(const ExpVec& a, const ExpVec& b);
ExpVec operator-(const ExpVec& a);
ExpVec operator*(int k, const ExpVec& a);

// Monomial with coefficient: c * X^e.
struct Mono {
    Rational c;
    ExpVec e;
};

inline Mono mono_mul(const Mono& a, const Mono& b) { return Mono{a.c * b.c, a.e + b.e}; }
inline Mono mono_pow(const Mono& a, int k) {
    ExpVec e;
    for (int i = 0; i < kMaxVars; ++i) e[i] = static_cast<int16_t>(k * a.e[i]);
    return Mono{a.c.pow(k), e};
}

struct VarSpec {
    std::string name;
    int32_t min_exp = 0;
    int32_t max_exp = 0;
    // Marks a variable as Laurent even when a shifted window has
    // min_exp >= 0; set internally by window-shifting operations.
    bool laurent_mark = false;

    bool laurent() const { return laurent_mark || min_exp < 0; }
};

class VarTable;
using VarTablePtr = std::shared_ptr<const VarTable>;

class VarTable {
  public:
    // Sorts the specs into canonical order and validates them
    // (min_exp <= 0 <= max_exp, distinct names).
    static VarTablePtr make(std::vector<VarSpec> specs);

    int nvars() const { return static_cast<int>(vars_.size()); }
    const VarSpec& var(int i) const { return vars_[static_cast<size_t>(i)]; }
    int index(const std::string& name) const;    // -1 when absent
    int require(const std::string& name) const;  // throws ConfigError
    bool same(const VarTable& o) const;
    bool has_laurent() const { return has_laurent_; }
    bool in_window(const ExpVec& e) const;
    std::string str() const;

  private:
    std::vector<VarSpec> vars_;
    bool has_laurent_ = false;
};

// Canonical display/report rank of a variable name; lower sorts first.
std::pair<int, std::string> var_rank(const std::string& name);

// Per-variable exponent box, used for comparisons narrower than the window.
struct Window {
    std::array<int32_t, kMaxVars> lo{};
    std::array<int32_t, kMaxVars> hi{};

    static Window full(const VarTable& vt);
};

struct Diff {
    ExpVec e;
    Rational lhs, rhs;
};

class Series {
  public:
    Series() = default;
    explicit Series(VarTablePtr vt);
    static Series constant(VarTablePtr vt, const Rational& c);
    static Series monomial(VarTablePtr vt, const Rational& c, const ExpVec& e);

    const VarTablePtr& table() const { return vt_; }
    bool is_zero() const { return terms_.empty(); }
    size_t nterms() const { return terms_.size(); }
    const std::map<ExpVec, Rational>& terms() const { return terms_; }

    int32_t horizon(int v) const { return hor_[static_cast<size_t>(v)]; }
    int32_t support_min(int v) const { return sm_[static_cast<size_t>(v)]; }
    // Exactness claim in variable v: min(horizon, window top).
    int32_t claimed_top(int v) const;

    // Stored coefficient, no exactness check.
    Rational coeff_raw(const ExpVec& e) const;
    // Checked coefficient: e must lie inside the claimed box.
    Rational coeff(const ExpVec& e) const;

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(const Rational& c);
    Series operator-() const;

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, const Rational& c) { return a *= c; }
    friend Series operator*(const Rational& c, Series a) { return a *= c; }
    friend Series operator*(const Series& a, const Series& b) { return mul(a, b); }

    friend Series mul(const Series& a, const Series& b);
    friend Series mul_mono(const Series& a, const Mono& m);
    friend Series div_one_minus(const Series& a, const Mono& m);
    friend Series invert(const Series& a);
    friend Series substitute(const Series& a, const std::vector<std::pair<int, Mono>>& images);
    friend Series restrict_tops(const Series& a, const std::vector<std::pair<int, int32_t>>& tops);
    friend std::optional<Diff> first_difference(const Series& a, const Series& b, const Window& w);
    friend class SeriesBuilder;

    std::string str() const;

  private:
    void check_same_table(const Series& o) const;
    void add_term(const ExpVec& e, const Rational& c);  // insert-accumulate, erases zeros

    VarTablePtr vt_;
    std::map<ExpVec, Rational> terms_;
    std::array<int32_t, kMaxVars> hor_{};
    std::array<int32_t, kMaxVars> sm_{};
};

// Assembles a series from raw terms with explicit exactness metadata.
// Constructions (theta sums, Pochhammer expansions, closed forms) use this;
// the caller vouches that the metadata is true of the object being built.
// Without explicit metadata the object is taken to be complete: horizons
// stay at kInfExp and support bounds come from the accumulated terms.
class SeriesBuilder {
  public:
    explicit SeriesBuilder(VarTablePtr vt);
    // Accumulate c at e.  With drop_ordinary, an exponent above an ordinary
    // top is quotient-dropped; anything else out of window throws.
    void add(const ExpVec& e, const Rational& c, bool drop_ordinary = true);
    void set_horizon(const std::string& var, int32_t h);
    void set_support_min(const std::string& var, int32_t m);
    Series take();

  private:
    VarTablePtr vt_;
    std::map<ExpVec, Rational> terms_;
    std::array<int32_t, kMaxVars> hor_{};
    std::array<int32_t, kMaxVars> sm_{};
    bool sm_explicit_[kMaxVars] = {};
    bool taken_ = false;
};

Series mul(const Series& a, const Series& b);
Series mul_mono(const Series& a, const Mono& m);

// a^k for k >= 0; negative k inverts first.
Series pow_int(const Series& a, long k);

// Multiplicative inverse.  Requires a unit term: a monomial mu0 of a such
// that every other exponent differs from mu0 by an ascending step (nonzero,
// and either componentwise >= 0 or positive in some ordinary variable).
// All horizons of a must be at kInfExp.
Series invert(const Series& a);

// Sum_{k>=0} (c X^d)^k for an ascending monomial direction d.
Series geometric(VarTablePtr vt, const Mono& m);

// a * (1 - m): two shifted copies, cheaper than a general product.
Series mul_one_minus(const Series& a, const Mono& m);

// a / (1 - m) == a * geometric(m), computed by a single ordered sweep that
// propagates each coefficient up the m-ray (linear in the result size, not
// quadratic).  Requires every component of m's direction to be >= 0 and the
// direction nonzero; claims match mul(a, geometric(m)).
Series div_one_minus(const Series& a, const Mono& m);

// d is "ascending": nonzero, and either componentwise >= 0 or positive in
// some ordinary variable, so repeated addition of d leaves every window
// through a top.
bool ascending_dir(const VarTable& vt, const ExpVec& d);

// exp of a series with no constant term whose powers die off; log of a
// series with constant term 1.
Series exp_series(const Series& a);
Series log_series(const Series& a);

// Substitute variables by monomials: for (v, m) in images, v -> m.
// Unlisted variables map to themselves.  On a series with degraded
// horizons every image component must be >= 0 (monotone), and the result
// horizons are derived from provable bounds on where hidden terms can land.
Series substitute(const Series& a, const std::vector<std::pair<int, Mono>>& images);

// Every variable v -> v^r (plethystic power-raise on the inner alphabet).
Series scale_vars(const Series& a, int r);

// Chop the series to e[v] <= tops[v] and lower the claimed horizons to
// match.  Used before substitutions that expand exponents.
Series restrict_tops(const Series& a, const std::vector<std::pair<int, int32_t>>& tops);

// Re-express a over a different variable table, adding shift (in destination
// coordinates) to every term.  Variables are matched by name.  Source-only
// variables must be inert: no term may use them and their horizon must be
// unbounded (for a variable without a hard bottom this is the caller's
// assertion that the series is genuinely free of it, since quotient drops
// are not recorded).  Destination-only variables receive the bare shift.
// Claims translate with the shift; a variable without a hard bottom is only
// exact up to its source window top, so its claim moves as
// min(horizon, source top) + shift.  Terms landing above an ordinary top are
// quotient-dropped; above a Laurent top they are dropped and the claim is
// clamped to the top; below a window bottom the call throws WindowError.
Series transplant(const Series& a, const VarTablePtr& dst, const ExpVec& shift);

// Restrict every variable's claim (and support) to its own window top.
Series clamp_window_tops(const Series& a);

// First coefficient difference between a and b inside w (canonical order),
// or nullopt when they agree everywhere in w.  Throws WindowError unless
// both claimed boxes cover w.
std::optional<Diff> first_difference(const Series& a, const Series& b, const Window& w);
std::optional<Diff> first_difference(const Series& a, const Series& b);

std::string mono_str(const VarTable& vt, const ExpVec& e);
std::string term_str(const VarTable& vt, const ExpVec& e, const Rational& c);

}  // namespace qtno

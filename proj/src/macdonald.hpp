#pragma once

#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "factored.hpp"
#include "hooks.hpp"
#include "partition.hpp"
#include "series.hpp"

namespace qtno {

// ---------------------------------------------------------------------------
// Branching coefficients as parameter-free products.
//
// A QtProd is a product prod (1 - q^a t^l)^mult over pairs (a, l) of
// nonnegative integers.  The branching coefficients psi/phi and the hook
// normalisations b are stored this way and instantiated afterwards at
// arbitrary parameter monomials (q,t), (t,q), (1/q,1/t) or numbers.
// ---------------------------------------------------------------------------

struct QtProd {
    std::map<std::pair<int, int>, long> f;  // (a, l) -> multiplicity

    void add(int a, int l, long m);
    void add_all(const QtProd& o, long scale = 1);
    bool operator==(const QtProd& o) const { return f == o.f; }
};

// Expansion coefficient of P_{la} on P_{mu} * x^{|la/mu|} (horizontal strips).
QtProd psi_factors(const Partition& la, const Partition& mu);
// Expansion coefficient of Q_{la} on Q_{mu} * x^{|la/mu|}.
QtProd phi_factors(const Partition& la, const Partition& mu);
// b_la = c_la / c'_la.
QtProd b_factors(const Partition& la);

FactoredSeries qtprod_fs(const QtProd& p, const Mono& q, const Mono& t);
Rational qtprod_eval(const QtProd& p, const Rational& q0, const Rational& t0);

// ---------------------------------------------------------------------------
// Shared branching-coefficient cache (thread-safe; optional disk snapshot).
// ---------------------------------------------------------------------------

enum class Kind { P, Q };

class BranchingCache {
  public:
    QtProd get(Kind k, const Partition& la, const Partition& mu);
    size_t entries() const;
    void clear();
    // Text snapshot with a format-version header; load returns false (and
    // leaves the cache unchanged) on any mismatch, so stale files are safe
    // to ignore or delete.
    bool save(const std::string& path) const;
    bool load(const std::string& path);

  private:
    mutable std::mutex mx_;
    std::map<std::tuple<int, Partition, Partition>, QtProd> map_;
};

BranchingCache& branching_cache();  // process-wide instance

// ---------------------------------------------------------------------------
// Evaluation of (skew) Macdonald polynomials at monomial alphabets.
// ---------------------------------------------------------------------------

struct MacParams {
    VarTablePtr vt;
    Mono q, t;
};

// All partitions nu with mu <= nu <= la componentwise.
std::vector<Partition> partitions_between(const Partition& mu, const Partition& la);

// P_{la/mu} (kind P) or Q_{la/mu} (kind Q) at the listed monomial entries,
// via the branching rule, peeling the last entry first.  Zero when mu is not
// contained in la, and for an empty alphabet reduces to [la == mu].
Series eval_skew_alphabet(Kind k, const Partition& la, const Partition& mu,
                          const std::vector<Mono>& entries, const MacParams& P);

Series eval_P(const Partition& la, const std::vector<Mono>& entries, const MacParams& P);
Series eval_skew_Q(const Partition& la, const Partition& mu,
                   const std::vector<Mono>& entries, const MacParams& P);

// eval_skew_alphabet for every target shape in `las` at once, sharing one
// recursion memo (the targets' sub-recursions overlap heavily when the
// targets fill out a box), and applying branching coefficients factor by
// factor instead of expanding them whenever the instantiated factor monomial
// is componentwise nonnegative.
std::map<Partition, Series> eval_skew_alphabet_batch(Kind k, const std::vector<Partition>& las,
                                                     const Partition& mu,
                                                     const std::vector<Mono>& entries,
                                                     const MacParams& P);

// Evaluation at the infinite alphabet head[0], ..., head[h-1], pre*base^h,
// pre*base^{h+1}, ... (so with an empty head the alphabet is pre, pre*base,
// pre*base^2, ...).  The alphabet is cut off after enough entries that every
// omitted term lies above the window top in each variable that base grows in
// ("driving" variables): a term using at least one omitted entry has
// v-exponent >= (d-1)*floor_v + pre_v + n*base_v where d = |la/mu|, floor_v
// is the minimal v-exponent over the whole alphabet, and branching
// coefficients only raise driving exponents.  The result's claims are then
// cut at the window top of each driving variable, so they cover the full
// window.  `extra` appends further entries beyond the computed cutoff; the
// result must not change inside the claims (used by doubling tests).
Series eval_skew_tail_geom(Kind k, const Partition& la, const Partition& mu,
                           const std::vector<Mono>& head, const Mono& pre,
                           const Mono& base, const MacParams& P, int extra = 0);

// Geometric alphabet pre, pre*base, pre*base^2, ...
Series skew_geom(Kind k, const Partition& la, const Partition& mu,
                 const Mono& pre, const Mono& base, const MacParams& P, int extra = 0);

// ---------------------------------------------------------------------------
// Closed principal forms.
// ---------------------------------------------------------------------------

// P_la(t^{n-1}, ..., t, 1; q, t) = t^{n(la)} (t^n; q,t)_la / c_la.
FactoredSeries principal_P_fs(const Partition& la, int n, const Mono& q, const Mono& t);
Series principal_P(const Partition& la, int n, const MacParams& P);

// P_la(1, t, t^2, ...; q, t) = t^{n(la)} / c_la.
FactoredSeries principal_P_inf_fs(const Partition& la, const Mono& q, const Mono& t);
Series principal_P_inf(const Partition& la, const MacParams& P);

// Q_{la/mu}(a, a t, a t^2, ...; q, t) = a^{|la/mu|} Q_{la/mu}(1, t, t^2, ...).
Series skew_Q_principal(const Partition& la, const Partition& mu, const Mono& a,
                        const MacParams& P);

// ---------------------------------------------------------------------------
// q,t-binomial coefficients and plethystic substitution.
// ---------------------------------------------------------------------------

// [la; mu]_{q,t} = t^{n(mu)-n(la)} (c'_la / c'_mu) Q_{la/mu}(1, t, t^2, ...).
// Zero when mu is not contained in la.
Series qt_binomial(const Partition& la, const Partition& mu, const MacParams& P);

// P_{la/mu} evaluated at the formal difference alphabet (a - b)/(1 - t):
//   sum_{mu <= nu <= la} (-1)^{|nu/mu|}
//       P_{la/nu}(a, a t, a t^2, ...; q, t) Q_{nu'/mu'}(b, b q, b q^2, ...; t, q).
Series plethystic_eval(const Partition& la, const Partition& mu, const Mono& a,
                       const Mono& b, const MacParams& P);

// ---------------------------------------------------------------------------
// Refined topological vertex in half-power variables Z, W (q = Z^2, t = W^2):
//   C_{la,mu,nu}(t,q) = q^{n(mu')+n(nu')+(|la|+|mu|+|nu|)/2} t^{-n(mu)} / c_nu
//     * sum_eta t^{-|eta|} s_{la'/eta}(t^rho q^{-nu}) s_{mu/eta}(q^rho t^{-nu'}).
// The table must contain Z and W.
// ---------------------------------------------------------------------------

Series refined_vertex(const Partition& la, const Partition& mu, const Partition& nu,
                      const VarTablePtr& vt);

// ---------------------------------------------------------------------------
// Numeric oracles over exact rationals (test support).
// ---------------------------------------------------------------------------

using PolyExp = std::vector<int>;          // one exponent per variable
using Poly = std::map<PolyExp, Rational>;  // multivariate polynomial

Poly poly_mul(const Poly& a, const Poly& b);
Poly power_sum_poly(int r, int d);                       // p_r in d variables
Poly monomial_sym_poly(const Partition& nu, int d);      // m_nu in d variables
Rational poly_eval(const Poly& p, const std::vector<Rational>& x);
Rational m_eval(const Partition& nu, const std::vector<Rational>& x);
Rational z_stat_rat(const Partition& p);  // prod_i i^{m_i} m_i!

// Power-sum <-> monomial transition at degree n over n variables:
// p_mu = sum_nu M[mu][nu] m_nu and m_mu = sum_nu Minv[mu][nu] p_nu,
// indexed by all_of_size(n).
struct PMTransition {
    std::vector<Partition> parts;
    std::vector<std::vector<Rational>> M;
    std::vector<std::vector<Rational>> Minv;
};
PMTransition pm_transition(int n);

// Independent construction of P_la at a numeric parameter point by
// Gram-Schmidt orthogonalisation of the monomial basis against the
// power-sum inner product <p_la, p_mu> = delta z_la prod (1-q0^{la_i})/(1-t0^{la_i}).
struct GSOracle {
    int max_size = 0;
    Rational q0, t0;
    // m-expansion of P_la; keys are partitions of |la|.
    std::map<Partition, std::map<Partition, Rational>> mcoeff;
    // Gram matrix of the monomial basis (equal-degree pairs only).
    std::map<std::pair<Partition, Partition>, Rational> gram_m;

    Poly expand(const Partition& la, int d) const;  // in x_1..x_d
    Rational inner_PP(const Partition& la, const Partition& mu) const;
};

GSOracle gram_schmidt_oracle(int max_size, const Rational& q0, const Rational& t0);

// ---------------------------------------------------------------------------
// Interpolation (shifted) Macdonald polynomials at numeric parameters:
// the unique symmetric polynomial of degree |mu| in n variables with
// [x^mu] = 1 vanishing at x = q0^la t0^{delta_n} for all la != mu with
// |la| <= |mu|, l(la) <= n.
// ---------------------------------------------------------------------------

struct InterpPoly {
    Partition mu;
    int n = 0;
    Rational q0, t0;
    std::map<Partition, Rational> coeff;  // on m_nu, |nu| <= |mu|, l(nu) <= n

    Rational eval(const std::vector<Rational>& x) const;  // x.size() == n
};

std::vector<Partition> interp_basis(int size, int n);
std::vector<Rational> interp_point(const Partition& la, int n,
                                   const Rational& q0, const Rational& t0);

// Throws StructureError("...resample...") when the linear system is singular
// at the given parameter point.
InterpPoly interpolation_solve(const Partition& mu, int n,
                               const Rational& q0, const Rational& t0);

struct SpotCheck {
    bool pass = true;
    std::string detail;  // failures, "; "-separated
};

// Five independent checks of the solved polynomial: extra vanishing,
// normalisation value, stability under (t x, 1)-extension, top-degree
// agreement with the Gram-Schmidt construction, and the binomial theorem.
SpotCheck interpolation_spot_check(const Partition& mu, int n,
                                   const Rational& q0, const Rational& t0);

}  // namespace qtno

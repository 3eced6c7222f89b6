#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "macdonald.hpp"
#include "tgraded.hpp"

namespace qtno {

// ===========================================================================
// Hook-product partition sums and their closed product forms.
//
// Every "product" side here is assembled through the (plethystic) exponential
// of a small closed seed, never as a literal triple product: the T^n slot of
// the log is a finite sum of scaled copies of one rational series.
// ===========================================================================

// q, t ordinary up to `deg`; u a Laurent variable on [ulo, uhi] (ulo <= 0).
VarTablePtr qt_hook_table(int deg, int ulo, int uhi);

// Slot k: sum over |la| = k of
//   prod_{s in la} (1 - u q^{a+1} t^l)(1 - u^{-1} q^a t^{l+1})
//               / ((1 - q^{a+1} t^l)(1 - q^a t^{l+1})).
TGraded qt_hook_sum(int K, const VarTablePtr& vt);

// prod_{i,j,k >= 1} (1 - u q^i t^{j-1} T^k)(1 - u^{-1} q^{i-1} t^j T^k)
//                 / ((1 - q^{i-1} t^{j-1} T^k)(1 - q^i t^j T^k))
//   == Exp(seed * (T + T^2 + ...)),
//   seed = (1 + qt - uq - u^{-1} t) / ((1-q)(1-t)).
TGraded qt_hook_product(int K, const VarTablePtr& vt);

// ---------------------------------------------------------------------------
// t = q specialization: the per-cell ratio collapses onto the hook multiset.
// ---------------------------------------------------------------------------

// q ordinary up to `deg`; u Laurent on [ulo, uhi].
VarTablePtr hook_multiset_table(int deg, int ulo, int uhi);

// Slot k: sum over |la| = k of prod_{h in hooks(la)} (1-u q^h)(1-u^{-1} q^h)/(1-q^h)^2.
TGraded hook_multiset_sum(int K, const VarTablePtr& vt);

// prod_{k,r >= 1} (1-u q^r T^k)^r (1-u^{-1} q^r T^k)^r
//              / ((1-q^{r-1} T^k)^r (1-q^{r+1} T^k)^r)
//   == Exp(seed * (T + T^2 + ...)),  seed = (1 + q^2 - (u + u^{-1}) q)/(1-q)^2.
TGraded hook_multiset_product(int K, const VarTablePtr& vt);

// ---------------------------------------------------------------------------
// Classical limit: hook squares.  s is a formal variable (the square of the
// deformation parameter); every slot is a polynomial in s.
// ---------------------------------------------------------------------------

VarTablePtr hook_square_table(int K);

// Slot k: sum over |la| = k of prod_{h in hooks(la)} (1 - s/h^2).
TGraded hook_square_sum(int K, const VarTablePtr& vt);

// prod_{k >= 1} (1 - T^k)^{s-1}, slot n assembled from the logarithm:
// log-slot n = (1-s) * sum_{d | n} 1/d.
TGraded hook_square_product(int K, const VarTablePtr& vt);

// ---------------------------------------------------------------------------
// Genus-weighted hook functions in half-power variables.  Z and W stand for
// the square roots of the two hook parameters; the second original variable
// is 1/W, so these series live in Z >= 0 and W bounded below.
// ---------------------------------------------------------------------------

// Z ordinary up to `deg`; W Laurent with a bottom deep enough for the genus-g
// normalizing prefactor on partitions of size <= n_max (plus slack 2 for the
// (1 - W^{-2}) prefactor used downstream).
VarTablePtr genus_hook_table(int deg, int g, int n_max);

// Slot n: sum over |la| = n of the genus-g hook function (see fs_genus_hook).
TGraded genus_hook_sum(int g, int K, const VarTablePtr& vt);

// Genus 0 closed form: prod_{i,j >= 1} 1/(1 - Z^{2(i-1)} W^{2j} T)
//   == Exp(T * W^2 / ((1-Z^2)(1-W^2))).
TGraded genus0_product(int K, const VarTablePtr& vt);

// Genus 1 closed form: prod_{i,j,k >= 1}
//   (1 - Z^{2i-1} W^{2j-1} T^k)^2 / ((1 - Z^{2i-2} W^{2j-2} T^k)(1 - Z^{2i} W^{2j} T^k))
//   == Exp(seed * (T + T^2 + ...)),  seed = (1 - ZW)^2 / ((1-Z^2)(1-W^2)).
TGraded genus1_product(int K, const VarTablePtr& vt);

// Moebius pipeline over the genus hook sum: from S_g = sum_la H_la T^{|la|}
// compute U_n = n * [T^n] log S_g and
//   hbar_n = (1/n)(Z^2 - 1)(1 - W^{-2}) sum_{d | n} mu(d) U_{n/d}(Z^d, W^d).
// For g = 1 each hbar_n is checked to be exactly Z^2 - 2 Z W^{-1} + W^{-2};
// for g = 0 against W^{2n} / ((1-Z^{2n})(1-W^{2n})).  For g >= 1 the report
// carries sign-pattern and weight evidence for hbar_n at (z, -w).
struct HrvReport {
    int g = 0;
    int n_max = 0;
    int deg = 0;
    bool closed_form_pass = true;  // meaningful for g = 0 and g = 1
    std::string detail;            // first failure; empty when everything passed
    long evidence_checked = 0;     // coefficients tested for the sign pattern
    long evidence_violations = 0;
    int max_weight = 0;            // largest z-degree + w-degree seen in any hbar_n
    std::vector<Series> hbar;      // hbar[n] for n = 1..n_max; hbar[0] unused
};
HrvReport hrv_pipeline(int g, int n_max, int deg);

// ===========================================================================
// The box-truncated double sum f_{n,m}(u, T; q, t) and its reformulations.
//
// f_{n,m} is a polynomial in T of degree nm whose T^k u^b coefficients are
// polynomials in q, t; the three builders construct it by structurally
// different routes and must agree bit for bit on the shared window.
// ===========================================================================

// q, t ordinary up to J; u Laurent on [-nm, nm].
VarTablePtr fnm_table(int n, int m, int J);

// Double sum over pairs (la, mu) of box partitions, each pair contributing
//   sign * u^{nm-|la|-|mu|} q^{Sq} t^{St}
//     * P_la(t^{delta_n}) P_{la'}(q^{delta_m}) P_mu(q^la t^{delta_n}) P_{mu'}(t^{la'} q^{delta_m})
// computed in per-|la| sandbox windows and transplanted onto the shared
// table class by class (a class = fixed (|la|, |mu|), where the u-exponent
// and the q,t-shifts are constant).  `jobs` <= 0 picks a thread count.
TGraded fnm_double_sum(int n, int m, const VarTablePtr& vt, int jobs = 0);

// Single sum over box partitions la of
//   (-tT/u)^{|la|} P_la(t^{delta_n}) P_{la'}(q^{delta_m})
//     * prod_{i<=n, j<=m} (1 - u q^{j-la_i} t^{i-la'_j-1}),
// computed in one Laurent q,t sandbox and transplanted class by class.
TGraded fnm_single_sum(int n, int m, const VarTablePtr& vt);

// Hook form: prod_{i<=n, j<=m} (1 - u q^j t^{i-1}) times the sum over box
// partitions la of T^{|la|} times a per-cell ratio of hook factors; computed
// directly on the shared table.  `max_slot` >= 0 caps the computed grading
// (used for stable-limit runs where only low slots are needed).
TGraded fnm_hook_form(int n, int m, const VarTablePtr& vt, int max_slot = -1);

struct FnmResult {
    int n = 0, m = 0;
    int J = 0;  // q,t window top the three builders were run at
    TGraded double_sum, single_sum, hook_form;
    const TGraded& value() const { return hook_form; }
};

// Run all three builders on a fresh fnm_table(n, m, J) and check they agree
// bit for bit (throws VerifyError on any disagreement).
FnmResult fnm(int n, int m, int J = 8, int jobs = 0);

// ---------------------------------------------------------------------------
// Coefficient views and structural checks.
// ---------------------------------------------------------------------------

// (q-exponent, t-exponent) -> coefficient
using QtMap = std::map<std::pair<int, int>, Rational>;

// T^k, u^b slices of a graded value over a q,t,u table.
struct TgView {
    int order = 0;
    std::map<std::pair<int, int>, QtMap> slice;  // key (k, b)
    const QtMap* get(int k, int b) const;
};
TgView tg_view(const TGraded& a);

struct CheckReport {
    bool pass = true;
    std::string detail;  // first failure; empty when the check passed
};

// T^{nm} f(u/T, 1/T; q, t) == f(u, T; q, t): slice (k, b) == slice (nm-k-b, b).
CheckReport check_grading_reversal(const TgView& v, int n, int m);

// f(tT/(uq), T; q, t) == f(u, T; q, t): t^b * slice(k, b) == q^b * slice(k+b, -b),
// compared on the box both sides determine at q,t-window top J.
CheckReport check_u_inversion(const TgView& v, int n, int m, int J);

// f_{n,m}(u, T; q, t) == f_{m,n}(qu/t, T; t, q):
//   t^b * slice_{n,m}(k, b)(q, t) == q^b * slice_{m,n}(k, b)(t, q).
CheckReport check_transpose(const TgView& vnm, const TgView& vmn, int n, int m, int J);

// u = t collapses f to prod_{i<=n, j<=m} (1 - q^j t^i) at T^0; u = 1/q to the
// same product at T^{nm}; and f(u, uT) has a u -> 0 limit whose T^k slot is
// (-1)^k e_k({q^{j-1} t^i}).  J is the q,t top the view was built at; the
// collapsed sums are complete up to degree J - nm.
CheckReport check_special_values(const TgView& v, int n, int m, int J);

// Coefficient-level evidence (reported, never gating): every coefficient is
// an integer, and after (u, q, t) -> (-z/w, z^2, 1/w^2) every fully
// determined (z, w)-coefficient is nonnegative.
struct EvidenceReport {
    long checked = 0;
    long violations = 0;
    bool integral = true;
    std::string detail;
};
EvidenceReport fnm_conjecture_evidence(const TGraded& f, int n, int m, int J);

// Stable limit: for n = m = deg+1 the hook form agrees with
// (uq; q,t)_inf * qt_hook_sum and with the closed product
// (uq, u^{-1} t T; q,t,T)_inf / (T, qt T; q,t,T)_inf on slots 0..K.
CheckReport stable_limit_check(int K, int deg);

}  // namespace qtno

#pragma once

#include "factored.hpp"
#include "partition.hpp"

namespace qtno {

// Parameters enter as monomials so the same products serve (q,t), (t,q),
// (1/q,1/t) and numeric specializations.
Mono var_mono(const VarTablePtr& vt, const std::string& name, int k = 1);

// c_lambda  = prod_cells (1 - q^arm t^(leg+1))
FactoredSeries fs_hook_c(const Partition& lam, const Mono& q, const Mono& t);
// c'_lambda = prod_cells (1 - q^(arm+1) t^leg)
FactoredSeries fs_hook_cprime(const Partition& lam, const Mono& q, const Mono& t);
// b_lambda = c_lambda / c'_lambda
FactoredSeries fs_hook_b(const Partition& lam, const Mono& q, const Mono& t);
// (z; q,t)_lambda = prod_cells (1 - z q^coarm t^-coleg)
FactoredSeries fs_poch_lambda(const Partition& lam, const Mono& z, const Mono& q, const Mono& t);

// Summand of the u-deformed hook generating function:
//   prod_cells (1 - u q^(arm+1) t^leg)(1 - u^-1 q^arm t^(leg+1))
//            / (1 - q^(arm+1) t^leg)(1 - q^arm t^(leg+1)).
// At u = t and at u = 1/q some cell factor vanishes for every nonempty
// partition (an outer corner has arm = leg = 0), which kills the summand.
FactoredSeries fs_qtno_summand(const Partition& lam, const Mono& u, const Mono& q, const Mono& t);

// Genus-g hook function on the half-power grid, evaluated at (z, w) = (Z, 1/W)
// so every parenthesis normalizes to unit-monomial * (1 - positive monomial):
//   prod_cells (z^(2a+1) - w^(2l+1))^2g / ((z^(2a+2) - w^(2l))(z^(2a) - w^(2l+2)))
//   = W^((1-g)(4 n(lam) + 2|lam|))
//     * prod_cells (1 - Z^(2a+1) W^(2l+1))^2g
//                / ((1 - Z^(2a+2) W^(2l)) (1 - Z^(2a) W^(2l+2))).
FactoredSeries fs_genus_hook(const Partition& lam, int g, const Mono& Z, const Mono& W);

}  // namespace qtno

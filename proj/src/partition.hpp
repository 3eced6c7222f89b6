#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qtno {

// Integer partition: weakly decreasing positive parts. The empty partition is {}.
using Partition = std::vector<int>;

// Per-cell statistics in the English convention. For the cell s = (i, j) of
// lambda (1-based row i, column j):
//   arm   a(s)  = lambda_i - j
//   leg   l(s)  = lambda'_j - i
//   coarm a'(s) = j - 1
//   coleg l'(s) = i - 1
struct Cell {
    int row = 0, col = 0;  // 1-based
    int arm = 0, leg = 0, coarm = 0, coleg = 0;
    int hook() const { return arm + leg + 1; }
};

bool is_partition(const Partition& p);
int part_size(const Partition& p);
int part_length(const Partition& p);
Partition conjugate(const Partition& p);
// n(lambda) = sum (i-1) lambda_i = sum of colegs
long n_stat(const Partition& p);
std::vector<Cell> cells(const Partition& p);
std::vector<int> hooks_multiset(const Partition& p);  // sorted descending

bool contains(const Partition& outer, const Partition& inner);
// lambda/mu is a horizontal strip: mu <= lambda interlaced,
// lambda_1 >= mu_1 >= lambda_2 >= mu_2 >= ...
bool horizontal_strip(const Partition& lambda, const Partition& mu);
// dominance order on partitions of equal size; false if sizes differ
bool dominance_leq(const Partition& mu, const Partition& lambda);
// complement of mu inside the m x n box: (m - mu_n, ..., m - mu_1)
Partition complement_in_box(const Partition& mu, int m, int n);

// No cell has hook length exactly p (equivalently: none divisible by p).
bool is_p_core(const Partition& p, int pval);
// All successive differences lambda_i - lambda_{i+1} (including the last
// part) are at most p-1.
bool in_Dp(const Partition& p, int pval);

// Enumerations, in descending lexicographic order ((n) first, (1^n) last).
std::vector<Partition> all_of_size(int n);
std::vector<Partition> in_box(int m, int n);  // lambda_1 <= m, length <= n
std::vector<Partition> p_cores_of_size(int pval, int n);
std::vector<Partition> Dp_of_size(int pval, int n);
// All partitions of size 0..n in one list, sizes ascending.
std::vector<Partition> all_up_to_size(int n);

std::vector<long> divisors(long n);
int mobius(long n);

std::string partition_str(const Partition& p);  // "(3,1,1)" or "()"

}  // namespace qtno

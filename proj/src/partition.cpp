#include "partition.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace qtno {

bool is_partition(const Partition& p) {
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) return false;
        if (i + 1 < p.size() && p[i] < p[i + 1]) return false;
    }
    return true;
}

int part_size(const Partition& p) {
    int s = 0;
    for (int x : p) s += x;
    return s;
}

int part_length(const Partition& p) { return static_cast<int>(p.size()); }

Partition conjugate(const Partition& p) {
    if (p.empty()) return {};
    Partition c(p[0], 0);
    for (int j = 0; j < p[0]; ++j) {
        int cnt = 0;
        for (int x : p)
            if (x > j) ++cnt;
        c[j] = cnt;
    }
    return c;
}

long n_stat(const Partition& p) {
    long s = 0;
    for (size_t i = 0; i < p.size(); ++i) s += static_cast<long>(i) * p[i];
    return s;
}

std::vector<Cell> cells(const Partition& p) {
    Partition cj = conjugate(p);
    std::vector<Cell> out;
    out.reserve(part_size(p));
    for (int i = 1; i <= part_length(p); ++i) {
        for (int j = 1; j <= p[i - 1]; ++j) {
            Cell c;
            c.row = i;
            c.col = j;
            c.arm = p[i - 1] - j;
            c.leg = cj[j - 1] - i;
            c.coarm = j - 1;
            c.coleg = i - 1;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<int> hooks_multiset(const Partition& p) {
    std::vector<int> h;
    for (const Cell& c : cells(p)) h.push_back(c.hook());
    std::sort(h.rbegin(), h.rend());
    return h;
}

bool contains(const Partition& outer, const Partition& inner) {
    if (inner.size() > outer.size()) return false;
    for (size_t i = 0; i < inner.size(); ++i)
        if (inner[i] > outer[i]) return false;
    return true;
}

bool horizontal_strip(const Partition& lambda, const Partition& mu) {
    if (!contains(lambda, mu)) return false;
    // interlacing: mu_i >= lambda_{i+1}
    for (size_t i = 0; i + 1 < lambda.size(); ++i) {
        int mi = i < mu.size() ? mu[i] : 0;
        if (mi < lambda[i + 1]) return false;
    }
    return true;
}

bool dominance_leq(const Partition& mu, const Partition& lambda) {
    if (part_size(mu) != part_size(lambda)) return false;
    int pm = 0, pl = 0;
    size_t n = std::max(mu.size(), lambda.size());
    for (size_t i = 0; i < n; ++i) {
        pm += i < mu.size() ? mu[i] : 0;
        pl += i < lambda.size() ? lambda[i] : 0;
        if (pm > pl) return false;
    }
    return true;
}

Partition complement_in_box(const Partition& mu, int m, int n) {
    if (part_length(mu) > n || (!mu.empty() && mu[0] > m))
        throw std::invalid_argument("complement_in_box: partition exceeds box");
    Partition out;
    for (int i = n; i >= 1; --i) {
        int mi = i <= part_length(mu) ? mu[i - 1] : 0;
        int v = m - mi;
        if (v > 0) out.push_back(v);
    }
    if (!is_partition(out)) throw std::logic_error("complement_in_box: not a partition");
    return out;
}

bool is_p_core(const Partition& p, int pval) {
    if (pval <= 0) throw std::invalid_argument("is_p_core: p must be positive");
    for (const Cell& c : cells(p))
        if (c.hook() == pval) return false;
    return true;
}

bool in_Dp(const Partition& p, int pval) {
    if (pval <= 0) throw std::invalid_argument("in_Dp: p must be positive");
    for (size_t i = 0; i < p.size(); ++i) {
        int next = i + 1 < p.size() ? p[i + 1] : 0;
        if (p[i] - next > pval - 1) return false;
    }
    return true;
}

namespace {

// Emits partitions of n with parts <= maxpart, largest part first, in
// descending lexicographic order.
void gen(int n, int maxpart, int maxlen, Partition& cur, std::vector<Partition>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    if (maxlen == 0) return;
    for (int k = std::min(n, maxpart); k >= 1; --k) {
        // remaining n-k must fit in (maxlen-1) parts of size <= k
        if (static_cast<long>(k) * (maxlen - 1) < n - k) continue;
        cur.push_back(k);
        gen(n - k, k, maxlen - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Partition> all_of_size(int n) {
    if (n < 0) throw std::invalid_argument("all_of_size: negative size");
    std::vector<Partition> out;
    Partition cur;
    gen(n, n, n, cur, out);
    return out;
}

std::vector<Partition> in_box(int m, int n) {
    std::vector<Partition> out;
    for (int s = 0; s <= m * n; ++s) {
        Partition cur;
        std::vector<Partition> level;
        gen(s, m, n, cur, level);
        for (auto& p : level) out.push_back(std::move(p));
    }
    return out;
}

std::vector<Partition> p_cores_of_size(int pval, int n) {
    std::vector<Partition> out;
    for (auto& p : all_of_size(n))
        if (is_p_core(p, pval)) out.push_back(std::move(p));
    return out;
}

std::vector<Partition> Dp_of_size(int pval, int n) {
    std::vector<Partition> out;
    for (auto& p : all_of_size(n))
        if (in_Dp(p, pval)) out.push_back(std::move(p));
    return out;
}

std::vector<Partition> all_up_to_size(int n) {
    std::vector<Partition> out;
    for (int s = 0; s <= n; ++s)
        for (auto& p : all_of_size(s)) out.push_back(std::move(p));
    return out;
}

std::vector<long> divisors(long n) {
    std::vector<long> out;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d != n / d) out.push_back(n / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

int mobius(long n) {
    if (n <= 0) throw std::invalid_argument("mobius: n must be positive");
    int cnt = 0;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            ++cnt;
            if (n % p == 0) return 0;
        }
    }
    if (n > 1) ++cnt;
    return cnt % 2 == 0 ? 1 : -1;
}

std::string partition_str(const Partition& p) {
    std::string s = "(";
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    s += ")";
    return s;
}

}  // namespace qtno

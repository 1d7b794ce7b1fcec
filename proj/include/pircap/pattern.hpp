#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pircap/errors.hpp"

namespace pircap {

// Server subsets are bitmasks over [0, N-1]; bit n stands for server n.
using ServerMask = std::uint32_t;

constexpr int kMaxServers = 32;      // hard representation limit
constexpr int kEnumerationCap = 20;  // default cap for 2^N scans

inline int mask_size(ServerMask m) { return std::popcount(m); }

inline bool mask_subset(ServerMask a, ServerMask b) { return (a & b) == a; }

inline std::vector<int> mask_members(ServerMask m) {
    std::vector<int> out;
    while (m != 0) {
        int i = std::countr_zero(m);
        out.push_back(i);
        m &= m - 1;
    }
    return out;
}

inline ServerMask mask_from_members(const std::vector<int>& members, int n_servers) {
    ServerMask m = 0;
    for (int i : members) {
        if (i < 0 || i >= n_servers)
            throw OutOfRangeIndex("server index " + std::to_string(i) +
                                  " outside [0, " + std::to_string(n_servers - 1) + "]");
        m |= ServerMask{1} << i;
    }
    return m;
}

// Lexicographic order on the sorted member sequences, e.g. {0,1,2} < {0,3} < {4}.
// This is the canonical ordering of colluding sets everywhere.
inline bool mask_lex_less(ServerMask a, ServerMask b) {
    while (a != 0 && b != 0) {
        int la = std::countr_zero(a), lb = std::countr_zero(b);
        if (la != lb) return la < lb;
        a &= a - 1;
        b &= b - 1;
    }
    return a == 0 && b != 0;
}

// A collusion pattern: N servers and the list of maximal colluding sets, held
// in canonical order. Non-maximal input sets are dropped at construction.
struct CollusionPattern {
    int n_servers = 0;
    std::vector<ServerMask> sets;
    bool dropped_nonmaximal = false;

    int size() const { return static_cast<int>(sets.size()); }  // M

    bool operator==(const CollusionPattern& o) const {
        return n_servers == o.n_servers && sets == o.sets;
    }
};

namespace detail {

inline void check_server_count(int n_servers, bool allow_large) {
    if (n_servers < 1) throw BadParams("n_servers must be >= 1");
    if (n_servers > kMaxServers)
        throw TooLarge("n_servers > " + std::to_string(kMaxServers));
    if (n_servers > kEnumerationCap && !allow_large)
        throw TooLarge("n_servers > " + std::to_string(kEnumerationCap) +
                       " (pass allow_large to override)");
}

// Assemble a pattern from masks known to form an antichain (generator output):
// dedupe, coverage check, canonical sort, but no O(M^2) maximality filter.
inline CollusionPattern pattern_from_antichain(int n_servers, std::vector<ServerMask> masks) {
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    ServerMask covered = 0;
    for (ServerMask m : masks) covered |= m;
    ServerMask all = (n_servers == kMaxServers) ? ~ServerMask{0}
                                                : (ServerMask{1} << n_servers) - 1;
    if (covered != all) throw UncoveredServer("some server appears in no colluding set");
    std::sort(masks.begin(), masks.end(), mask_lex_less);
    CollusionPattern p;
    p.n_servers = n_servers;
    p.sets = std::move(masks);
    return p;
}

}  // namespace detail

inline CollusionPattern make_pattern(int n_servers,
                                     const std::vector<std::vector<int>>& sets,
                                     bool allow_large = false) {
    detail::check_server_count(n_servers, allow_large);
    std::vector<ServerMask> masks;
    masks.reserve(sets.size());
    for (const auto& s : sets) {
        if (s.empty()) throw EmptySet("colluding set with no members");
        masks.push_back(mask_from_members(s, n_servers));
    }
    const std::size_t given = masks.size();
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());

    // Keep only maximal sets.
    std::vector<ServerMask> maximal;
    for (ServerMask m : masks) {
        bool dominated = false;
        for (ServerMask o : masks)
            if (o != m && mask_subset(m, o)) { dominated = true; break; }
        if (!dominated) maximal.push_back(m);
    }
    const bool dropped = maximal.size() < given;

    CollusionPattern p = detail::pattern_from_antichain(n_servers, std::move(maximal));
    p.dropped_nonmaximal = dropped;
    return p;
}

struct NormalizeResult {
    CollusionPattern pattern;
    std::vector<int> merge_map;  // old server index -> new server index
    bool merged = false;
};

// Merge servers that belong to exactly the same colluding sets. Each set is a
// union of such classes, so the sets survive relabeling unchanged and distinct.
inline NormalizeResult normalize(const CollusionPattern& p) {
    const int n = p.n_servers;
    std::vector<std::vector<int>> profile(n);
    for (int m = 0; m < p.size(); ++m)
        for (int i : mask_members(p.sets[m])) profile[i].push_back(m);

    std::vector<int> merge_map(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        if (merge_map[i] != -1) continue;
        merge_map[i] = next;
        for (int j = i + 1; j < n; ++j)
            if (merge_map[j] == -1 && profile[j] == profile[i]) merge_map[j] = next;
        ++next;
    }

    NormalizeResult r;
    r.merge_map = merge_map;
    r.merged = next < n;
    std::vector<ServerMask> new_sets;
    new_sets.reserve(p.sets.size());
    for (ServerMask s : p.sets) {
        ServerMask t = 0;
        for (int i : mask_members(s)) t |= ServerMask{1} << merge_map[i];
        new_sets.push_back(t);
    }
    r.pattern = detail::pattern_from_antichain(next, std::move(new_sets));
    return r;
}

// All T-subsets of [0, N-1].
inline CollusionPattern gen_t_collusion(int n, int t, bool allow_large = false) {
    if (t < 1 || t > n) throw BadParams("need 1 <= T <= N");
    detail::check_server_count(n, allow_large);
    std::vector<ServerMask> masks;
    const ServerMask limit = (n == kMaxServers) ? ~ServerMask{0}
                                                : (ServerMask{1} << n) - 1;
    // Gosper's hack walks the T-subsets in ascending mask order, from the
    // lowest T bits up to the highest T bits.
    const ServerMask below = (n - t == kMaxServers) ? ~ServerMask{0}
                                                    : (ServerMask{1} << (n - t)) - 1;
    const ServerMask last = limit & ~below;
    ServerMask m = (t == kMaxServers) ? ~ServerMask{0} : (ServerMask{1} << t) - 1;
    while (true) {
        masks.push_back(m);
        if (m == last) break;
        ServerMask c = m & -m, r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    return detail::pattern_from_antichain(n, std::move(masks));
}

// The N cyclic windows {i, i+1, ..., i+T-1 mod N}; duplicates collapse (T=N).
inline CollusionPattern gen_cyclic_contiguous(int n, int t, bool allow_large = false) {
    if (t < 1 || t > n) throw BadParams("need 1 <= T <= N");
    detail::check_server_count(n, allow_large);
    std::vector<ServerMask> masks;
    for (int start = 0; start < n; ++start) {
        ServerMask m = 0;
        for (int j = 0; j < t; ++j) m |= ServerMask{1} << ((start + j) % n);
        masks.push_back(m);
    }
    return detail::pattern_from_antichain(n, std::move(masks));
}

enum class DisjointKind { Full, Cyclic };

// Contiguous groups P_1..P_M over [0, sum(N_i)-1]; within group i either all
// T_i-subsets or the cyclic T_i-windows of that group.
inline CollusionPattern gen_disjoint(const std::vector<int>& sizes,
                                     const std::vector<int>& thresholds,
                                     DisjointKind kind,
                                     bool allow_large = false) {
    if (sizes.empty() || sizes.size() != thresholds.size())
        throw BadParams("need equally long, non-empty size/threshold lists");
    int total = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        if (sizes[g] < 1) throw BadParams("group sizes must be >= 1");
        if (thresholds[g] < 1 || thresholds[g] > sizes[g])
            throw BadParams("need 1 <= T_i <= N_i");
        total += sizes[g];
    }
    detail::check_server_count(total, allow_large);

    std::vector<ServerMask> masks;
    int offset = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        const int ng = sizes[g], tg = thresholds[g];
        CollusionPattern group = (kind == DisjointKind::Full)
                                     ? gen_t_collusion(ng, tg, allow_large)
                                     : gen_cyclic_contiguous(ng, tg, allow_large);
        for (ServerMask m : group.sets) masks.push_back(m << offset);
        offset += ng;
    }
    return detail::pattern_from_antichain(total, std::move(masks));
}

// N x M 0/1 membership table; columns follow the pattern's canonical set order.
struct IncidenceMatrix {
    int rows = 0, cols = 0;
    std::vector<std::uint8_t> bits;  // row-major

    std::uint8_t at(int r, int c) const { return bits[static_cast<std::size_t>(r) * cols + c]; }
};

inline IncidenceMatrix incidence_matrix(const CollusionPattern& p) {
    IncidenceMatrix b;
    b.rows = p.n_servers;
    b.cols = p.size();
    b.bits.assign(static_cast<std::size_t>(b.rows) * b.cols, 0);
    for (int m = 0; m < b.cols; ++m)
        for (int i : mask_members(p.sets[m]))
            b.bits[static_cast<std::size_t>(i) * b.cols + m] = 1;
    return b;
}

}  // namespace pircap

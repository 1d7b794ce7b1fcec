#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "pircap/pattern.hpp"
#include "pircap/rational.hpp"

namespace pircap {

// An upward-closed family of server subsets, represented by its minimal sets.
struct SetFamily {
    int n_servers = 0;
    std::vector<ServerMask> minimal_sets;  // antichain, canonical order

    bool contains(ServerMask s) const {
        for (ServerMask m : minimal_sets)
            if (mask_subset(m, s)) return true;
        return false;
    }
};

struct HittingResult {
    int alpha = 0;
    std::vector<int> witness;
    bool certified = false;  // every smaller set was exhausted and fails
};

// S is a member iff some colluding set T_m fits inside S and stays "covered
// after deletions": for every i in T_m another colluding set fits in S\{i}.
// The quantifiers range over the stored maximal sets.
inline bool family_membership(const CollusionPattern& p, ServerMask s) {
    const ServerMask all = (p.n_servers == kMaxServers)
                               ? ~ServerMask{0}
                               : (ServerMask{1} << p.n_servers) - 1;
    if ((s & ~all) != 0) throw OutOfRangeIndex("subset mentions servers outside the pattern");
    for (ServerMask tm : p.sets) {
        if (!mask_subset(tm, s)) continue;
        bool ok = true;
        for (int i : mask_members(tm)) {
            const ServerMask rest = s & ~(ServerMask{1} << i);
            bool found = false;
            for (ServerMask tr : p.sets)
                if (mask_subset(tr, rest)) { found = true; break; }
            if (!found) { ok = false; break; }
        }
        if (ok) return true;
    }
    return false;
}

// Scan all 2^N subsets and keep the inclusion-minimal members. The family is
// upward closed, so dropping one element at a time is an exact minimality test.
inline SetFamily build_minimal_family(const CollusionPattern& p) {
    if (p.n_servers > kEnumerationCap)
        throw TooLarge("family enumeration needs N <= " + std::to_string(kEnumerationCap));
    const ServerMask all = (ServerMask{1} << p.n_servers) - 1;
    std::vector<bool> member(static_cast<std::size_t>(all) + 1, false);
    for (ServerMask s = 0; s <= all; ++s) member[s] = family_membership(p, s);
    SetFamily f;
    f.n_servers = p.n_servers;
    for (ServerMask s = 0; s <= all; ++s) {
        if (!member[s]) continue;
        bool minimal = true;
        for (int i : mask_members(s))
            if (member[s & ~(ServerMask{1} << i)]) { minimal = false; break; }
        if (minimal) f.minimal_sets.push_back(s);
    }
    std::sort(f.minimal_sets.begin(), f.minimal_sets.end(), mask_lex_less);
    return f;
}

inline bool is_hitting_set(const SetFamily& f, ServerMask h) {
    for (ServerMask m : f.minimal_sets)
        if ((m & h) == 0) return false;
    return true;
}

namespace detail {

// Elements ordered by descending frequency over the minimal sets, ties to the
// smallest index; fixes the branching order and hence the returned witness.
inline std::vector<int> hitting_branch_order(const SetFamily& f) {
    std::vector<int> freq(f.n_servers, 0);
    for (ServerMask m : f.minimal_sets)
        for (int i : mask_members(m)) ++freq[i];
    std::vector<int> order(f.n_servers);
    for (int i = 0; i < f.n_servers; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return freq[a] > freq[b]; });
    return order;
}

inline bool hitting_dfs(const SetFamily& f, const std::vector<int>& order,
                        ServerMask chosen, int depth_left, ServerMask& found) {
    ServerMask unhit = 0;
    for (ServerMask m : f.minimal_sets)
        if ((m & chosen) == 0) { unhit = m; break; }
    if (unhit == 0) {
        found = chosen;
        return true;
    }
    if (depth_left == 0) return false;
    for (int e : order) {
        if ((unhit & (ServerMask{1} << e)) == 0) continue;
        if (hitting_dfs(f, order, chosen | (ServerMask{1} << e), depth_left - 1, found))
            return true;
    }
    return false;
}

}  // namespace detail

// Exact minimum hitting set by iterative deepening: target sizes 0, 1, ... are
// exhausted in turn, so the first hit certifies that alpha-1 is impossible.
inline HittingResult hitting_number(const SetFamily& f) {
    HittingResult r;
    r.certified = true;
    if (f.minimal_sets.empty()) return r;  // alpha = 0, empty witness
    const std::vector<int> order = detail::hitting_branch_order(f);
    for (int target = 1; target <= f.n_servers; ++target) {
        ServerMask found = 0;
        if (detail::hitting_dfs(f, order, 0, target, found)) {
            r.alpha = target;
            r.witness = mask_members(found);
            return r;
        }
    }
    throw InternalError("the full server set always hits a non-empty family");
}

//==========================================================================
// Closed forms for the hitting number of the four special pattern classes.
//==========================================================================

inline int closed_form_t_collusion(int n, int t) {
    if (t < 1 || t > n) throw BadParams("need 1 <= T <= N");
    return n - t;
}

inline int closed_form_disjoint_full(const std::vector<int>& ns, const std::vector<int>& ts) {
    if (ns.empty() || ns.size() != ts.size())
        throw BadParams("need equally long, non-empty size/threshold lists");
    int sum = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ts[i] < 1 || ts[i] > ns[i]) throw BadParams("need 1 <= T_i <= N_i");
        sum += ns[i] - ts[i];
    }
    return sum + static_cast<int>(ns.size()) - 1;
}

inline int closed_form_cyclic(int n, int t) {
    if (t < 1 || t > n) throw BadParams("need 1 <= T <= N");
    return (n + t - 1) / t - 1;  // ceil(N/T) - 1
}

inline int closed_form_disjoint_cyclic(const std::vector<int>& ns, const std::vector<int>& ts) {
    if (ns.empty() || ns.size() != ts.size())
        throw BadParams("need equally long, non-empty size/threshold lists");
    int sum = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ts[i] < 1 || ts[i] > ns[i]) throw BadParams("need 1 <= T_i <= N_i");
        sum += (ns[i] + ts[i] - 1) / ts[i];
    }
    return sum - 1;
}

struct ClosedFormDescriptor {
    enum class Kind { TCollusion, DisjointFull, Cyclic, DisjointCyclic };
    Kind kind;
    std::vector<int> ns, ts;  // single-element lists for the non-disjoint kinds
};

inline int closed_form_bound(const ClosedFormDescriptor& d) {
    switch (d.kind) {
        case ClosedFormDescriptor::Kind::TCollusion:
            if (d.ns.size() != 1 || d.ts.size() != 1) throw BadParams("t_collusion takes N T");
            return closed_form_t_collusion(d.ns[0], d.ts[0]);
        case ClosedFormDescriptor::Kind::Cyclic:
            if (d.ns.size() != 1 || d.ts.size() != 1) throw BadParams("cyclic takes N T");
            return closed_form_cyclic(d.ns[0], d.ts[0]);
        case ClosedFormDescriptor::Kind::DisjointFull:
            return closed_form_disjoint_full(d.ns, d.ts);
        case ClosedFormDescriptor::Kind::DisjointCyclic:
            return closed_form_disjoint_cyclic(d.ns, d.ts);
    }
    throw BadParams("unknown closed-form kind");
}

// alpha(F(P)) * log2|Y| in bits. |Y| must be a power of two so the result
// stays rational.
inline Rational message_size_lower_bound(const CollusionPattern& p, int y_alphabet_size) {
    if (y_alphabet_size < 2) throw BadParams("|Y| must be >= 2");
    int log2y = 0;
    int v = y_alphabet_size;
    while (v % 2 == 0) { v /= 2; ++log2y; }
    if (v != 1)
        throw IncommensurableAlphabets("|Y| must be a power of two for an exact bit count");
    const HittingResult h = hitting_number(build_minimal_family(p));
    return Rational(h.alpha) * log2y;
}

// For cyclic windows with N >= 2T the family has a short description: S is a
// member iff it contains two disjoint colluding sets.
inline bool cyclic_family_characterization(const CollusionPattern& p, ServerMask s) {
    if (p.sets.empty()) throw BadParams("empty pattern");
    const int t = mask_size(p.sets[0]);
    if (p != gen_cyclic_contiguous(p.n_servers, t))
        throw BadParams("pattern is not a cyclic window pattern");
    if (p.n_servers < 2 * t) throw BadParams("characterization needs N >= 2T");
    const ServerMask all = (ServerMask{1} << p.n_servers) - 1;
    if ((s & ~all) != 0) throw OutOfRangeIndex("subset mentions servers outside the pattern");
    for (std::size_t a = 0; a < p.sets.size(); ++a)
        for (std::size_t b = a + 1; b < p.sets.size(); ++b)
            if ((p.sets[a] & p.sets[b]) == 0 && mask_subset(p.sets[a] | p.sets[b], s))
                return true;
    return false;
}

}  // namespace pircap

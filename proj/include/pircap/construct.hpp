#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pircap/verify.hpp"

namespace pircap {

// A mutually non-colluding subset of servers: no colluding set of the owning
// pattern contains two of them. active is sorted; relabeling is positional.
struct SubsetSelection {
    std::vector<int> active;

    int relabel(int old_index) const {
        auto it = std::lower_bound(active.begin(), active.end(), old_index);
        if (it == active.end() || *it != old_index)
            throw OutOfRangeIndex("server is not part of the selection");
        return static_cast<int>(it - active.begin());
    }
};

namespace detail {

inline void assert_noncolluding(const CollusionPattern& p, const std::vector<int>& active) {
    ServerMask a = 0;
    for (int i : active) a |= ServerMask{1} << i;
    for (ServerMask s : p.sets)
        if (mask_size(s & a) > 1)
            throw InternalError("selection places two active servers in one colluding set");
}

}  // namespace detail

// One server per contiguous T-block: {0, T, 2T, ...}. Needs T | N.
inline SubsetSelection select_noncolluding_cyclic(int n, int t) {
    if (t < 1 || t > n) throw BadParams("need 1 <= T <= N");
    if (n % t != 0) throw NotDivisible("T must divide N");
    SubsetSelection sel;
    for (int i = 0; i < n; i += t) sel.active.push_back(i);
    detail::assert_noncolluding(gen_cyclic_contiguous(n, t), sel.active);
    return sel;
}

// The first server of each T_i-block within each group. Needs T_i | N_i.
inline SubsetSelection select_noncolluding_disjoint_cyclic(const std::vector<int>& ns,
                                                           const std::vector<int>& ts) {
    if (ns.empty() || ns.size() != ts.size())
        throw BadParams("need equally long, non-empty size/threshold lists");
    SubsetSelection sel;
    int offset = 0;
    for (std::size_t g = 0; g < ns.size(); ++g) {
        if (ts[g] < 1 || ts[g] > ns[g]) throw BadParams("need 1 <= T_i <= N_i");
        if (ns[g] % ts[g] != 0) throw NotDivisible("each T_i must divide its N_i");
        for (int i = 0; i < ns[g]; i += ts[g]) sel.active.push_back(offset + i);
        offset += ns[g];
    }
    detail::assert_noncolluding(gen_disjoint(ns, ts, DisjointKind::Cyclic), sel.active);
    return sel;
}

// Run the base scheme on the selected servers; everyone else receives the
// null query and answers nothing. Rate, L, and alphabets are untouched.
inline PirScheme lift_scheme(const PirScheme& base, const SubsetSelection& sel, int n_servers) {
    if (static_cast<int>(sel.active.size()) != base.n_servers)
        throw SizeMismatch("selection size must equal the base server count");
    for (int a : sel.active)
        if (a < 0 || a >= n_servers) throw OutOfRangeIndex("active server outside [0, N-1]");

    PirScheme out;
    out.n_servers = n_servers;
    out.msg = base.msg;
    out.group = base.group;
    for (const auto& [key, m] : base.matrices)
        out.matrices[{sel.active[key.first], key.second}] = m;
    const AnswerMatrix null_m = make_null_matrix(base.msg.K);
    for (int n = 0; n < n_servers; ++n) out.matrices.insert({{n, kNullQuery}, null_m});

    for (const auto& key : base.keys) {
        KeyValue lifted;
        lifted.prob = key.prob;
        lifted.queries.assign(base.msg.K,
                              std::vector<std::string>(n_servers, kNullQuery));
        for (int k = 0; k < base.msg.K; ++k)
            for (int r = 0; r < base.n_servers; ++r)
                lifted.queries[k][sel.active[r]] = key.queries[k][r];
        out.keys.push_back(std::move(lifted));
    }
    validate_scheme(out);
    return out;
}

// The hand-checkable two-server scheme: K = 2, L = 1, X = Y = Z_2, uniform
// key over four values. Each claim about it is re-verified by the checkers;
// nothing downstream trusts the construction itself.
inline PirScheme example_two_server_scheme() {
    PirScheme s;
    s.n_servers = 2;
    s.msg = MessageSpace{2, 1, 2};
    s.group = FiniteAbelianGroup::make({2});

    const AnswerMatrix null_m = make_null_matrix(2);
    const AnswerMatrix e0 = make_linear_matrix(2, 1, {{{1}, {0}}});  // answers W_0
    const AnswerMatrix e1 = make_linear_matrix(2, 1, {{{0}, {1}}});  // answers W_1
    const AnswerMatrix both = make_linear_matrix(2, 1, {{{1}, {1}}});  // answers W_0 + W_1
    const std::string l_null = kNullQuery;
    const std::string l_e0 = canonical_linear_label(e0);
    const std::string l_e1 = canonical_linear_label(e1);
    const std::string l_both = canonical_linear_label(both);
    for (int n = 0; n < 2; ++n) {
        s.matrices[{n, l_null}] = null_m;
        s.matrices[{n, l_e0}] = e0;
        s.matrices[{n, l_e1}] = e1;
        s.matrices[{n, l_both}] = both;
    }

    const std::string e_of[2] = {l_e0, l_e1};
    auto add_key = [&](const std::string& q0_k0, const std::string& q1_k0,
                       const std::string& q0_k1, const std::string& q1_k1) {
        KeyValue key;
        key.prob = Rational(1, 4);
        key.queries = {{q0_k0, q1_k0}, {q0_k1, q1_k1}};
        s.keys.push_back(std::move(key));
    };
    add_key(l_null, e_of[0], l_null, e_of[1]);  // f=0: (nothing, W_k)
    add_key(e_of[0], l_null, e_of[1], l_null);  // f=1: (W_k, nothing)
    add_key(e_of[1], l_both, e_of[0], l_both);  // f=2: (W_{1-k}, W_0+W_1)
    add_key(l_both, e_of[1], l_both, e_of[0]);  // f=3: (W_0+W_1, W_{1-k})
    validate_scheme(s);
    return s;
}

//==========================================================================
// Bounded search for capacity-achieving linear schemes under no collusion.
// Stands in for the general construction at tiny scale; every hit is pushed
// through the full verifier before it is returned.
//==========================================================================

enum class SearchStatus { Found, ExhaustedSpace, BudgetExhausted };

struct SearchResult {
    SearchStatus status = SearchStatus::ExhaustedSpace;
    std::optional<PirScheme> scheme;
    long long nodes = 0;  // enumeration steps spent
};

namespace detail {

struct SearchSpace {
    int n_prime, K, L, q;
    long long values;          // q^L
    long long assignments;     // q^{KL}
    std::vector<AnswerMatrix> matrices;   // uniform, uniformly decomposable
    std::vector<std::string> labels;
    std::vector<int> lengths;
    // Arms: per-k server tuples passing the per-realization checks.
    std::vector<std::vector<int>> arms;   // arm -> matrix index per server
    std::vector<long long> arm_length;    // total download of an arm
};

inline bool spend(long long& budget, long long amount = 1) {
    budget -= amount;
    return budget >= 0;
}

// All K x len linear matrices over Z_q whose answer map is uniform and whose
// entries are each constant or uniform.
inline bool enumerate_matrices(SearchSpace& sp, int max_len, long long& budget) {
    const MessageSpace msg{sp.K, sp.L, sp.q};
    const FiniteAbelianGroup group = FiniteAbelianGroup::make({sp.q});
    for (int len = 0; len <= max_len; ++len) {
        const long long coeff_slots = static_cast<long long>(sp.K) * len * sp.L;
        long long count = 1;
        for (long long i = 0; i < coeff_slots; ++i) {
            count *= sp.q;
            if (count > (1LL << 30)) throw TooLarge("matrix space too large to enumerate");
        }
        for (long long code = 0; code < count; ++code) {
            if (!spend(budget)) return false;
            // Decode the coefficient digits, column-major, rows inner.
            AnswerMatrix m;
            m.rows = sp.K;
            m.cols = len;
            m.entries.resize(static_cast<std::size_t>(sp.K) * len);
            long long rest = code;
            for (int i = 0; i < len; ++i) {
                for (int k = 0; k < sp.K; ++k) {
                    std::vector<int> coeffs(sp.L);
                    for (int j = 0; j < sp.L; ++j) {
                        coeffs[j] = static_cast<int>(rest % sp.q);
                        rest /= sp.q;
                    }
                    m.entries[static_cast<std::size_t>(k) * len + i].linear = std::move(coeffs);
                }
            }
            // Component filter: constant or uniform on Y.
            bool ok = true;
            for (const auto& c : m.entries) {
                std::map<long long, long long> counts;
                for (long long v = 0; v < sp.values; ++v)
                    ++counts[c.eval(v, msg, group)];
                const bool constant = counts.size() == 1;
                bool uniform = static_cast<long long>(counts.size()) == sp.q;
                if (uniform)
                    for (const auto& [val, cnt] : counts)
                        if (cnt * sp.q != sp.values) { uniform = false; break; }
                if (!constant && !uniform) { ok = false; break; }
            }
            if (!ok) continue;
            // Whole-answer uniformity over Y^len.
            long long space = 1;
            for (int i = 0; i < len; ++i) space *= sp.q;
            std::map<long long, long long> out_counts;
            for (long long idx = 0; idx < sp.assignments; ++idx) {
                const std::vector<int> w = msg.decode_assignment(idx);
                std::vector<long long> a(len, 0);
                for (int i = 0; i < len; ++i)
                    for (int k = 0; k < sp.K; ++k)
                        a[i] = group.add(a[i], m.at(k, i).eval(w[k], msg, group));
                ++out_counts[encode_tuple(a, sp.q)];
            }
            bool uniform_answer = static_cast<long long>(out_counts.size()) == space;
            if (uniform_answer)
                for (const auto& [val, cnt] : out_counts)
                    if (cnt * space != sp.assignments) { uniform_answer = false; break; }
            if (!uniform_answer) continue;
            sp.labels.push_back(canonical_linear_label(m));
            sp.lengths.push_back(len);
            sp.matrices.push_back(std::move(m));
        }
    }
    return true;
}

// Per-realization checks for one desired index: decodability of W_k,
// response independence, residual determinism under no collusion, and signal
// independence. Arms are shared across k; the checks must hold for every k.
inline bool arm_ok(const SearchSpace& sp, const std::vector<int>& arm, int k) {
    const MessageSpace msg{sp.K, sp.L, sp.q};
    const FiniteAbelianGroup group = FiniteAbelianGroup::make({sp.q});
    std::vector<std::vector<long long>> answers(sp.n_prime), signals(sp.n_prime),
        residuals(sp.n_prime);
    for (int n = 0; n < sp.n_prime; ++n) {
        const AnswerMatrix& g = sp.matrices[arm[n]];
        answers[n].resize(sp.assignments);
        signals[n].resize(sp.assignments);
        residuals[n].resize(sp.assignments);
        for (long long idx = 0; idx < sp.assignments; ++idx) {
            const std::vector<int> w = msg.decode_assignment(idx);
            std::vector<long long> a(g.cols, 0), mrow(g.cols, 0), r(g.cols, 0);
            for (int i = 0; i < g.cols; ++i) {
                for (int row = 0; row < sp.K; ++row) {
                    const long long v = g.at(row, i).eval(w[row], msg, group);
                    a[i] = group.add(a[i], v);
                    if (row == k)
                        mrow[i] = group.add(mrow[i], v);
                    else
                        r[i] = group.add(r[i], v);
                }
            }
            answers[n][idx] = encode_tuple(a, sp.q);
            signals[n][idx] = encode_tuple(mrow, sp.q);
            residuals[n][idx] = encode_tuple(r, sp.q);
        }
    }
    // Correctness: joint answers pin down W_k.
    {
        std::map<std::vector<long long>, int> seen;
        std::vector<long long> key(sp.n_prime);
        for (long long idx = 0; idx < sp.assignments; ++idx) {
            for (int n = 0; n < sp.n_prime; ++n) key[n] = answers[n][idx];
            const int wk = msg.decode_assignment(idx)[k];
            auto [it, inserted] = seen.emplace(key, wk);
            if (!inserted && it->second != wk) return false;
        }
    }
    if (!mutually_independent(answers, sp.assignments)) return false;   // P1
    if (!mutually_independent(signals, sp.assignments)) return false;   // P4
    // P3 under no collusion: every residual determined by each single R_i.
    for (int i = 0; i < sp.n_prime; ++i) {
        std::map<long long, std::vector<long long>> level;
        for (long long idx = 0; idx < sp.assignments; ++idx) {
            std::vector<long long> all(sp.n_prime);
            for (int n = 0; n < sp.n_prime; ++n) all[n] = residuals[n][idx];
            auto [it, inserted] = level.emplace(residuals[i][idx], all);
            if (!inserted && it->second != all) return false;
        }
    }
    return true;
}

struct RowCandidate {
    std::vector<int> arm_per_k;  // arm index per desired message
    std::vector<long long> length_per_k;
};

struct SearchDriver {
    const SearchSpace& sp;
    const CollusionPattern& pattern;
    std::vector<RowCandidate> rows;
    long long budget;
    bool budget_hit = false;
    std::optional<PirScheme> found;

    bool dfs(std::vector<int>& chosen, int slots_left, std::vector<long long>& sums,
             const std::vector<long long>& max_row_len, long long target_total) {
        if (!spend(budget)) { budget_hit = true; return false; }
        if (slots_left == 0) {
            for (long long s : sums)
                if (s != target_total) return false;
            return try_leaf(chosen);
        }
        for (long long s : sums)
            if (s > target_total) return false;
        const int start = chosen.empty() ? 0 : chosen.back();
        for (int r = start; r < static_cast<int>(rows.size()); ++r) {
            bool feasible = true;
            for (int k = 0; k < sp.K && feasible; ++k) {
                const long long after = sums[k] + rows[r].length_per_k[k];
                if (after > target_total) feasible = false;
                // Even all-max rows cannot reach the target: prune.
                if (after + static_cast<long long>(slots_left - 1) * max_row_len[k] <
                    target_total)
                    feasible = false;
            }
            if (!feasible) continue;
            chosen.push_back(r);
            for (int k = 0; k < sp.K; ++k) sums[k] += rows[r].length_per_k[k];
            if (dfs(chosen, slots_left - 1, sums, max_row_len, target_total)) return true;
            for (int k = 0; k < sp.K; ++k) sums[k] -= rows[r].length_per_k[k];
            chosen.pop_back();
            if (budget_hit) return false;
        }
        return false;
    }

    int matrix_of(int row, int k, int n) const { return sp.arms[rows[row].arm_per_k[k]][n]; }

    bool try_leaf(const std::vector<int>& chosen) {
        // Per-server label multisets must be identical across k, otherwise
        // even single-server privacy fails.
        for (int n = 0; n < sp.n_prime; ++n) {
            std::vector<std::string> base;
            for (int k = 0; k < sp.K; ++k) {
                std::vector<std::string> labels;
                for (int r : chosen) labels.push_back(sp.labels[matrix_of(r, k, n)]);
                std::sort(labels.begin(), labels.end());
                if (k == 0)
                    base = std::move(labels);
                else if (labels != base)
                    return false;
            }
        }
        PirScheme s;
        s.n_servers = sp.n_prime;
        s.msg = MessageSpace{sp.K, sp.L, sp.q};
        s.group = FiniteAbelianGroup::make({sp.q});
        const int f_count = static_cast<int>(chosen.size());
        for (int r : chosen) {
            KeyValue key;
            key.prob = Rational(1, f_count);
            key.queries.assign(sp.K, std::vector<std::string>(sp.n_prime));
            for (int k = 0; k < sp.K; ++k)
                for (int n = 0; n < sp.n_prime; ++n) {
                    const int m = matrix_of(r, k, n);
                    key.queries[k][n] = sp.labels[m];
                    s.matrices[{n, sp.labels[m]}] = sp.matrices[m];
                }
            s.keys.push_back(std::move(key));
        }
        VerifyReport rep = verify_capacity_achieving(s, pattern, sp.K);
        if (rep.capacity_achieving && rep.theorem1_consistent &&
            check_uniform_decomposable(s).pass) {
            found = s;
            return true;
        }
        return false;
    }
};

}  // namespace detail

// Enumerate linear uniformly decomposable candidate schemes over Z_q with a
// uniform key distribution, pruning on per-realization structure, and return
// the first one the full verifier certifies as capacity-achieving against
// no collusion on n_prime servers with sub-packetization exactly L.
inline SearchResult search_scheme(int n_prime, int k_messages, int sub_packets, int y_modulus,
                                  long long budget = 1'000'000, int max_keys = 4,
                                  int max_response_len = -1) {
    if (n_prime < 1 || k_messages < 1 || sub_packets < 1 || y_modulus < 2)
        throw BadParams("need n' >= 1, K >= 1, L >= 1, q >= 2");
    if (max_response_len < 0) max_response_len = std::max(sub_packets, k_messages - 1);

    SearchResult result;
    long long initial_budget = budget;

    detail::SearchSpace sp;
    sp.n_prime = n_prime;
    sp.K = k_messages;
    sp.L = sub_packets;
    sp.q = y_modulus;
    sp.values = MessageSpace{k_messages, sub_packets, y_modulus}.value_count();
    sp.assignments = MessageSpace{k_messages, sub_packets, y_modulus}.assignment_count();

    auto finish = [&](SearchStatus st) {
        result.status = st;
        result.nodes = initial_budget - budget;
        return result;
    };

    if (!detail::enumerate_matrices(sp, max_response_len, budget))
        return finish(SearchStatus::BudgetExhausted);

    // Arms: server tuples valid for every desired index simultaneously.
    const long long n_matrices = static_cast<long long>(sp.matrices.size());
    std::vector<int> arm(n_prime, 0);
    while (true) {
        if (!detail::spend(budget)) return finish(SearchStatus::BudgetExhausted);
        bool ok = true;
        for (int k = 0; k < k_messages && ok; ++k) ok = detail::arm_ok(sp, arm, k);
        if (ok) {
            long long len = 0;
            for (int n = 0; n < n_prime; ++n) len += sp.lengths[arm[n]];
            sp.arms.push_back(arm);
            sp.arm_length.push_back(len);
        }
        int pos = n_prime - 1;
        while (pos >= 0 && ++arm[pos] == n_matrices) {
            arm[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    const CollusionPattern pattern = gen_t_collusion(n_prime, 1);
    const Rational cap = capacity(Rational(n_prime), k_messages);
    const Rational e_target = Rational(sub_packets) / cap;

    detail::SearchDriver driver{sp, pattern, {}, budget};

    // Rows assign one arm per desired index; all rows are usable for any key.
    std::vector<detail::RowCandidate> rows;
    std::vector<int> pick(k_messages, 0);
    const long long n_arms = static_cast<long long>(sp.arms.size());
    if (n_arms > 0) {
        while (true) {
            if (!detail::spend(driver.budget)) {
                driver.budget_hit = true;
                break;
            }
            detail::RowCandidate row;
            row.length_per_k.resize(k_messages);
            row.arm_per_k.resize(k_messages);
            for (int k = 0; k < k_messages; ++k) {
                row.arm_per_k[k] = static_cast<int>(pick[k]);
                row.length_per_k[k] = sp.arm_length[pick[k]];
            }
            rows.push_back(std::move(row));
            int pos = k_messages - 1;
            while (pos >= 0 && ++pick[pos] == n_arms) {
                pick[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    if (driver.budget_hit) {
        budget = driver.budget;
        return finish(SearchStatus::BudgetExhausted);
    }
    driver.rows = std::move(rows);

    for (int f = 1; f <= max_keys && !driver.found; ++f) {
        const Rational total = e_target * f;
        if (denominator(total) != 1) continue;  // total download must be integral
        const long long target_total = numerator(total).convert_to<long long>();
        std::vector<long long> max_row_len(k_messages, 0);
        for (const auto& row : driver.rows)
            for (int k = 0; k < k_messages; ++k)
                max_row_len[k] = std::max(max_row_len[k], row.length_per_k[k]);
        std::vector<int> chosen;
        std::vector<long long> sums(k_messages, 0);
        driver.dfs(chosen, f, sums, max_row_len, target_total);
        if (driver.budget_hit) {
            budget = driver.budget;
            return finish(SearchStatus::BudgetExhausted);
        }
    }
    budget = driver.budget;
    if (driver.found) {
        result.scheme = std::move(driver.found);
        return finish(SearchStatus::Found);
    }
    return finish(SearchStatus::ExhaustedSpace);
}

//==========================================================================
// Sub-packetization required by the earlier general-purpose constructions,
// for comparison against the hitting-number optimum.
//==========================================================================

inline BigInt prior_message_size_cyclic(int n, int t, int k_messages) {
    if (t < 1 || t > n || k_messages < 1) throw BadParams("need 1 <= T <= N and K >= 1");
    return integer_pow(BigInt(n), k_messages);
}

inline BigInt prior_message_size_disjoint_cyclic(const std::vector<int>& ns,
                                                 const std::vector<int>& ts, int k_messages) {
    if (ns.empty() || ns.size() != ts.size() || k_messages < 1)
        throw BadParams("need equally long, non-empty lists and K >= 1");
    BigInt t_product = 1;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 1 || ts[i] > ns[i]) throw BadParams("need 1 <= T_i <= N_i");
        t_product *= ts[i];
    }
    BigInt base = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) base += t_product / ts[i] * ns[i];
    return integer_pow(base, k_messages);
}

}  // namespace pircap

#pragma once

#include <map>
#include <string>
#include <vector>

#include "pircap/family.hpp"
#include "pircap/lp.hpp"
#include "pircap/pattern.hpp"
#include "pircap/scheme.hpp"

namespace pircap {

// Every check below is exact: independence is literal product-measure
// equality, determinism is literal level-set constancy, uniformity is literal
// equality of point masses. No entropies are ever computed numerically.

struct CheckResult {
    bool pass = true;
    std::string witness;  // first counterexample, empty when passing
    int fail_count = 0;
};

// A distinct positive-probability query tuple for a fixed desired index.
struct Realization {
    std::vector<std::string> labels;
    Rational prob;
};

inline std::vector<Realization> positive_realizations(const PirScheme& s, int k) {
    std::map<std::vector<std::string>, Rational> acc;
    for (const auto& key : s.keys)
        if (key.prob > 0) acc[key.queries[k]] += key.prob;
    std::vector<Realization> out;
    out.reserve(acc.size());
    for (auto& [labels, prob] : acc) out.push_back({labels, prob});
    return out;
}

namespace detail {

inline std::string format_labels(const std::vector<std::string>& labels) {
    std::string out = "(";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += labels[i];
    }
    return out + ")";
}

inline std::string format_servers(ServerMask m) {
    std::string out = "{";
    bool first = true;
    for (int i : mask_members(m)) {
        if (!first) out += ",";
        out += std::to_string(i);
        first = false;
    }
    return out + "}";
}

inline long long encode_tuple(const std::vector<long long>& v, long long radix) {
    long long out = 0;
    for (std::size_t i = v.size(); i-- > 0;) out = out * radix + v[i];
    return out;
}

// Per-server encoded answers / signals / residuals for one realization,
// tabulated over the full message assignment space.
struct RealizationTable {
    std::vector<std::vector<long long>> answers;    // [server][assignment]
    std::vector<std::vector<long long>> signals;    // row k only
    std::vector<std::vector<long long>> residuals;  // rows != k
    std::vector<int> lengths;
};

inline RealizationTable tabulate(const PirScheme& s, const std::vector<std::string>& labels,
                                 int k) {
    const long long assignments = s.msg.assignment_count();
    RealizationTable t;
    t.answers.assign(s.n_servers, {});
    t.signals.assign(s.n_servers, {});
    t.residuals.assign(s.n_servers, {});
    t.lengths.resize(s.n_servers);
    for (int n = 0; n < s.n_servers; ++n) {
        const AnswerMatrix& g = s.matrix_at(n, labels[n]);
        t.lengths[n] = g.cols;
        auto& ans = t.answers[n];
        auto& sig = t.signals[n];
        auto& res = t.residuals[n];
        ans.resize(assignments);
        sig.resize(assignments);
        res.resize(assignments);
        for (long long idx = 0; idx < assignments; ++idx) {
            const std::vector<int> w = s.msg.decode_assignment(idx);
            std::vector<long long> a(g.cols, 0), m(g.cols, 0), r(g.cols, 0);
            for (int i = 0; i < g.cols; ++i) {
                for (int row = 0; row < s.msg.K; ++row) {
                    const long long v = g.at(row, i).eval(w[row], s.msg, s.group);
                    a[i] = s.group.add(a[i], v);
                    if (row == k)
                        m[i] = s.group.add(m[i], v);
                    else
                        r[i] = s.group.add(r[i], v);
                }
            }
            ans[idx] = encode_tuple(a, s.group.order);
            sig[idx] = encode_tuple(m, s.group.order);
            res[idx] = encode_tuple(r, s.group.order);
        }
    }
    return t;
}

// Mutual independence of the per-server values: the joint distribution must
// equal the product of the marginals on every point of the product support.
inline bool mutually_independent(const std::vector<std::vector<long long>>& values,
                                 long long assignments) {
    const int n = static_cast<int>(values.size());
    std::map<std::vector<long long>, long long> joint;
    std::vector<std::map<long long, long long>> marg(n);
    std::vector<long long> tuple(n);
    for (long long idx = 0; idx < assignments; ++idx) {
        for (int i = 0; i < n; ++i) {
            tuple[i] = values[i][idx];
            ++marg[i][tuple[i]];
        }
        ++joint[tuple];
    }
    BigInt scale = integer_pow(BigInt(assignments), n - 1);

    std::vector<std::map<long long, long long>::const_iterator> its(n);
    for (int i = 0; i < n; ++i) its[i] = marg[i].begin();
    while (true) {
        BigInt prod = 1;
        for (int i = 0; i < n; ++i) {
            tuple[i] = its[i]->first;
            prod *= its[i]->second;
        }
        auto jt = joint.find(tuple);
        const long long cnt = jt == joint.end() ? 0 : jt->second;
        if (BigInt(cnt) * scale != prod) return false;
        int pos = n - 1;
        while (pos >= 0 && ++its[pos] == marg[pos].end()) {
            its[pos] = marg[pos].begin();
            --pos;
        }
        if (pos < 0) break;
    }
    return true;
}

inline bool uniform_over(const std::vector<long long>& values, long long assignments,
                         long long space) {
    if (assignments % space != 0) return false;
    const long long expect = assignments / space;
    std::map<long long, long long> counts;
    for (long long v : values) ++counts[v];
    if (static_cast<long long>(counts.size()) != space) return false;
    for (const auto& [v, c] : counts)
        if (c != expect) return false;
    return true;
}

}  // namespace detail

// H(W_k | A, Q) = 0: within each positive realization, assignments that agree
// on every answer must agree on W_k.
inline CheckResult check_correctness(const PirScheme& s) {
    CheckResult r;
    const long long assignments = s.msg.assignment_count();
    for (int k = 0; k < s.msg.K; ++k) {
        for (const auto& real : positive_realizations(s, k)) {
            const auto t = detail::tabulate(s, real.labels, k);
            std::map<std::vector<long long>, int> seen;
            std::vector<long long> key(s.n_servers);
            for (long long idx = 0; idx < assignments; ++idx) {
                for (int n = 0; n < s.n_servers; ++n) key[n] = t.answers[n][idx];
                const int wk = s.msg.decode_assignment(idx)[k];
                auto [it, inserted] = seen.emplace(key, wk);
                if (!inserted && it->second != wk) {
                    ++r.fail_count;
                    if (r.pass) {
                        r.pass = false;
                        r.witness = "k=" + std::to_string(k) + " queries " +
                                    detail::format_labels(real.labels) +
                                    ": identical answers for two values of W_k";
                    }
                    break;
                }
            }
        }
    }
    return r;
}

// Joint query distribution restricted to each colluding set must not depend
// on the desired index.
inline CheckResult check_privacy(const PirScheme& s, const CollusionPattern& p) {
    if (p.n_servers != s.n_servers) throw SizeMismatch("pattern/scheme server counts differ");
    CheckResult r;
    for (ServerMask tm : p.sets) {
        const std::vector<int> members = mask_members(tm);
        std::map<std::vector<std::string>, Rational> base;
        for (int k = 0; k < s.msg.K; ++k) {
            std::map<std::vector<std::string>, Rational> dist;
            for (const auto& key : s.keys) {
                if (key.prob == 0) continue;
                std::vector<std::string> restricted;
                restricted.reserve(members.size());
                for (int n : members) restricted.push_back(key.queries[k][n]);
                dist[restricted] += key.prob;
            }
            if (k == 0) {
                base = std::move(dist);
            } else if (dist != base) {
                ++r.fail_count;
                if (r.pass) {
                    r.pass = false;
                    r.witness = "colluding set " + detail::format_servers(tm) +
                                ": joint query distribution differs between k=0 and k=" +
                                std::to_string(k);
                }
            }
        }
    }
    return r;
}

// Every component function must be constant on X^L or push the uniform
// message to the uniform distribution on Y.
inline CheckResult check_uniform_decomposable(const PirScheme& s) {
    CheckResult r;
    const long long values = s.msg.value_count();
    for (const auto& [key, m] : s.matrices) {
        for (int row = 0; row < m.rows; ++row) {
            for (int col = 0; col < m.cols; ++col) {
                std::map<long long, long long> counts;
                for (long long v = 0; v < values; ++v)
                    ++counts[m.at(row, col).eval(v, s.msg, s.group)];
                const bool constant = counts.size() == 1;
                bool uniform = static_cast<long long>(counts.size()) == s.group.order;
                if (uniform)
                    for (const auto& [val, c] : counts)
                        if (c * s.group.order != values) { uniform = false; break; }
                if (!constant && !uniform) {
                    ++r.fail_count;
                    if (r.pass) {
                        r.pass = false;
                        r.witness = "server " + std::to_string(key.first) + " query " +
                                    key.second + " entry (" + std::to_string(row) + "," +
                                    std::to_string(col) + ") is neither constant nor uniform";
                    }
                }
            }
        }
    }
    return r;
}

// P1: the N server responses are mutually independent, for every desired
// index and positive realization.
inline CheckResult check_p1(const PirScheme& s) {
    CheckResult r;
    const long long assignments = s.msg.assignment_count();
    for (int k = 0; k < s.msg.K; ++k) {
        for (const auto& real : positive_realizations(s, k)) {
            const auto t = detail::tabulate(s, real.labels, k);
            if (!detail::mutually_independent(t.answers, assignments)) {
                ++r.fail_count;
                if (r.pass) {
                    r.pass = false;
                    r.witness = "k=" + std::to_string(k) + " queries " +
                                detail::format_labels(real.labels) +
                                ": responses are not mutually independent";
                }
            }
        }
    }
    return r;
}

// P2: each response is uniform over Y^{l_n(q_n)}.
inline CheckResult check_p2(const PirScheme& s) {
    CheckResult r;
    const long long assignments = s.msg.assignment_count();
    for (int k = 0; k < s.msg.K; ++k) {
        for (const auto& real : positive_realizations(s, k)) {
            const auto t = detail::tabulate(s, real.labels, k);
            for (int n = 0; n < s.n_servers; ++n) {
                long long space = 1;
                for (int i = 0; i < t.lengths[n]; ++i) space *= s.group.order;
                if (!detail::uniform_over(t.answers[n], assignments, space)) {
                    ++r.fail_count;
                    if (r.pass) {
                        r.pass = false;
                        r.witness = "k=" + std::to_string(k) + " queries " +
                                    detail::format_labels(real.labels) + ": response of server " +
                                    std::to_string(n) + " is not uniform";
                    }
                }
            }
        }
    }
    return r;
}

// P3: for each colluding set, every residual is a deterministic function of
// the colluding set's residual block.
inline CheckResult check_p3(const PirScheme& s, const CollusionPattern& p, int k) {
    if (p.n_servers != s.n_servers) throw SizeMismatch("pattern/scheme server counts differ");
    CheckResult r;
    const long long assignments = s.msg.assignment_count();
    for (const auto& real : positive_realizations(s, k)) {
        const auto t = detail::tabulate(s, real.labels, k);
        for (ServerMask tm : p.sets) {
            const std::vector<int> members = mask_members(tm);
            std::map<std::vector<long long>, std::vector<long long>> level;
            std::vector<long long> block(members.size());
            for (long long idx = 0; idx < assignments; ++idx) {
                for (std::size_t i = 0; i < members.size(); ++i)
                    block[i] = t.residuals[members[i]][idx];
                std::vector<long long> all(s.n_servers);
                for (int n = 0; n < s.n_servers; ++n) all[n] = t.residuals[n][idx];
                auto [it, inserted] = level.emplace(block, all);
                if (!inserted && it->second != all) {
                    ++r.fail_count;
                    if (r.pass) {
                        r.pass = false;
                        r.witness = "k=" + std::to_string(k) + " queries " +
                                    detail::format_labels(real.labels) + " colluding set " +
                                    detail::format_servers(tm) +
                                    ": residuals are not determined by the block";
                    }
                    break;
                }
            }
        }
    }
    return r;
}

// P4: the desired-message signals are mutually independent.
inline CheckResult check_p4(const PirScheme& s, int k) {
    CheckResult r;
    const long long assignments = s.msg.assignment_count();
    for (const auto& real : positive_realizations(s, k)) {
        const auto t = detail::tabulate(s, real.labels, k);
        if (!detail::mutually_independent(t.signals, assignments)) {
            ++r.fail_count;
            if (r.pass) {
                r.pass = false;
                r.witness = "k=" + std::to_string(k) + " queries " +
                            detail::format_labels(real.labels) +
                            ": signals are not mutually independent";
            }
        }
    }
    return r;
}

inline CheckResult check_p3_all(const PirScheme& s, const CollusionPattern& p) {
    CheckResult r;
    for (int k = 0; k < s.msg.K; ++k) {
        CheckResult one = check_p3(s, p, k);
        r.fail_count += one.fail_count;
        if (!one.pass && r.pass) {
            r.pass = false;
            r.witness = one.witness;
        }
    }
    return r;
}

inline CheckResult check_p4_all(const PirScheme& s) {
    CheckResult r;
    for (int k = 0; k < s.msg.K; ++k) {
        CheckResult one = check_p4(s, k);
        r.fail_count += one.fail_count;
        if (!one.pass && r.pass) {
            r.pass = false;
            r.witness = one.witness;
        }
    }
    return r;
}

// Consequence of privacy: per-server query marginals, hence expected
// download, cannot depend on k.
inline CheckResult check_download_invariant(const PirScheme& s) {
    CheckResult r;
    const Rational base = expected_download(s, 0);
    for (int k = 1; k < s.msg.K; ++k) {
        if (expected_download(s, k) != base) {
            ++r.fail_count;
            if (r.pass) {
                r.pass = false;
                r.witness = "expected download differs between k=0 and k=" + std::to_string(k);
            }
        }
    }
    return r;
}

struct VerifyReport {
    Rational s_star;
    Rational capacity_value;
    Rational rate_value;
    CheckResult correctness, privacy, uniform_decomposable;
    CheckResult p1, p2, p3, p4;
    CheckResult download_invariant;
    bool rate_equals_capacity = false;
    // A scheme only "achieves capacity" if it is a scheme at all: correct,
    // private, and running at rate C_P.
    bool capacity_achieving = false;
    bool properties_hold = false;  // P1 && P2 && P3 && P4
    // Cross-check of the characterization: among correct+private schemes,
    // rate == C_P must coincide with P1-P4. A false value here is a red flag.
    bool theorem1_consistent = false;
};

inline VerifyReport verify_capacity_achieving(const PirScheme& s, const CollusionPattern& p,
                                              int k_messages) {
    validate_scheme(s);
    if (p.n_servers != s.n_servers) throw SizeMismatch("pattern/scheme server counts differ");
    if (k_messages != s.msg.K) throw BadParams("K does not match the scheme's message count");

    VerifyReport rep;
    rep.s_star = solve_covering(p).value;
    rep.capacity_value = capacity(rep.s_star, k_messages);
    rep.rate_value = rate(s);
    rep.correctness = check_correctness(s);
    rep.privacy = check_privacy(s, p);
    rep.uniform_decomposable = check_uniform_decomposable(s);
    rep.p1 = check_p1(s);
    rep.p2 = check_p2(s);
    rep.p3 = check_p3_all(s, p);
    rep.p4 = check_p4_all(s);
    rep.download_invariant = check_download_invariant(s);
    if (rep.privacy.pass && !rep.download_invariant.pass)
        throw InternalError("private scheme with k-dependent expected download");

    rep.rate_equals_capacity = rep.rate_value == rep.capacity_value;
    const bool valid = rep.correctness.pass && rep.privacy.pass;
    rep.capacity_achieving = valid && rep.rate_equals_capacity;
    rep.properties_hold = rep.p1.pass && rep.p2.pass && rep.p3.pass && rep.p4.pass;
    rep.theorem1_consistent = rep.capacity_achieving == (valid && rep.properties_hold);
    return rep;
}

// Minimum, over qualifying realizations, of the number of servers whose
// desired-message signal is non-constant. A realization qualifies when every
// colluding set's residual block is non-constant. For K = 1 there are no
// residuals and the bound is vacuous.
struct SupportCountReport {
    bool vacuous = false;
    bool qualifying_found = false;
    long long min_count = -1;
    int alpha = 0;
    bool pass = false;
};

inline SupportCountReport signal_support_count(const PirScheme& s, const CollusionPattern& p,
                                               int k) {
    if (p.n_servers != s.n_servers) throw SizeMismatch("pattern/scheme server counts differ");
    if (k < 0 || k >= s.msg.K) throw BadParams("desired index outside [0, K-1]");
    SupportCountReport rep;
    rep.alpha = hitting_number(build_minimal_family(p)).alpha;
    if (s.msg.K == 1) {
        rep.vacuous = true;
        rep.pass = true;
        return rep;
    }
    for (const auto& real : positive_realizations(s, k)) {
        const auto t = detail::tabulate(s, real.labels, k);
        auto constant = [&](const std::vector<long long>& v) {
            for (long long x : v)
                if (x != v[0]) return false;
            return true;
        };
        bool qualifies = true;
        for (ServerMask tm : p.sets) {
            // The block is constant iff every member residual is constant.
            bool block_constant = true;
            for (int n : mask_members(tm))
                if (!constant(t.residuals[n])) { block_constant = false; break; }
            if (block_constant) { qualifies = false; break; }
        }
        if (!qualifies) continue;
        long long count = 0;
        for (int n = 0; n < s.n_servers; ++n)
            if (!constant(t.signals[n])) ++count;
        if (!rep.qualifying_found || count < rep.min_count) rep.min_count = count;
        rep.qualifying_found = true;
    }
    rep.pass = rep.qualifying_found && rep.min_count >= rep.alpha;
    return rep;
}

}  // namespace pircap

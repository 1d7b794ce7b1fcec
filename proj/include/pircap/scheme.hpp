#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pircap/errors.hpp"
#include "pircap/rational.hpp"

namespace pircap {

constexpr long long kSchemeStateCap = 1LL << 24;  // |X|^{KL} * |keys| bound

// Z_{q_1} x ... x Z_{q_r} with componentwise addition. Elements are encoded
// as mixed-radix integers in [0, order), factor 0 least significant.
struct FiniteAbelianGroup {
    std::vector<int> factors;
    long long order = 1;

    static FiniteAbelianGroup make(std::vector<int> fs) {
        FiniteAbelianGroup g;
        g.factors = std::move(fs);
        for (int q : g.factors) {
            if (q < 2) throw BadParams("group factors must be >= 2");
            g.order *= q;
        }
        if (g.order < 2) throw BadParams("group order must be >= 2");
        return g;
    }

    long long add(long long a, long long b) const {
        long long out = 0, place = 1;
        for (int q : factors) {
            out += ((a + b) % q) * place;
            a /= q;
            b /= q;
            place *= q;
        }
        return out;
    }

    long long neg(long long a) const {
        long long out = 0, place = 1;
        for (int q : factors) {
            out += ((q - a % q) % q) * place;
            a /= q;
            place *= q;
        }
        return out;
    }
};

// K messages, each a length-L tuple over an alphabet of size |X|. A message
// value is an integer in [0, |X|^L), digits little-endian.
struct MessageSpace {
    int K = 1;
    int L = 1;
    int x_size = 2;

    long long value_count() const {
        long long v = 1;
        for (int i = 0; i < L; ++i) v *= x_size;
        return v;
    }
    long long assignment_count() const {
        long long v = 1, per = value_count();
        for (int i = 0; i < K; ++i) v *= per;
        return v;
    }
    std::vector<int> decode_assignment(long long index) const {
        std::vector<int> w(K);
        const long long per = value_count();
        for (int k = 0; k < K; ++k) {
            w[k] = static_cast<int>(index % per);
            index /= per;
        }
        return w;
    }
};

// One matrix entry: a total map X^L -> Y, either tabulated or a linear form
// over Z_q (valid when X and Y are both Z_q).
struct ComponentFunction {
    std::optional<std::vector<long long>> table;  // indexed by message value
    std::optional<std::vector<int>> linear;       // L coefficients

    long long eval(long long w_value, const MessageSpace& msg,
                   const FiniteAbelianGroup& group) const {
        if (table) return (*table)[static_cast<std::size_t>(w_value)];
        const int q = group.factors[0];
        long long acc = 0;
        for (int j = 0; j < msg.L; ++j) {
            acc += static_cast<long long>((*linear)[j]) * (w_value % msg.x_size);
            w_value /= msg.x_size;
        }
        return acc % q;
    }
};

// K x l table of component functions; the answer to a query is the columnwise
// group sum of the per-message component values.
struct AnswerMatrix {
    int rows = 0, cols = 0;
    std::vector<ComponentFunction> entries;  // row-major

    const ComponentFunction& at(int k, int i) const {
        return entries[static_cast<std::size_t>(k) * cols + i];
    }
};

struct KeyValue {
    Rational prob;
    std::vector<std::vector<std::string>> queries;  // [desired k][server] -> label
};

// The reserved zero-length query.
inline const std::string kNullQuery = "NULL";

struct PirScheme {
    int n_servers = 1;
    MessageSpace msg;
    FiniteAbelianGroup group;
    std::vector<KeyValue> keys;
    std::map<std::pair<int, std::string>, AnswerMatrix> matrices;

    const AnswerMatrix& matrix_at(int n, const std::string& label) const {
        auto it = matrices.find({n, label});
        if (it == matrices.end())
            throw UnknownQuery("no matrix for server " + std::to_string(n) +
                               ", query " + label);
        return it->second;
    }
    int response_length(int n, const std::string& label) const {
        return matrix_at(n, label).cols;
    }
};

inline void validate_scheme(const PirScheme& s) {
    if (s.n_servers < 1) throw BadParams("scheme needs at least one server");
    if (s.msg.K < 1 || s.msg.L < 1 || s.msg.x_size < 2)
        throw BadParams("need K >= 1, L >= 1, |X| >= 2");
    FiniteAbelianGroup::make(s.group.factors);  // re-checks factors
    if (s.keys.empty()) throw BadParams("scheme needs at least one key value");

    Rational total = 0;
    for (const auto& key : s.keys) {
        if (key.prob < 0) throw BadParams("negative key probability");
        total += key.prob;
        if (static_cast<int>(key.queries.size()) != s.msg.K)
            throw BadParams("each key needs a query tuple per message index");
        for (const auto& row : key.queries) {
            if (static_cast<int>(row.size()) != s.n_servers)
                throw BadParams("query tuple length must equal the server count");
            for (int n = 0; n < s.n_servers; ++n)
                if (s.matrices.find({n, row[n]}) == s.matrices.end())
                    throw NotDecomposable("no answer matrix for server " +
                                          std::to_string(n) + ", query " + row[n]);
        }
    }
    if (total != 1) throw BadParams("key probabilities must sum to 1");

    const long long values = s.msg.value_count();
    for (const auto& [key, m] : s.matrices) {
        if (key.first < 0 || key.first >= s.n_servers)
            throw OutOfRangeIndex("matrix for a server outside [0, N-1]");
        if (m.rows != s.msg.K) throw BadParams("answer matrix must have K rows");
        if (m.cols < 0 || static_cast<long long>(m.entries.size()) !=
                              static_cast<long long>(m.rows) * m.cols)
            throw BadParams("answer matrix entry count mismatch");
        long long enc = 1;
        for (int i = 0; i < m.cols; ++i) {
            if (enc > (1LL << 62) / s.group.order)
                throw TooLarge("answer tuple encoding overflows");
            enc *= s.group.order;
        }
        for (const auto& c : m.entries) {
            if (c.table.has_value() == c.linear.has_value())
                throw BadParams("component must be exactly one of table/linear");
            if (c.table) {
                if (static_cast<long long>(c.table->size()) != values)
                    throw BadParams("component table must cover X^L");
                for (long long v : *c.table)
                    if (v < 0 || v >= s.group.order)
                        throw BadParams("component table value outside Y");
            } else {
                if (static_cast<int>(c.linear->size()) != s.msg.L)
                    throw BadParams("linear component needs L coefficients");
                if (s.group.factors.size() != 1 || s.group.factors[0] != s.msg.x_size)
                    throw BadParams("linear components need X = Y = Z_q");
                for (int v : *c.linear)
                    if (v < 0 || v >= s.msg.x_size)
                        throw BadParams("linear coefficient outside Z_q");
            }
        }
    }

    if (s.msg.assignment_count() * static_cast<long long>(s.keys.size()) > kSchemeStateCap)
        throw TooLarge("message-space enumeration exceeds the state cap");
}

// A = W * G: position i is the group sum over k of component (k, i) at W_k.
inline std::vector<long long> answer(const PirScheme& s, int n, const std::string& label,
                                     const std::vector<int>& w) {
    const AnswerMatrix& g = s.matrix_at(n, label);
    std::vector<long long> out(g.cols, 0);
    for (int i = 0; i < g.cols; ++i)
        for (int k = 0; k < s.msg.K; ++k)
            out[i] = s.group.add(out[i], g.at(k, i).eval(w[k], s.msg, s.group));
    return out;
}

// Desired-row / remaining-rows decomposition of one answer, tabulated over the
// whole message space: signal[w] + residual[w] == answer(w) columnwise.
struct ResidualSplit {
    std::vector<std::vector<long long>> signal;
    std::vector<std::vector<long long>> residual;
};

inline ResidualSplit split(const PirScheme& s, int n, const std::string& label, int k) {
    if (k < 0 || k >= s.msg.K) throw BadParams("desired index outside [0, K-1]");
    const AnswerMatrix& g = s.matrix_at(n, label);
    const long long assignments = s.msg.assignment_count();
    ResidualSplit out;
    out.signal.resize(assignments);
    out.residual.resize(assignments);
    for (long long idx = 0; idx < assignments; ++idx) {
        const std::vector<int> w = s.msg.decode_assignment(idx);
        std::vector<long long> sig(g.cols, 0), res(g.cols, 0);
        for (int i = 0; i < g.cols; ++i) {
            sig[i] = g.at(k, i).eval(w[k], s.msg, s.group);
            for (int r = 0; r < s.msg.K; ++r)
                if (r != k) res[i] = s.group.add(res[i], g.at(r, i).eval(w[r], s.msg, s.group));
        }
        out.signal[idx] = std::move(sig);
        out.residual[idx] = std::move(res);
    }
    return out;
}

inline Rational expected_download(const PirScheme& s, int k) {
    if (k < 0 || k >= s.msg.K) throw BadParams("desired index outside [0, K-1]");
    Rational e = 0;
    for (const auto& key : s.keys) {
        if (key.prob == 0) continue;
        long long len = 0;
        for (int n = 0; n < s.n_servers; ++n)
            len += s.response_length(n, key.queries[k][n]);
        e += key.prob * len;
    }
    return e;
}

namespace detail {

inline std::optional<int> power_exponent(long long value, long long base) {
    int e = 0;
    long long v = 1;
    while (v < value) {
        v *= base;
        ++e;
    }
    if (v == value) return e;
    return std::nullopt;
}

// Smallest b >= 2 with |X| = b^a and |Y| = b^t, if one exists.
inline std::optional<std::pair<int, int>> common_base_exponents(long long x, long long y) {
    for (long long b = 2; b <= x && b <= y; ++b) {
        auto a = power_exponent(x, b), t = power_exponent(y, b);
        if (a && t) return std::make_pair(*a, *t);
    }
    return std::nullopt;
}

}  // namespace detail

// rate = L log|X| / (log|Y| * E[download]). |X| and |Y| must be powers of a
// common base so the log ratio is rational. A scheme whose query marginals are
// k-invariant downloads the same amount for every k; for broken schemes the
// worst (largest) expected download over k is used.
inline Rational rate(const PirScheme& s) {
    auto exps = detail::common_base_exponents(s.msg.x_size, s.group.order);
    if (!exps)
        throw IncommensurableAlphabets("|X| and |Y| are not powers of a common base");
    Rational e = 0;
    for (int k = 0; k < s.msg.K; ++k) {
        Rational ek = expected_download(s, k);
        if (ek > e) e = ek;
    }
    if (e == 0) throw ZeroDownload("expected download is zero");
    return Rational(s.msg.L) * exps->first / (Rational(exps->second) * e);
}

inline AnswerMatrix make_null_matrix(int k_messages) {
    AnswerMatrix m;
    m.rows = k_messages;
    m.cols = 0;
    return m;
}

// columns[i][k] holds the L coefficients of entry (k, i).
inline AnswerMatrix make_linear_matrix(int k_messages, int sub_packets,
                                       const std::vector<std::vector<std::vector<int>>>& columns) {
    AnswerMatrix m;
    m.rows = k_messages;
    m.cols = static_cast<int>(columns.size());
    m.entries.resize(static_cast<std::size_t>(m.rows) * m.cols);
    for (int i = 0; i < m.cols; ++i) {
        if (static_cast<int>(columns[i].size()) != k_messages)
            throw BadParams("column needs one coefficient list per message");
        for (int k = 0; k < k_messages; ++k) {
            if (static_cast<int>(columns[i][k].size()) != sub_packets)
                throw BadParams("entry needs L coefficients");
            m.entries[static_cast<std::size_t>(k) * m.cols + i].linear = columns[i][k];
        }
    }
    return m;
}

// Canonical label for the matrix of a linear scheme: nested row-major coeff
// lists, "NULL" for the zero-length query. Labels double as query identities,
// so equality of matrices must mean equality of labels.
inline std::string canonical_linear_label(const AnswerMatrix& m) {
    if (m.cols == 0) return kNullQuery;
    std::string out = "[";
    for (int k = 0; k < m.rows; ++k) {
        if (k) out += ",";
        out += "[";
        for (int i = 0; i < m.cols; ++i) {
            if (i) out += ",";
            out += "[";
            const auto& c = m.at(k, i);
            if (!c.linear) throw BadParams("canonical labels are for linear matrices");
            for (std::size_t j = 0; j < c.linear->size(); ++j) {
                if (j) out += ",";
                out += std::to_string((*c.linear)[j]);
            }
            out += "]";
        }
        out += "]";
    }
    out += "]";
    return out;
}

}  // namespace pircap

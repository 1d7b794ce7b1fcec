#pragma once

#include <utility>
#include <vector>

#include "pircap/pattern.hpp"
#include "pircap/rational.hpp"

namespace pircap {

enum class Sense { Maximize, Minimize };
enum class RowSense { Le, Ge };
enum class LpStatus { Optimal, Infeasible, Unbounded };

// All variables are implicitly >= 0.
struct LpProblem {
    Sense sense = Sense::Minimize;
    std::vector<Rational> objective;            // size n
    std::vector<std::vector<Rational>> rows;    // m x n
    std::vector<RowSense> row_sense;            // size m
    std::vector<Rational> rhs;                  // size m
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Rational value = 0;
    std::vector<Rational> point;  // structural variables; a vertex when optimal
};

namespace detail {

//==========================================================================
// Two-phase primal simplex on a dense rational tableau. Bland's rule for
// both the entering and the leaving choice: deterministic and cycle-free.
//==========================================================================
class SimplexTableau {
public:
    // Problem must already be a minimization with rhs >= 0 per row.
    SimplexTableau(const std::vector<Rational>& cost,
                   const std::vector<std::vector<Rational>>& rows,
                   const std::vector<RowSense>& senses,
                   const std::vector<Rational>& rhs)
        : n_structural_(cost.size()) {
        const std::size_t m = rows.size();
        std::size_t n_slack = 0, n_art = 0;
        for (RowSense s : senses) (s == RowSense::Le ? n_slack : n_art)++;
        const std::size_t n_surplus = n_art;
        n_cols_ = n_structural_ + n_slack + n_surplus + n_art;
        first_artificial_ = n_cols_ - n_art;

        tab_.assign(m, std::vector<Rational>(n_cols_, Rational(0)));
        rhs_.assign(m, Rational(0));
        basis_.assign(m, 0);

        std::size_t slack_at = n_structural_;
        std::size_t art_at = first_artificial_;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n_structural_; ++j) tab_[i][j] = rows[i][j];
            rhs_[i] = rhs[i];
            if (senses[i] == RowSense::Le) {
                tab_[i][slack_at] = 1;
                basis_[i] = static_cast<int>(slack_at++);
            } else {
                tab_[i][slack_at] = -1;  // surplus
                ++slack_at;
                tab_[i][art_at] = 1;
                basis_[i] = static_cast<int>(art_at++);
            }
        }
        cost_ = cost;
        cost_.resize(n_cols_, Rational(0));
    }

    LpStatus run(Rational& out_value, std::vector<Rational>& out_point) {
        // Phase 1: minimize the sum of artificials.
        if (first_artificial_ < n_cols_) {
            std::vector<Rational> phase1(n_cols_, Rational(0));
            for (std::size_t j = first_artificial_; j < n_cols_; ++j) phase1[j] = 1;
            load_cost(phase1);
            if (iterate(/*allow_artificial=*/true) == LpStatus::Unbounded)
                throw InternalError("phase-1 objective is bounded by construction");
            if (value_ != 0) return LpStatus::Infeasible;
            expel_artificials();
        }
        // Phase 2: the real objective, artificial columns barred.
        load_cost(cost_);
        LpStatus st = iterate(/*allow_artificial=*/false);
        if (st == LpStatus::Unbounded) return st;
        out_value = value_;
        out_point.assign(n_structural_, Rational(0));
        for (std::size_t i = 0; i < tab_.size(); ++i)
            if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_structural_)
                out_point[basis_[i]] = rhs_[i];
        return LpStatus::Optimal;
    }

private:
    // Rebuild the reduced-cost row for the current basis.
    void load_cost(const std::vector<Rational>& c) {
        reduced_ = c;
        value_ = 0;
        for (std::size_t i = 0; i < tab_.size(); ++i) {
            const Rational cb = c[basis_[i]];
            if (cb == 0) continue;
            for (std::size_t j = 0; j < n_cols_; ++j) reduced_[j] -= cb * tab_[i][j];
            value_ += cb * rhs_[i];
        }
    }

    LpStatus iterate(bool allow_artificial) {
        const std::size_t col_end = allow_artificial ? n_cols_ : first_artificial_;
        while (true) {
            // Bland: entering = lowest-index column with negative reduced cost.
            std::size_t enter = col_end;
            for (std::size_t j = 0; j < col_end; ++j)
                if (reduced_[j] < 0) { enter = j; break; }
            if (enter == col_end) return LpStatus::Optimal;

            // Ratio test; ties go to the row whose basic variable has the
            // lowest index (the second half of Bland's rule).
            std::size_t leave = tab_.size();
            Rational best;
            for (std::size_t i = 0; i < tab_.size(); ++i) {
                if (tab_[i][enter] <= 0) continue;
                Rational ratio = rhs_[i] / tab_[i][enter];
                if (leave == tab_.size() || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == tab_.size()) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const Rational inv = Rational(1) / tab_[row][col];
        for (std::size_t j = 0; j < n_cols_; ++j) tab_[row][j] *= inv;
        rhs_[row] *= inv;
        for (std::size_t i = 0; i < tab_.size(); ++i) {
            if (i == row || tab_[i][col] == 0) continue;
            const Rational f = tab_[i][col];
            for (std::size_t j = 0; j < n_cols_; ++j) tab_[i][j] -= f * tab_[row][j];
            rhs_[i] -= f * rhs_[row];
        }
        if (reduced_[col] != 0) {
            const Rational f = reduced_[col];
            for (std::size_t j = 0; j < n_cols_; ++j) reduced_[j] -= f * tab_[row][j];
            value_ += f * rhs_[row];
            reduced_[col] = 0;
        }
        basis_[row] = static_cast<int>(col);
    }

    // After phase 1: pivot basic artificials out on any real column, or drop
    // the row as redundant when it is all-zero outside the artificials.
    void expel_artificials() {
        for (std::size_t i = 0; i < tab_.size();) {
            if (static_cast<std::size_t>(basis_[i]) < first_artificial_) { ++i; continue; }
            std::size_t col = first_artificial_;
            for (std::size_t j = 0; j < first_artificial_; ++j)
                if (tab_[i][j] != 0) { col = j; break; }
            if (col == first_artificial_) {
                tab_.erase(tab_.begin() + i);
                rhs_.erase(rhs_.begin() + i);
                basis_.erase(basis_.begin() + i);
                continue;
            }
            pivot(i, col);
            ++i;
        }
    }

    std::size_t n_structural_, n_cols_, first_artificial_;
    std::vector<std::vector<Rational>> tab_;
    std::vector<Rational> rhs_, cost_, reduced_;
    std::vector<int> basis_;
    Rational value_ = 0;
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& p) {
    const std::size_t n = p.objective.size(), m = p.rows.size();
    if (p.row_sense.size() != m || p.rhs.size() != m)
        throw BadParams("inconsistent LP row dimensions");
    for (const auto& r : p.rows)
        if (r.size() != n) throw BadParams("inconsistent LP column dimensions");

    std::vector<Rational> cost = p.objective;
    if (p.sense == Sense::Maximize)
        for (auto& c : cost) c = -c;

    // Normalize each row to a non-negative right-hand side.
    std::vector<std::vector<Rational>> rows = p.rows;
    std::vector<RowSense> senses = p.row_sense;
    std::vector<Rational> rhs = p.rhs;
    for (std::size_t i = 0; i < m; ++i) {
        if (rhs[i] >= 0) continue;
        for (auto& a : rows[i]) a = -a;
        rhs[i] = -rhs[i];
        senses[i] = senses[i] == RowSense::Le ? RowSense::Ge : RowSense::Le;
    }

    detail::SimplexTableau tableau(cost, rows, senses, rhs);
    LpSolution sol;
    Rational value;
    std::vector<Rational> point;
    sol.status = tableau.run(value, point);
    if (sol.status == LpStatus::Optimal) {
        sol.value = p.sense == Sense::Maximize ? -value : value;
        sol.point = std::move(point);
    }
    return sol;
}

// max 1'y  s.t.  B' y <= 1_M, y >= 0.  Always feasible and bounded: every
// server lies in some set, so each y_n <= 1.
inline LpSolution solve_packing(const CollusionPattern& p) {
    LpProblem lp;
    lp.sense = Sense::Maximize;
    lp.objective.assign(p.n_servers, Rational(1));
    for (ServerMask s : p.sets) {
        std::vector<Rational> row(p.n_servers, Rational(0));
        for (int i : mask_members(s)) row[i] = 1;
        lp.rows.push_back(std::move(row));
        lp.row_sense.push_back(RowSense::Le);
        lp.rhs.push_back(Rational(1));
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw InternalError("packing program must have an optimum");
    return sol;
}

// min 1'x  s.t.  B x >= 1_N, x >= 0.  Strong duality against the packing
// program is asserted on every call.
inline LpSolution solve_covering(const CollusionPattern& p) {
    LpProblem lp;
    lp.sense = Sense::Minimize;
    lp.objective.assign(p.sets.size(), Rational(1));
    IncidenceMatrix b = incidence_matrix(p);
    for (int i = 0; i < b.rows; ++i) {
        std::vector<Rational> row(b.cols);
        for (int m = 0; m < b.cols; ++m) row[m] = b.at(i, m);
        lp.rows.push_back(std::move(row));
        lp.row_sense.push_back(RowSense::Ge);
        lp.rhs.push_back(Rational(1));
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw InternalError("covering program must have an optimum");
    if (sol.value != solve_packing(p).value)
        throw DualityMismatch("covering and packing optima differ");
    return sol;
}

// C = (sum_{j=0}^{K-1} (1/S*)^j)^{-1}, exactly.
inline Rational capacity(const Rational& s_star, int k_messages) {
    if (s_star <= 0 || k_messages < 1) throw BadParams("need S* > 0 and K >= 1");
    const Rational inv = Rational(1) / s_star;
    Rational sum = 0, term = 1;
    for (int j = 0; j < k_messages; ++j) {
        sum += term;
        term *= inv;
    }
    return Rational(1) / sum;
}

struct CoverClass {
    Rational sum;
    int cls;  // -1: < 1 (violated), 0: == 1, +1: > 1
};

struct FractionalCoveringReport {
    std::vector<CoverClass> per_server;
    bool valid = true;  // no server with sum < 1
};

inline FractionalCoveringReport check_fractional_covering(const CollusionPattern& p,
                                                          const std::vector<Rational>& weights) {
    if (static_cast<int>(weights.size()) != p.size())
        throw BadParams("one weight per colluding set required");
    for (const auto& w : weights)
        if (w < 0) throw BadParams("weights must be non-negative");
    FractionalCoveringReport rep;
    rep.per_server.resize(p.n_servers);
    for (int i = 0; i < p.n_servers; ++i) {
        Rational sum = 0;
        for (int m = 0; m < p.size(); ++m)
            if (p.sets[m] & (ServerMask{1} << i)) sum += weights[m];
        rep.per_server[i] = {sum, sum < 1 ? -1 : (sum == 1 ? 0 : +1)};
        if (sum < 1) rep.valid = false;
    }
    return rep;
}

struct SupportReduction {
    CollusionPattern reduced;
    std::vector<int> removed;              // indices into the input set order
    std::vector<Rational> positive_point;  // optimal covering point over kept sets, all > 0
    bool averaged = false;                 // built by averaging per-set face maximizers
};

namespace detail {

// max x_m over the optimal face of the covering program: the original
// constraints plus 1'x == S* written as a <= / >= pair.
inline LpSolution face_maximizer(const CollusionPattern& p, const Rational& s_star, int m) {
    LpProblem lp;
    lp.sense = Sense::Maximize;
    lp.objective.assign(p.sets.size(), Rational(0));
    lp.objective[m] = 1;
    IncidenceMatrix b = incidence_matrix(p);
    for (int i = 0; i < b.rows; ++i) {
        std::vector<Rational> row(b.cols);
        for (int c = 0; c < b.cols; ++c) row[c] = b.at(i, c);
        lp.rows.push_back(std::move(row));
        lp.row_sense.push_back(RowSense::Ge);
        lp.rhs.push_back(Rational(1));
    }
    std::vector<Rational> ones(p.sets.size(), Rational(1));
    lp.rows.push_back(ones);
    lp.row_sense.push_back(RowSense::Le);
    lp.rhs.push_back(s_star);
    lp.rows.push_back(ones);
    lp.row_sense.push_back(RowSense::Ge);
    lp.rhs.push_back(s_star);
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw InternalError("face program must have an optimum");
    return sol;
}

}  // namespace detail

// Remove every set whose coordinate is zero in all optimal covering solutions
// (face maximum 0). The reduced pattern admits an all-positive optimal point,
// returned alongside; the LP value is unchanged by construction and re-checked.
inline SupportReduction reduce_by_support(const CollusionPattern& p) {
    LpSolution base = solve_covering(p);
    const Rational s_star = base.value;

    CollusionPattern cur = p;
    std::vector<int> cur_to_orig(p.size());
    for (int m = 0; m < p.size(); ++m) cur_to_orig[m] = m;
    std::vector<int> removed;

    bool all_positive = true;
    for (const auto& x : base.point)
        if (x == 0) { all_positive = false; break; }

    std::vector<std::vector<Rational>> maximizers;
    if (all_positive) {
        maximizers.push_back(base.point);
    } else {
        while (true) {
            std::vector<int> drop;
            maximizers.clear();
            for (int m = 0; m < cur.size(); ++m) {
                LpSolution sol = detail::face_maximizer(cur, s_star, m);
                if (sol.value == 0)
                    drop.push_back(m);
                else
                    maximizers.push_back(sol.point);
            }
            if (drop.empty()) break;
            std::vector<ServerMask> kept_sets;
            std::vector<int> kept_map;
            ServerMask covered = 0;
            for (int m = 0, d = 0; m < cur.size(); ++m) {
                if (d < static_cast<int>(drop.size()) && drop[d] == m) {
                    removed.push_back(cur_to_orig[m]);
                    ++d;
                    continue;
                }
                kept_sets.push_back(cur.sets[m]);
                kept_map.push_back(cur_to_orig[m]);
                covered |= cur.sets[m];
            }
            const ServerMask all = (cur.n_servers == kMaxServers)
                                       ? ~ServerMask{0}
                                       : (ServerMask{1} << cur.n_servers) - 1;
            if (covered != all)
                throw UncoveredServer("support reduction uncovered a server");
            cur.sets = std::move(kept_sets);
            cur_to_orig = std::move(kept_map);
            if (solve_covering(cur).value != s_star)
                throw InternalError("support reduction changed the LP value");
        }
    }

    SupportReduction out;
    out.reduced = cur;
    std::sort(removed.begin(), removed.end());
    out.removed = std::move(removed);
    out.averaged = !all_positive;

    // Average of the face maximizers: optimal (the face is convex) and
    // strictly positive in every kept coordinate.
    std::vector<Rational> avg(cur.size(), Rational(0));
    for (const auto& pt : maximizers) {
        if (all_positive) {
            avg = pt;
            break;
        }
        for (int m = 0; m < cur.size(); ++m) avg[m] += pt[m];
    }
    if (!all_positive)
        for (auto& v : avg) v /= static_cast<int>(maximizers.size());
    Rational total = 0;
    for (int m = 0; m < cur.size(); ++m) {
        if (avg[m] <= 0) throw InternalError("positive witness has a zero coordinate");
        total += avg[m];
    }
    if (total != s_star) throw InternalError("positive witness is not optimal");
    if (!check_fractional_covering(cur, avg).valid)
        throw InternalError("positive witness is not a covering");
    out.positive_point = std::move(avg);
    return out;
}

}  // namespace pircap

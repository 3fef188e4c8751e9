#pragma once

// Dense two-phase simplex, used only as an independent oracle for the TV-ball infimum.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

struct LpResult {
    double value = 0.0;
    std::vector<double> x;
};

// min c^T x  s.t.  A x = b (b >= 0), x >= 0.  Bland's rule, so no cycling.
inline std::optional<LpResult> simplex_min(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                                           const std::vector<double>& c) {
    const std::size_t m = A.size(), n = c.size();
    const double tol = 1e-12;
    // tableau columns: n originals, m artificials, rhs
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> T(m + 1, std::vector<double>(cols, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0) throw std::invalid_argument("rhs must be non-negative");
        for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = 1.0;
        T[i][cols - 1] = b[i];
        basis[i] = n + i;
    }

    auto pivot = [&](std::size_t r, std::size_t col) {
        const double p = T[r][col];
        for (auto& v : T[r]) v /= p;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == r || T[i][col] == 0.0) continue;
            const double f = T[i][col];
            for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[r][j];
        }
        basis[r] = col;
    };

    auto run = [&](std::size_t allowed) {
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j)
                if (T[m][j] < -tol) {
                    enter = j;
                    break;
                }
            if (enter == allowed) return true;
            std::size_t leave = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (T[i][enter] <= tol) continue;
                const double ratio = T[i][cols - 1] / T[i][enter];
                if (ratio < best - tol || (std::abs(ratio - best) <= tol && leave < m && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m) return false; // unbounded
            pivot(leave, enter);
        }
    };

    // phase 1: minimize the sum of artificials
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += T[i][j];
        T[m][j] = (j >= n && j < n + m) ? 0.0 : -s;
    }
    run(n + m);
    if (-T[m][cols - 1] > 1e-9) return std::nullopt; // infeasible
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(T[i][j]) > tol) {
                pivot(i, j);
                break;
            }
    }

    // phase 2
    for (std::size_t j = 0; j < cols; ++j) T[m][j] = j < n ? c[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= n) continue;
        const double f = T[m][basis[i]];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < cols; ++j) T[m][j] -= f * T[i][j];
    }
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] >= n) T[i].assign(cols, 0.0); // redundant row left with an artificial
    if (!run(n)) return std::nullopt;

    LpResult r;
    r.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) r.x[basis[i]] = T[i][cols - 1];
    for (std::size_t j = 0; j < n; ++j) r.value += c[j] * r.x[j];
    return r;
}

// inf E_q[v] over {q in simplex : TV(q, p) <= sigma}, written as q = p - u + w with
// sum u = sum w, sum u <= sigma, 0 <= u <= p, w >= 0.
inline LpResult tv_ball_inf(std::span<const double> p, std::span<const double> v, double sigma) {
    const std::size_t S = p.size();
    // variables: u (S), w (S), slack for sum u (1), slacks for u_i <= p_i (S)
    const std::size_t n = 3 * S + 1;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < S; ++i) {
        row[i] = 1.0;
        row[S + i] = -1.0;
    }
    A.push_back(row);
    b.push_back(0.0);
    row.assign(n, 0.0);
    for (std::size_t i = 0; i < S; ++i) row[i] = 1.0;
    row[2 * S] = 1.0;
    A.push_back(row);
    b.push_back(std::min(sigma, 1.0));
    for (std::size_t i = 0; i < S; ++i) {
        row.assign(n, 0.0);
        row[i] = 1.0;
        row[2 * S + 1 + i] = 1.0;
        A.push_back(row);
        b.push_back(p[i]);
    }
    std::vector<double> c(n, 0.0);
    double base = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
        c[i] = -v[i];
        c[S + i] = v[i];
        base += p[i] * v[i];
    }
    auto sol = simplex_min(A, b, c);
    if (!sol) throw std::runtime_error("TV ball LP failed");
    LpResult out;
    out.value = base + sol->value;
    out.x.resize(S);
    for (std::size_t i = 0; i < S; ++i) out.x[i] = p[i] - sol->x[i] + sol->x[S + i];
    return out;
}

} // namespace oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "gravelet/common.hpp"
#include "gravelet/graph.hpp"
#include "gravelet/rng.hpp"

namespace gravelet {

struct SpectralOptions {
    int dense_threshold = 1024; // at or below this size, diagonalize directly
    double rel_tol = 1e-6;
    int max_iterations = 10000;
    std::uint64_t seed = 0x67726176656c6574ULL;
};

struct SpectrumInfo {
    double lambda2 = 0.0;
    double lambda_max = 0.0;
    bool used_dense = false;
    int matvecs = 0; // Lanczos matvecs plus inverse-iteration solves
};

struct DenseEigen {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns
};

inline DenseEigen dense_eigendecomposition(const Laplacian& lap) {
    Eigen::MatrixXd full = Eigen::MatrixXd(lap.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
    if (es.info() != Eigen::Success)
        throw Error(ErrorClass::EigensolverFailure, "dense eigendecomposition did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

// Heat operator exp(-s L) = U exp(-s Lambda) U^T. Reuse the decomposition
// when evaluating several scales.
inline Eigen::MatrixXd dense_heat_operator(const DenseEigen& eig, double s) {
    if (s < 0.0) throw Error(ErrorClass::InvalidInput, "diffusion scale must be >= 0");
    Eigen::VectorXd damp = (-s * eig.values.array()).exp().matrix();
    return eig.vectors * damp.asDiagonal() * eig.vectors.transpose();
}

inline Eigen::MatrixXd dense_heat_operator(const Laplacian& lap, double s) {
    return dense_heat_operator(dense_eigendecomposition(lap), s);
}

namespace detail {

inline Eigen::VectorXd random_unit_vector(int n, Rng& rng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = 2.0 * rng.next_double() - 1.0;
    const double norm = v.norm();
    if (norm == 0.0) v[0] = 1.0;
    else v /= norm;
    return v;
}

struct RitzPair {
    double value = 0.0;
    Eigen::VectorXd vector;
    int matvecs = 0;
    bool converged = false;
};

// Largest eigenvalue of a symmetric sparse matrix by restarted Lanczos with
// full reorthogonalization. Restarts from the current best Ritz vector.
inline RitzPair lanczos_largest(const Eigen::SparseMatrix<double>& m, double rel_tol,
                                int max_matvecs, Rng& rng) {
    const int n = static_cast<int>(m.rows());
    const int basis_cap = std::min(n, 300);
    RitzPair out;
    Eigen::VectorXd start = random_unit_vector(n, rng);
    while (out.matvecs < max_matvecs) {
        std::vector<Eigen::VectorXd> basis;
        std::vector<double> alphas, betas; // betas[j] couples basis j and j+1
        Eigen::VectorXd v = start;
        v.normalize();
        bool cycle_done = false;
        while (!cycle_done) {
            basis.push_back(v);
            Eigen::VectorXd w = m * v;
            ++out.matvecs;
            const double alpha = v.dot(w);
            alphas.push_back(alpha);
            w -= alpha * v;
            if (!betas.empty()) w -= betas.back() * basis[basis.size() - 2];
            for (const Eigen::VectorXd& b : basis) w -= b.dot(w) * b;
            const double beta = w.norm();

            const int k = static_cast<int>(alphas.size());
            const bool exhausted =
                k == basis_cap || out.matvecs >= max_matvecs || beta < 1e-14;
            if (exhausted || k % 8 == 0) {
                Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alphas.data(), k);
                Eigen::VectorXd sub =
                    Eigen::Map<Eigen::VectorXd>(betas.data(), std::max(k - 1, 0));
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
                es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                const double theta = es.eigenvalues()[k - 1];
                const Eigen::VectorXd s = es.eigenvectors().col(k - 1);
                out.value = theta;
                out.vector = Eigen::VectorXd::Zero(n);
                for (int i = 0; i < k; ++i)
                    out.vector += s[i] * basis[static_cast<std::size_t>(i)];
                out.vector.normalize();
                const double resid = beta * std::abs(s[k - 1]);
                // Krylov closure from a random start means the subspace carries
                // every distinct eigenvalue, so the top Ritz value is exact.
                if (resid <= rel_tol * std::max(std::abs(theta), 1e-300) || beta < 1e-14) {
                    out.converged = true;
                    return out;
                }
                if (exhausted) {
                    start = out.vector;
                    cycle_done = true;
                }
            }
            if (!cycle_done) {
                betas.push_back(beta);
                v = w / beta;
            }
        }
    }
    return out;
}

// Smallest nonzero Laplacian eigenvalue via inverse iteration on L + sigma I,
// keeping iterates orthogonal to the constant kernel vector.
inline RitzPair lambda2_inverse_iteration(const Eigen::SparseMatrix<double>& lap_m,
                                          double lambda_max, double rel_tol, int max_iters,
                                          Rng& rng) {
    const int n = static_cast<int>(lap_m.rows());
    const double sigma = std::max(1e-10 * lambda_max, 1e-300);
    Eigen::SparseMatrix<double> shifted = lap_m;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += sigma;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(shifted);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorClass::EigensolverFailure, "factorization of shifted laplacian failed");

    auto deflate = [n](Eigen::VectorXd& v) { v.array() -= v.sum() / n; };

    RitzPair out;
    Eigen::VectorXd v = random_unit_vector(n, rng);
    deflate(v);
    if (v.norm() < 1e-14) { v.setZero(); v[0] = 1.0; deflate(v); }
    v.normalize();
    double rho_prev = std::numeric_limits<double>::infinity();
    bool resid_ok = false;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd w = solver.solve(v);
        ++out.matvecs;
        deflate(w);
        const double nw = w.norm();
        if (!std::isfinite(nw) || nw == 0.0)
            throw Error(ErrorClass::EigensolverFailure, "inverse iteration produced a zero vector");
        w /= nw;
        Eigen::VectorXd lw = lap_m * w;
        const double rho = w.dot(lw);
        const double resid = (lw - rho * w).norm();
        out.value = rho;
        out.vector = w;
        resid_ok = resid <= rel_tol * std::max(rho, sigma);
        const bool stalled = std::abs(rho_prev - rho) <= 0.01 * rel_tol * std::max(rho, sigma);
        if (resid_ok && stalled) {
            out.converged = true;
            return out;
        }
        rho_prev = rho;
        v = w;
    }
    out.converged = resid_ok;
    return out;
}

} // namespace detail

// Extremal nonzero spectrum of the Laplacian: lambda2 (algebraic
// connectivity) and lambda_max. Rejects graphs that are numerically
// disconnected, i.e. lambda2 <= 1e-9 * lambda_max.
inline SpectrumInfo extremal_eigenvalues(const Laplacian& lap, const SpectralOptions& opts = {}) {
    if (lap.n < 2)
        throw Error(ErrorClass::InvalidInput, "spectrum needs at least two nodes");
    SpectrumInfo info;
    if (lap.n <= opts.dense_threshold) {
        const DenseEigen eig = dense_eigendecomposition(lap);
        info.lambda2 = eig.values[1];
        info.lambda_max = eig.values[lap.n - 1];
        info.used_dense = true;
    } else {
        Rng rng(opts.seed);
        detail::RitzPair top =
            detail::lanczos_largest(lap.matrix, opts.rel_tol, opts.max_iterations, rng);
        if (!top.converged)
            throw Error(ErrorClass::EigensolverFailure,
                        "largest-eigenvalue iteration did not converge");
        detail::RitzPair low = detail::lambda2_inverse_iteration(
            lap.matrix, top.value, opts.rel_tol, opts.max_iterations, rng);
        if (!low.converged)
            throw Error(ErrorClass::EigensolverFailure,
                        "algebraic-connectivity iteration did not converge");
        info.lambda2 = low.value;
        info.lambda_max = top.value;
        info.matvecs = top.matvecs + low.matvecs;
    }
    if (info.lambda2 <= 1e-9 * info.lambda_max)
        throw Error(ErrorClass::Disconnected,
                    "algebraic connectivity is numerically zero; graph is disconnected");
    return info;
}

// Chebyshev expansion of exp(-s x) on [0, bound]:
//   p(x) = c_0/2 + sum_{k>=1} c_k T_k(2x/bound - 1)
// Coefficients by Gauss-Chebyshev quadrature.
inline std::vector<double> chebyshev_coefficients(int order, double scale, double bound) {
    if (order < 1) throw Error(ErrorClass::InvalidInput, "polynomial order must be >= 1");
    if (!(bound > 0.0)) throw Error(ErrorClass::InvalidInput, "spectral bound must be > 0");
    if (scale < 0.0) throw Error(ErrorClass::InvalidInput, "diffusion scale must be >= 0");
    const int q = std::max(order + 1, 64);
    std::vector<double> coeffs(static_cast<std::size_t>(order) + 1, 0.0);
    for (int j = 0; j < q; ++j) {
        const double theta = std::numbers::pi * (j + 0.5) / q;
        const double x = bound * (std::cos(theta) + 1.0) / 2.0;
        const double f = std::exp(-scale * x);
        for (int k = 0; k <= order; ++k)
            coeffs[static_cast<std::size_t>(k)] += f * std::cos(k * theta);
    }
    for (double& c : coeffs) c *= 2.0 / q;
    return coeffs;
}

struct ChebyshevFilter {
    double bound = 0.0; // spectral upper estimate; kernel approximated on [0, bound]
    double scale = 0.0;
    std::vector<double> coeffs;
    double tol = 0.0; // sup-norm approximation error on a dense grid

    int order() const { return static_cast<int>(coeffs.size()) - 1; }

    // Clenshaw evaluation of the expansion at x in [0, bound].
    double evaluate(double x) const {
        const double y = 2.0 * x / bound - 1.0;
        double b1 = 0.0, b2 = 0.0;
        for (int k = order(); k >= 1; --k) {
            const double t = 2.0 * y * b1 - b2 + coeffs[static_cast<std::size_t>(k)];
            b2 = b1;
            b1 = t;
        }
        return y * b1 - b2 + 0.5 * coeffs[0];
    }
};

inline ChebyshevFilter make_chebyshev_filter(int order, double scale, double bound) {
    ChebyshevFilter f;
    f.bound = bound;
    f.scale = scale;
    f.coeffs = chebyshev_coefficients(order, scale, bound);
    constexpr int grid = 10000;
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double x = bound * i / (grid - 1);
        worst = std::max(worst, std::abs(std::exp(-scale * x) - f.evaluate(x)));
    }
    f.tol = worst;
    return f;
}

struct FilterApplyOptions {
    // Entries below the threshold are dropped and the column rescaled to keep
    // unit mass. Turn off to get the raw polynomial result.
    bool truncate = true;
    double truncate_threshold = 1e-10;
};

// Scratch state reused across filter applications on one graph. After a call,
// `support` holds the kept indices in ascending order and `acc` their values;
// everything the recurrence touched is recorded so the next call cleans only
// that, keeping per-column cost proportional to the diffusion neighborhood.
struct FilterWorkspace {
    std::vector<double> prev, cur, next, acc;
    std::vector<char> in_support;
    std::vector<int> touched;
    std::vector<int> support;
};

// Applies the polynomial filter of the Laplacian to the indicator of `node`,
// leaving the result in ws.support / ws.acc. The three-term recurrence touches
// only the filter-order-hop neighborhood, so cost is bounded by the
// neighborhood size, not n.
inline void apply_filter_into(const Graph& g, const ChebyshevFilter& filter, int node,
                              const FilterApplyOptions& opts, FilterWorkspace& ws) {
    const int n = g.n();
    if (node < 0 || node >= n) throw Error(ErrorClass::InvalidInput, "node index out of range");
    const int order = filter.order();
    const double half_b = filter.bound / 2.0;

    if (static_cast<int>(ws.prev.size()) != n) {
        ws.prev.assign(static_cast<std::size_t>(n), 0.0);
        ws.cur.assign(static_cast<std::size_t>(n), 0.0);
        ws.next.assign(static_cast<std::size_t>(n), 0.0);
        ws.acc.assign(static_cast<std::size_t>(n), 0.0);
        ws.in_support.assign(static_cast<std::size_t>(n), 0);
    } else {
        for (int u : ws.touched) {
            const auto i = static_cast<std::size_t>(u);
            ws.prev[i] = ws.cur[i] = ws.next[i] = ws.acc[i] = 0.0;
            ws.in_support[i] = 0;
        }
    }
    ws.touched.clear();
    ws.support.clear();

    ws.touched.push_back(node);
    ws.in_support[static_cast<std::size_t>(node)] = 1;
    std::size_t frontier_begin = 0;

    auto expand_support = [&] {
        const std::size_t end = ws.touched.size();
        for (std::size_t i = frontier_begin; i < end; ++i)
            for (int v : g.neighbors(ws.touched[i]))
                if (!ws.in_support[static_cast<std::size_t>(v)]) {
                    ws.in_support[static_cast<std::size_t>(v)] = 1;
                    ws.touched.push_back(v);
                }
        frontier_begin = end;
    };
    // Scaled operator row: ((2/b) L - I) v at u.
    auto scaled_row = [&](int u, const std::vector<double>& v) {
        double lv = g.degree(u) * v[static_cast<std::size_t>(u)];
        const auto nbrs = g.neighbors(u);
        const auto wts = g.neighbor_weights(u);
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            lv -= wts[i] * v[static_cast<std::size_t>(nbrs[i])];
        return lv / half_b - v[static_cast<std::size_t>(u)];
    };

    ws.prev[static_cast<std::size_t>(node)] = 1.0; // T_0 applied to the indicator
    ws.acc[static_cast<std::size_t>(node)] = 0.5 * filter.coeffs[0];
    if (order >= 1) {
        expand_support();
        for (int u : ws.touched)
            ws.cur[static_cast<std::size_t>(u)] = scaled_row(u, ws.prev);
        for (int u : ws.touched)
            ws.acc[static_cast<std::size_t>(u)] +=
                filter.coeffs[1] * ws.cur[static_cast<std::size_t>(u)];
    }
    for (int k = 2; k <= order; ++k) {
        expand_support();
        for (int u : ws.touched)
            ws.next[static_cast<std::size_t>(u)] =
                2.0 * scaled_row(u, ws.cur) - ws.prev[static_cast<std::size_t>(u)];
        for (int u : ws.touched)
            ws.acc[static_cast<std::size_t>(u)] +=
                filter.coeffs[static_cast<std::size_t>(k)] * ws.next[static_cast<std::size_t>(u)];
        std::swap(ws.prev, ws.cur);
        std::swap(ws.cur, ws.next);
    }

    ws.support.assign(ws.touched.begin(), ws.touched.end());
    std::sort(ws.support.begin(), ws.support.end());
    double sum = 0.0;
    std::size_t kept = 0;
    for (int u : ws.support) {
        const double val = ws.acc[static_cast<std::size_t>(u)];
        if (!std::isfinite(val))
            throw Error(ErrorClass::EigensolverFailure, "polynomial filter produced non-finite values");
        if (opts.truncate && std::abs(val) < opts.truncate_threshold) continue;
        ws.support[kept++] = u;
        sum += val;
    }
    ws.support.resize(kept);
    if (opts.truncate) {
        if (sum <= 0.0)
            throw Error(ErrorClass::EigensolverFailure, "filtered column lost all mass");
        for (int u : ws.support) ws.acc[static_cast<std::size_t>(u)] /= sum;
    }
}

inline Eigen::VectorXd apply_filter(const Graph& g, const ChebyshevFilter& filter, int node,
                                    const FilterApplyOptions& opts = {}) {
    FilterWorkspace ws;
    apply_filter_into(g, filter, node, opts, ws);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n());
    for (int u : ws.support) out[u] = ws.acc[static_cast<std::size_t>(u)];
    return out;
}

} // namespace gravelet

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "gravelet/common.hpp"
#include "gravelet/graph.hpp"
#include "gravelet/spectral.hpp"

namespace gravelet {

struct ScaleParams {
    double eta = 0.85;
    double gamma = 0.95;
    int count = 2;
};

struct ScaleRange {
    double s_min = 0.0;
    double s_max = 0.0;
    std::vector<double> scales; // geometric spacing from s_min to s_max
};

// Scale window from the spectrum: both ends are set where the heat kernel
// damping at sqrt(lambda2 * lambda_max) crosses eta (wide end) and gamma
// (tight end). One scale requested gives the geometric midpoint.
inline ScaleRange select_scales(const SpectrumInfo& spec, const ScaleParams& params = {}) {
    if (!(params.eta > 0.0 && params.eta < 1.0))
        throw Error(ErrorClass::InvalidInput, "eta must lie in (0, 1)");
    if (!(params.gamma > 0.0 && params.gamma < 1.0))
        throw Error(ErrorClass::InvalidInput, "gamma must lie in (0, 1)");
    if (params.eta > params.gamma)
        throw Error(ErrorClass::InvalidInput, "eta must not exceed gamma");
    if (params.count < 1)
        throw Error(ErrorClass::InvalidInput, "scale count must be >= 1");
    if (!(spec.lambda2 > 0.0) || !(spec.lambda_max > 0.0))
        throw Error(ErrorClass::InvalidInput, "scale selection needs a positive spectrum");

    const double geo = std::sqrt(spec.lambda2 * spec.lambda_max);
    ScaleRange range;
    range.s_min = -std::log(params.gamma) / geo;
    range.s_max = -std::log(params.eta) / geo;
    if (params.count == 1) {
        range.scales.push_back(std::sqrt(range.s_min * range.s_max));
        return range;
    }
    for (int i = 0; i < params.count; ++i) {
        const double t = static_cast<double>(i) / (params.count - 1);
        range.scales.push_back(range.s_min * std::pow(range.s_max / range.s_min, t));
    }
    range.scales.front() = range.s_min;
    range.scales.back() = range.s_max;
    return range;
}

struct WaveletColumn {
    int node = 0;
    double scale = 0.0;
    Eigen::VectorXd values;
};

struct WaveletMatrix {
    double scale = 0.0;
    Eigen::MatrixXd values; // column a holds the wavelet centered at node a
};

enum class WaveletMode { Auto, Dense, Chebyshev };

struct WaveletOptions {
    WaveletMode mode = WaveletMode::Auto;
    int order = 30;            // Chebyshev polynomial degree
    double bound_factor = 1.01; // filter domain is bound_factor * lambda_max
    SpectralOptions spectral;
    FilterApplyOptions apply;
};

// Owns the spectral state needed to produce wavelet columns at registered
// scales. After prepare_scales, column() is safe to call from many threads.
class WaveletEngine {
public:
    WaveletEngine(const Graph& g, WaveletOptions opts = {}) : g_(&g), opts_(opts) {
        require_connected(g);
        if (g.n() < 2)
            throw Error(ErrorClass::InvalidInput, "wavelets need at least two nodes");
        const bool dense_fits = g.n() <= opts_.spectral.dense_threshold;
        dense_ = opts_.mode == WaveletMode::Dense ||
                 (opts_.mode == WaveletMode::Auto && dense_fits);
        if (dense_) {
            eig_ = dense_eigendecomposition(laplacian(g));
            spec_.lambda2 = eig_->values[1];
            spec_.lambda_max = eig_->values[g.n() - 1];
            spec_.used_dense = true;
            if (spec_.lambda2 <= 1e-9 * spec_.lambda_max)
                throw Error(ErrorClass::Disconnected,
                            "algebraic connectivity is numerically zero; graph is disconnected");
        } else {
            spec_ = extremal_eigenvalues(laplacian(g), opts_.spectral);
        }
    }

    const Graph& graph() const { return *g_; }
    const SpectrumInfo& spectrum() const { return spec_; }
    bool dense_mode() const { return dense_; }

    void prepare_scales(const std::vector<double>& scales) {
        for (double s : scales) {
            if (s < 0.0)
                throw Error(ErrorClass::InvalidInput, "diffusion scale must be >= 0");
            if (!dense_ && !filters_.count(s))
                filters_.emplace(s, make_chebyshev_filter(opts_.order, s,
                                                          opts_.bound_factor * spec_.lambda_max));
        }
        prepared_.insert(prepared_.end(), scales.begin(), scales.end());
    }

    const ChebyshevFilter& filter(double scale) const {
        auto it = filters_.find(scale);
        if (it == filters_.end())
            throw Error(ErrorClass::InvalidInput, "scale was not prepared on this engine");
        return it->second;
    }

    Eigen::VectorXd column(int node, double scale) const {
        if (node < 0 || node >= g_->n())
            throw Error(ErrorClass::InvalidInput, "node index out of range");
        if (dense_) {
            Eigen::VectorXd damped =
                (-scale * eig_->values.array()).exp().matrix().cwiseProduct(
                    eig_->vectors.row(node).transpose());
            return eig_->vectors * damped;
        }
        return apply_filter(*g_, filter(scale), node, opts_.apply);
    }

    // Chebyshev-only column into a reusable workspace; see apply_filter_into.
    void column_into(int node, double scale, FilterWorkspace& ws) const {
        if (node < 0 || node >= g_->n())
            throw Error(ErrorClass::InvalidInput, "node index out of range");
        if (dense_)
            throw Error(ErrorClass::InvalidInput, "workspace columns need chebyshev mode");
        apply_filter_into(*g_, filter(scale), node, opts_.apply, ws);
    }

    Eigen::MatrixXd matrix(double scale) const {
        if (dense_) return dense_heat_operator(*eig_, scale);
        Eigen::MatrixXd m(g_->n(), g_->n());
        for (int a = 0; a < g_->n(); ++a) m.col(a) = column(a, scale);
        return m;
    }

private:
    const Graph* g_;
    WaveletOptions opts_;
    SpectrumInfo spec_;
    bool dense_ = false;
    std::optional<DenseEigen> eig_;
    std::map<double, ChebyshevFilter> filters_;
    std::vector<double> prepared_;
};

inline std::vector<WaveletMatrix> heat_wavelets(const Graph& g, const std::vector<double>& scales,
                                                const WaveletOptions& opts = {}) {
    WaveletEngine engine(g, opts);
    engine.prepare_scales(scales);
    std::vector<WaveletMatrix> out;
    out.reserve(scales.size());
    for (double s : scales) out.push_back({s, engine.matrix(s)});
    return out;
}

// Distance of the diagonal coefficient from its diffusion limit 1/n. Stays
// nonnegative because the constant eigenvector contributes exactly 1/n.
inline double delta_a(const Eigen::VectorXd& column, int node) {
    const int n = static_cast<int>(column.size());
    if (node < 0 || node >= n) throw Error(ErrorClass::InvalidInput, "node index out of range");
    return std::abs(column[node] - 1.0 / n);
}

// Empirical variance of the off-diagonal coefficients of one column.
inline double offdiag_variance(const Eigen::VectorXd& column, int node) {
    const int n = static_cast<int>(column.size());
    if (n < 2) throw Error(ErrorClass::InvalidInput, "variance needs at least two nodes");
    if (node < 0 || node >= n) throw Error(ErrorClass::InvalidInput, "node index out of range");
    double mean = 0.0;
    for (int m = 0; m < n; ++m)
        if (m != node) mean += column[m];
    mean /= (n - 1);
    double var = 0.0;
    for (int m = 0; m < n; ++m)
        if (m != node) var += (column[m] - mean) * (column[m] - mean);
    return var / (n - 1);
}

// Closed form for the same variance from diagonal decay at scales 0, s, 2s:
//   n/(n-1)^2 * (delta0 * delta_2s - delta_s^2)
inline double offdiag_variance_identity(double delta0, double delta_s, double delta_2s, int n) {
    if (n < 2) throw Error(ErrorClass::InvalidInput, "variance needs at least two nodes");
    const double nm1 = static_cast<double>(n) - 1.0;
    return static_cast<double>(n) / (nm1 * nm1) * (delta0 * delta_2s - delta_s * delta_s);
}

struct BoundsCheck {
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0;
    bool ok = false;
};

// Two-sided spectral envelope for the diagonal decay at scale s:
//   exp(-lambda_max s) * delta0 <= delta_s <= exp(-lambda2 s) * delta0
inline BoundsCheck convergence_bounds_check(double delta0, double delta_s, double lambda2,
                                            double lambda_max, double s, double slack = 1e-12) {
    BoundsCheck c;
    c.lower = std::exp(-lambda_max * s) * delta0;
    c.upper = std::exp(-lambda2 * s) * delta0;
    c.value = delta_s;
    c.ok = delta_s >= c.lower - slack && delta_s <= c.upper + slack;
    return c;
}

// Debug dump: one row per stored coefficient, exact zeros skipped.
inline void write_wavelet_csv(std::ostream& out, const WaveletMatrix& w) {
    out << "node,m,coefficient\n";
    const int n = static_cast<int>(w.values.rows());
    for (int a = 0; a < n; ++a)
        for (int m = 0; m < n; ++m)
            if (w.values(m, a) != 0.0)
                out << a << ',' << m << ',' << format_double(w.values(m, a)) << '\n';
}

} // namespace gravelet

#pragma once

#include <Eigen/Dense>

#include <bsns/grid.hpp>
#include <bsns/specfun.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace bsns {

// Discrete modified Hankel transform of order (a-1)/2 on a collocation grid.
// The raw kernel matrix is nearly orthogonal; its orthogonal polar factor is
// used so that the discrete transform is exactly self-inverse and isometric.
class HankelTransform {
public:
    explicit HankelTransform(const WeightedRadialGrid& g) : grid_(g)
    {
        if (g.scheme != RadialScheme::bessel_collocation)
            throw grid_mismatch("hankel transform needs a bessel_collocation grid");
        const int n = (int)g.size();
        const double a = g.a, nu = g.nu(), beta = 0.5 * (a + 1.0);
        s_ = g.jlast / (g.Zmax * g.Zmax);
        kappa_.resize(n);
        sw_.resize(n);
        swk_.resize(n);
        for (int k = 0; k < n; ++k) {
            kappa_[k] = s_ * g.z[k];
            sw_[k] = std::sqrt(g.w[k]);
            swk_[k] = std::sqrt(std::pow(s_, a + 1.0) * g.w[k]);
        }
        Eigen::MatrixXd A(n, n);
        for (int m = 0; m < n; ++m)
            for (int k = 0; k <= m; ++k) {
                double v = std::pow(s_, beta) * sw_[m] * sw_[k] * specfun::bessel_j_scaled(nu, s_ * g.z[m] * g.z[k]);
                A(m, k) = v;
                A(k, m) = v;
            }
        raw_defect_ = (A * A - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
        // Newton-Schulz for the polar factor; A is symmetric and close to an involution.
        // (Eigenvectors from a symmetric eigensolver are unreliable inside the two
        // large +-1 clusters once n is in the hundreds.)
        Q_ = A;
        for (int it = 0; it < 8; ++it) {
            Eigen::MatrixXd E = Q_ * Q_ - Eigen::MatrixXd::Identity(n, n);
            double e = E.cwiseAbs().maxCoeff();
            if (e > 0.5)
                throw numerical_failure("hankel transform: kernel matrix far from orthogonal");
            Q_ -= 0.5 * Q_ * E;
            Q_ = 0.5 * (Q_ + Q_.transpose()).eval();
            if (e < 1e-15)
                break;
        }
        j0_ = specfun::bessel_j_scaled(nu, 0.0);
    }

    const WeightedRadialGrid& grid() const { return grid_; }
    const std::vector<double>& frequencies() const { return kappa_; }
    double scale() const { return s_; }
    double raw_defect() const { return raw_defect_; }
    const Eigen::MatrixXd& core() const { return Q_; }
    size_t size() const { return kappa_.size(); }

    // quadrature weight of frequency node m for kappa^a dkappa
    double freq_weight(size_t m) const { return swk_[m] * swk_[m]; }

    // rows x Nz block (rows fastest); z -> kappa
    void forward(cplx* data, size_t rows) const { apply(data, rows, sw_, swk_); }
    // kappa -> z
    void inverse(cplx* data, size_t rows) const { apply(data, rows, swk_, sw_); }

    // spectral coefficients -> value at arbitrary z >= 0
    void synthesis_row(double z, std::vector<double>& row) const
    {
        const double nu = grid_.nu();
        row.resize(size());
        for (size_t m = 0; m < size(); ++m)
            row[m] = freq_weight(m) * (z == 0.0 ? j0_ : specfun::bessel_j_scaled(nu, z * kappa_[m]));
    }

private:
    void apply(cplx* data, size_t rows, const std::vector<double>& pre, const std::vector<double>& post) const
    {
        const size_t n = size();
        Eigen::Map<Eigen::MatrixXd> R(reinterpret_cast<double*>(data), 2 * rows, n);
        for (size_t k = 0; k < n; ++k)
            R.col(k) *= pre[k];
        Eigen::MatrixXd tmp = R * Q_;
        for (size_t k = 0; k < n; ++k)
            R.col(k) = tmp.col(k) / post[k];
    }

    WeightedRadialGrid grid_;
    double s_ = 1.0, raw_defect_ = 0.0, j0_ = 1.0;
    std::vector<double> kappa_, sw_, swk_;
    Eigen::MatrixXd Q_;
};

inline std::shared_ptr<const HankelTransform> hankel_for(const WeightedRadialGrid& g)
{
    static std::mutex m;
    static std::map<std::tuple<double, double, size_t, int>, std::shared_ptr<const HankelTransform>> cache;
    auto key = std::make_tuple(g.a, g.Zmax, g.size(), (int)g.scheme);
    {
        std::lock_guard<std::mutex> lk(m);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    auto h = std::make_shared<const HankelTransform>(g);
    std::lock_guard<std::mutex> lk(m);
    if (cache.size() > 32)
        cache.clear();
    return cache.emplace(key, h).first->second;
}

} // namespace bsns

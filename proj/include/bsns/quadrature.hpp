#pragma once

#include <Eigen/Dense>

#include <bsns/specfun.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bsns::quad {

struct Rule {
    std::vector<double> x, w;
};

// Gauss-Legendre on [-1,1] by Newton on P_n
inline Rule gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n >= 1");
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(specfun::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16)
                break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n == 1) {
        r.x[0] = 0.0;
        r.w[0] = 2.0;
    }
    return r;
}

// cached Gauss-Legendre rules, safe to share across threads
inline const Rule& legendre_cached(int n)
{
    static std::mutex m;
    static std::map<int, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lk(m);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<Rule>(gauss_legendre(n))).first;
    return *it->second;
}

// weight (1-x)^alpha (1+x)^beta on [-1,1], Golub-Welsch
inline Rule gauss_jacobi(int n, double alpha, double beta)
{
    if (n < 1 || !(alpha > -1.0) || !(beta > -1.0))
        throw std::invalid_argument("gauss_jacobi: bad parameters");
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        double s = 2.0 * k + ab;
        if (k == 0)
            diag(0) = (beta - alpha) / (ab + 2.0);
        else
            diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double s = 2.0 * k + ab;
        double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
        double den = s * s * (s + 1.0) * (s - 1.0);
        sub(k - 1) = std::sqrt(num / den);
    }
    double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                          std::lgamma(ab + 2.0));
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    if (n == 1) {
        r.x[0] = diag(0);
        r.w[0] = mu0;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int k = 0; k < n; ++k) {
        r.x[k] = es.eigenvalues()(k);
        double v0 = es.eigenvectors()(0, k);
        r.w[k] = mu0 * v0 * v0;
    }
    return r;
}

// on [0,h] with weight s^{-beta}: nodes and weights
inline const Rule& jacobi_left_cached(int n, double beta)
{
    static std::mutex m;
    static std::map<std::pair<int, double>, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lk(m);
    auto key = std::make_pair(n, beta);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<Rule>(gauss_jacobi(n, 0.0, -beta))).first;
    return *it->second;
}

} // namespace bsns::quad

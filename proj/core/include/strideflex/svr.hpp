#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace strideflex {

struct SvrParams {
    double epsilon = 0.1;   ///< half-width of the insensitive tube
    double c = 1.0;         ///< box constraint on the dual coefficients
    double bandwidth = 1.0; ///< RBF length scale: k(a,b) = exp(-(a-b)^2 / (2 bandwidth^2))
    double tolerance = 1e-8;      ///< relative KKT residual and duality gap at convergence
    std::size_t max_iterations = 200;
};

/// Epsilon-insensitive support vector regression on a scalar input with a
/// Gaussian kernel. The dual is solved by a predictor-corrector interior
/// point method on the banded Gram matrix of the sorted inputs.
class SvrModel {
public:
    static SvrModel fit(std::span<const double> x, std::span<const double> y, const SvrParams& params);

    double operator()(double x) const;

    std::size_t support_count() const { return support_x_.size(); }
    std::size_t iterations() const { return iterations_; }
    /// True when the residuals fell below the tolerance before max_iterations.
    bool converged() const { return converged_; }

private:
    std::vector<double> support_x_;
    std::vector<double> coef_;
    double bias_ = 0.0;
    double inv_two_bw2_ = 0.5;
    std::size_t iterations_ = 0;
    bool converged_ = true;
};

} // namespace strideflex

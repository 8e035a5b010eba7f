#include "strideflex/svr.hpp"

#include "strideflex/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace strideflex {
namespace {

// Kernel values below this are dropped, which makes the Gram matrix of
// sorted inputs banded.
constexpr double kKernelFloor = 1e-17;
constexpr double kStepBack = 0.995;

// Symmetric positive definite matrix stored as its lower band: row a keeps
// columns a - width + 1 .. a.
class BandMatrix {
public:
    BandMatrix(std::size_t n, std::size_t width) : n_(n), w_(width), v_(n * width, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t width() const { return w_; }
    double& at(std::size_t a, std::size_t b) { return v_[a * w_ + (w_ - 1) - (a - b)]; }
    double at(std::size_t a, std::size_t b) const { return v_[a * w_ + (w_ - 1) - (a - b)]; }
    std::size_t first(std::size_t a) const { return a + 1 >= w_ ? a + 1 - w_ : 0; }

    // In-place Cholesky; false when a pivot is not positive.
    bool factor() {
        for (std::size_t a = 0; a < n_; ++a) {
            const std::size_t lo = first(a);
            for (std::size_t b = lo; b <= a; ++b) {
                double s = at(a, b);
                for (std::size_t k = std::max(lo, first(b)); k < b; ++k) {
                    s -= at(a, k) * at(b, k);
                }
                if (b == a) {
                    if (!(s > 0.0)) {
                        return false;
                    }
                    at(a, a) = std::sqrt(s);
                } else {
                    at(a, b) = s / at(b, b);
                }
            }
        }
        return true;
    }

    void solve(std::vector<double>& x) const {
        for (std::size_t a = 0; a < n_; ++a) {
            double s = x[a];
            for (std::size_t k = first(a); k < a; ++k) {
                s -= at(a, k) * x[k];
            }
            x[a] = s / at(a, a);
        }
        for (std::size_t a = n_; a-- > 0;) {
            x[a] /= at(a, a);
            const double xa = x[a];
            for (std::size_t k = first(a); k < a; ++k) {
                x[k] -= at(a, k) * xa;
            }
        }
    }

private:
    std::size_t n_, w_;
    std::vector<double> v_;
};

// Dual of epsilon-SVR written over u, v in [0, C]^n with beta = u - v:
//   min 1/2 beta'K beta + eps 1'(u + v) - y'beta   s.t.  1'beta = 0.
// Solved by a Mehrotra predictor-corrector interior point method. The
// Newton system reduces to (K + E) d_beta = rhs with E diagonal, and K is
// banded for sorted inputs, so each step costs O(n w^2).
class InteriorPoint {
public:
    InteriorPoint(std::span<const double> x, std::span<const double> y, const SvrParams& p)
        : x_(x), y_(y), n_(x.size()), c_(p.c), eps_(p.epsilon), inv_two_bw2_(0.5 / (p.bandwidth * p.bandwidth)) {
        const double reach = p.bandwidth * std::sqrt(-2.0 * std::log(kKernelFloor));
        lo_.resize(n_);
        w_ = 1;
        for (std::size_t a = 0; a < n_; ++a) {
            lo_[a] = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), x[a] - reach) - x.begin());
            w_ = std::max(w_, a - lo_[a] + 1);
        }
        gram_.assign(n_ * w_, 0.0);
        for (std::size_t a = 0; a < n_; ++a) {
            for (std::size_t b = lo_[a]; b <= a; ++b) {
                gram_[a * w_ + (w_ - 1) - (a - b)] = kernel(a, b);
            }
        }
    }

    std::size_t run(double tolerance, std::size_t max_iterations, bool& converged) {
        const std::size_t m = 2 * n_;
        // Start in the middle of the box with unit-scale multipliers.
        const double y_scale = std::max(1.0, max_abs(y_) + eps_);
        u_.assign(n_, 0.5 * c_);
        v_.assign(n_, 0.5 * c_);
        zu_.assign(n_, y_scale);
        zv_.assign(n_, y_scale);
        hu_.assign(n_, y_scale);
        hv_.assign(n_, y_scale);
        lambda_ = 0.0;

        std::vector<double> beta(n_), kb(n_), rdu(n_), rdv(n_);
        std::vector<double> du(n_), dv(n_), dzu(n_), dzv(n_), dhu(n_), dhv(n_);
        std::vector<double> au(n_), av(n_), azu(n_), azv(n_), ahu(n_), ahv(n_);
        std::vector<double> d1(n_), d2(n_);

        converged = false;
        std::size_t iter = 0;
        for (; iter < max_iterations; ++iter) {
            for (std::size_t a = 0; a < n_; ++a) {
                beta[a] = u_[a] - v_[a];
            }
            multiply(beta, kb);
            double rp = 0.0, rd_max = 0.0, gap = 0.0;
            for (std::size_t a = 0; a < n_; ++a) {
                rp += beta[a];
                rdu[a] = kb[a] + eps_ - y_[a] - lambda_ - zu_[a] + hu_[a];
                rdv[a] = -kb[a] + eps_ + y_[a] + lambda_ - zv_[a] + hv_[a];
                rd_max = std::max({rd_max, std::abs(rdu[a]), std::abs(rdv[a])});
                gap += u_[a] * zu_[a] + v_[a] * zv_[a] + (c_ - u_[a]) * hu_[a] + (c_ - v_[a]) * hv_[a];
            }
            const double mu = gap / static_cast<double>(2 * m);
            if (rd_max <= tolerance * y_scale && std::abs(rp) <= tolerance * c_ &&
                gap <= tolerance * y_scale * c_) {
                converged = true;
                break;
            }

            for (std::size_t a = 0; a < n_; ++a) {
                d1[a] = zu_[a] / u_[a] + hu_[a] / (c_ - u_[a]);
                d2[a] = zv_[a] / v_[a] + hv_[a] / (c_ - v_[a]);
            }
            if (!factor(d1, d2)) {
                break;
            }

            // Predictor: aim at zero complementarity.
            step(rdu, rdv, rp, 0.0, nullptr, au, av, azu, azv, ahu, ahv, d1, d2);
            const double alpha_aff = step_length(au, av, azu, azv, ahu, ahv);
            double gap_aff = 0.0;
            for (std::size_t a = 0; a < n_; ++a) {
                gap_aff += (u_[a] + alpha_aff * au[a]) * (zu_[a] + alpha_aff * azu[a]) +
                           (v_[a] + alpha_aff * av[a]) * (zv_[a] + alpha_aff * azv[a]) +
                           (c_ - u_[a] - alpha_aff * au[a]) * (hu_[a] + alpha_aff * ahu[a]) +
                           (c_ - v_[a] - alpha_aff * av[a]) * (hv_[a] + alpha_aff * ahv[a]);
            }
            const double sigma = std::pow(gap_aff / gap, 3.0);

            // Corrector with the second order terms of the predictor.
            const Affine aff{au, av, azu, azv, ahu, ahv};
            step(rdu, rdv, rp, sigma * mu, &aff, du, dv, dzu, dzv, dhu, dhv, d1, d2);
            const double alpha = std::min(1.0, kStepBack * step_length(du, dv, dzu, dzv, dhu, dhv));
            for (std::size_t a = 0; a < n_; ++a) {
                u_[a] += alpha * du[a];
                v_[a] += alpha * dv[a];
                zu_[a] += alpha * dzu[a];
                zv_[a] += alpha * dzv[a];
                hu_[a] += alpha * dhu[a];
                hv_[a] += alpha * dhv[a];
            }
            lambda_ += alpha * dlambda_;
        }
        return iter;
    }

    // beta with variables that ended on a bound set exactly onto it.
    std::vector<double> coefficients() const {
        std::vector<double> beta(n_);
        for (std::size_t a = 0; a < n_; ++a) {
            beta[a] = snap(u_[a], zu_[a], hu_[a]) - snap(v_[a], zv_[a], hv_[a]);
        }
        return beta;
    }

    double bias() const { return -lambda_; }

private:
    struct Affine {
        const std::vector<double>& du;
        const std::vector<double>& dv;
        const std::vector<double>& dzu;
        const std::vector<double>& dzv;
        const std::vector<double>& dhu;
        const std::vector<double>& dhv;
    };

    static double max_abs(std::span<const double> v) {
        double m = 0.0;
        for (double x : v) {
            m = std::max(m, std::abs(x));
        }
        return m;
    }

    double snap(double z, double lower_mult, double upper_mult) const {
        if (z < lower_mult) {
            return 0.0;
        }
        if (c_ - z < upper_mult) {
            return c_;
        }
        return z;
    }

    double kernel(std::size_t a, std::size_t b) const {
        const double d = x_[a] - x_[b];
        return std::exp(-d * d * inv_two_bw2_);
    }

    double gram(std::size_t a, std::size_t b) const { return gram_[a * w_ + (w_ - 1) - (a - b)]; }

    void multiply(const std::vector<double>& in, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t a = 0; a < n_; ++a) {
            out[a] += gram(a, a) * in[a];
            for (std::size_t b = lo_[a]; b < a; ++b) {
                const double k = gram(a, b);
                out[a] += k * in[b];
                out[b] += k * in[a];
            }
        }
    }

    bool factor(const std::vector<double>& d1, const std::vector<double>& d2) {
        // A tiny ridge keeps the numerically singular Gram matrix factorable.
        for (double ridge = 1e-12; ridge <= 1e-4; ridge *= 100.0) {
            chol_ = BandMatrix(n_, w_);
            for (std::size_t a = 0; a < n_; ++a) {
                for (std::size_t b = lo_[a]; b <= a; ++b) {
                    chol_.at(a, b) = gram(a, b);
                }
                chol_.at(a, a) += d1[a] * d2[a] / (d1[a] + d2[a]) + ridge;
            }
            if (chol_.factor()) {
                ones_.assign(n_, 1.0);
                chol_.solve(ones_);
                ones_sum_ = std::accumulate(ones_.begin(), ones_.end(), 0.0);
                return true;
            }
        }
        return false;
    }

    // Newton direction for complementarity target `target`; `aff` adds the
    // Mehrotra correction.
    void step(const std::vector<double>& rdu, const std::vector<double>& rdv, double rp, double target,
              const Affine* aff, std::vector<double>& du, std::vector<double>& dv, std::vector<double>& dzu,
              std::vector<double>& dzv, std::vector<double>& dhu, std::vector<double>& dhv,
              const std::vector<double>& d1, const std::vector<double>& d2) {
        std::vector<double> rzu(n_), rzv(n_), rhu(n_), rhv(n_), g(n_), q(n_);
        for (std::size_t a = 0; a < n_; ++a) {
            const double wu = c_ - u_[a], wv = c_ - v_[a];
            rzu[a] = target - u_[a] * zu_[a];
            rzv[a] = target - v_[a] * zv_[a];
            rhu[a] = target - wu * hu_[a];
            rhv[a] = target - wv * hv_[a];
            if (aff != nullptr) {
                rzu[a] -= aff->du[a] * aff->dzu[a];
                rzv[a] -= aff->dv[a] * aff->dzv[a];
                rhu[a] += aff->du[a] * aff->dhu[a];
                rhv[a] += aff->dv[a] * aff->dhv[a];
            }
            const double h1 = -rdu[a] + rzu[a] / u_[a] - rhu[a] / wu;
            const double h2 = -rdv[a] + rzv[a] / v_[a] - rhv[a] / wv;
            g[a] = h1 + h2;
            q[a] = h1 - d1[a] * g[a] / (d1[a] + d2[a]);
        }
        chol_.solve(q);
        const double q_sum = std::accumulate(q.begin(), q.end(), 0.0);
        dlambda_ = (-rp - q_sum) / ones_sum_;
        for (std::size_t a = 0; a < n_; ++a) {
            const double db = q[a] + dlambda_ * ones_[a];
            du[a] = (d2[a] * db + g[a]) / (d1[a] + d2[a]);
            dv[a] = du[a] - db;
            dzu[a] = (rzu[a] - zu_[a] * du[a]) / u_[a];
            dzv[a] = (rzv[a] - zv_[a] * dv[a]) / v_[a];
            dhu[a] = (rhu[a] + hu_[a] * du[a]) / (c_ - u_[a]);
            dhv[a] = (rhv[a] + hv_[a] * dv[a]) / (c_ - v_[a]);
        }
    }

    double step_length(const std::vector<double>& du, const std::vector<double>& dv, const std::vector<double>& dzu,
                       const std::vector<double>& dzv, const std::vector<double>& dhu,
                       const std::vector<double>& dhv) const {
        double alpha = 1.0;
        auto limit = [&](double value, double delta) {
            if (delta < 0.0) {
                alpha = std::min(alpha, -value / delta);
            }
        };
        for (std::size_t a = 0; a < n_; ++a) {
            limit(u_[a], du[a]);
            limit(v_[a], dv[a]);
            limit(c_ - u_[a], -du[a]);
            limit(c_ - v_[a], -dv[a]);
            limit(zu_[a], dzu[a]);
            limit(zv_[a], dzv[a]);
            limit(hu_[a], dhu[a]);
            limit(hv_[a], dhv[a]);
        }
        return alpha;
    }

    std::span<const double> x_;
    std::span<const double> y_;
    std::size_t n_;
    double c_;
    double eps_;
    double inv_two_bw2_;
    std::vector<std::size_t> lo_;
    std::size_t w_ = 1;
    std::vector<double> gram_;
    BandMatrix chol_{0, 1};
    std::vector<double> ones_;
    double ones_sum_ = 0.0;

    std::vector<double> u_, v_, zu_, zv_, hu_, hv_;
    double lambda_ = 0.0;
    double dlambda_ = 0.0;
};

} // namespace

SvrModel SvrModel::fit(std::span<const double> x, std::span<const double> y, const SvrParams& params) {
    if (x.size() != y.size()) {
        throw ValidationError("svr: x and y sizes differ");
    }
    if (x.empty()) {
        throw ValidationError("svr: no training samples");
    }
    if (!(params.epsilon >= 0.0) || !(params.c > 0.0) || !(params.bandwidth > 0.0)) {
        throw ValidationError("svr: epsilon must be >= 0, c and bandwidth > 0");
    }
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> xs(x.size()), ys(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }

    InteriorPoint solver(xs, ys, params);
    SvrModel model;
    model.iterations_ = solver.run(params.tolerance, params.max_iterations, model.converged_);
    model.inv_two_bw2_ = 0.5 / (params.bandwidth * params.bandwidth);
    model.bias_ = solver.bias();
    const std::vector<double> coef = solver.coefficients();
    for (std::size_t t = 0; t < coef.size(); ++t) {
        if (coef[t] != 0.0) {
            model.support_x_.push_back(xs[t]);
            model.coef_.push_back(coef[t]);
        }
    }
    return model;
}

double SvrModel::operator()(double x) const {
    double f = bias_;
    for (std::size_t s = 0; s < support_x_.size(); ++s) {
        const double d = x - support_x_[s];
        f += coef_[s] * std::exp(-d * d * inv_two_bw2_);
    }
    return f;
}

} // namespace strideflex

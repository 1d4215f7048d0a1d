#include "pclust/optimize.hpp"

#include "pclust/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pclust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BudgetExhausted {};

// Counts evaluations, maps non-finite values to +inf and remembers the best point.
class CountedObjective {
public:
    CountedObjective(const Objective& f, std::size_t max_evals) : f_(f), max_evals_(max_evals) {}

    double operator()(const std::vector<double>& x) {
        if (evals_ >= max_evals_) throw BudgetExhausted{};
        ++evals_;
        double value = kInf;
        try {
            value = f_(x);
        } catch (const std::exception&) {
            value = kInf;
        }
        if (!std::isfinite(value)) value = kInf;
        if (value < best_f_ || best_x_.empty()) {
            best_f_ = value;
            best_x_ = x;
        }
        return value;
    }

    [[nodiscard]] std::size_t evals() const { return evals_; }
    [[nodiscard]] double best_f() const { return best_f_; }
    [[nodiscard]] const std::vector<double>& best_x() const { return best_x_; }

private:
    const Objective& f_;
    std::size_t max_evals_;
    std::size_t evals_ = 0;
    double best_f_ = kInf;
    std::vector<double> best_x_;
};

bool small_relative_change(double before, double after, double tol) {
    if (!std::isfinite(before)) return false;
    return before - after <= tol * std::max(std::abs(after), std::numeric_limits<double>::min());
}

// Principal-axis search state, following Brent (1973), chapter 7.
class Praxis {
public:
    Praxis(CountedObjective& f, std::vector<double> x0, const OptimOptions& opt)
        : f_(f), n_(x0.size()), x_(Eigen::Map<Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(n_))),
          opt_(opt), rng_(opt.seed) {}

    bool run();

    [[nodiscard]] const Eigen::VectorXd& x() const { return x_; }

private:
    double eval(const Eigen::VectorXd& point) {
        return f_(std::vector<double>(point.data(), point.data() + point.size()));
    }
    double flin(int j, double step);
    void line_min(int j, int nits, double& d2, double& x1, double& f1, bool f1_known);
    void quad();

    CountedObjective& f_;
    std::size_t n_;
    Eigen::VectorXd x_;
    OptimOptions opt_;
    Rng rng_;

    double machep_ = std::numeric_limits<double>::epsilon();
    double small_ = machep_ * machep_;
    double vsmall_ = small_ * small_;
    double large_ = 1.0 / small_;
    double vlarge_ = 1.0 / vsmall_;
    double m2_ = std::sqrt(machep_);
    double m4_ = std::sqrt(m2_);

    Eigen::MatrixXd v_;
    Eigen::VectorXd d_;
    Eigen::VectorXd q0_, q1_;
    double qa_ = 0.0, qb_ = 0.0, qc_ = 0.0, qd0_ = 0.0, qd1_ = 0.0, qf1_ = 0.0;
    double fx_ = 0.0;
    double t_ = 0.0;
    double h_ = 0.0;
    double ldt_ = 0.0;
    double dmin_ = 0.0;
    std::size_t nl_ = 0;
};

// Objective along direction j, or along the quadratic through q0, x, q1 when j < 0.
double Praxis::flin(int j, double step) {
    Eigen::VectorXd point(n_);
    if (j >= 0) {
        point = x_ + step * v_.col(j);
    } else {
        qa_ = step * (step - qd1_) / (qd0_ * (qd0_ + qd1_));
        qb_ = (step + qd0_) * (qd1_ - step) / (qd0_ * qd1_);
        qc_ = step * (step + qd0_) / (qd1_ * (qd0_ + qd1_));
        point = qa_ * q0_ + qb_ * x_ + qc_ * q1_;
    }
    return eval(point);
}

void Praxis::line_min(int j, int nits, double& d2, double& x1, double& f1, bool f1_known) {
    const double sf1 = f1;
    const double sx1 = x1;
    int k = 0;
    double xm = 0.0;
    const double f0 = fx_;
    double fm = fx_;
    bool dz = d2 < machep_;

    const double xnorm = x_.norm();
    const double curvature = dz ? dmin_ : d2;
    double t2 = m4_ * std::sqrt(std::abs(fx_) / curvature + xnorm * ldt_) + m2_ * ldt_;
    const double s = m4_ * xnorm + t_;
    if (dz && t2 > s) t2 = s;
    t2 = std::clamp(t2, small_, 0.01 * h_);

    if (f1_known && f1 <= fm) {
        xm = x1;
        fm = f1;
    }
    if (!f1_known || std::abs(x1) < t2) {
        x1 = x1 >= 0.0 ? t2 : -t2;
        f1 = flin(j, x1);
    }
    if (f1 <= fm) {
        xm = x1;
        fm = f1;
    }

    double x2 = 0.0;
    double f2 = 0.0;
    for (;;) {
        if (dz) {
            x2 = f0 < f1 ? -x1 : 2.0 * x1;
            f2 = flin(j, x2);
            if (f2 <= fm) {
                xm = x2;
                fm = f2;
            }
            d2 = (x2 * (f1 - f0) - x1 * (f2 - f0)) / (x1 * x2 * (x1 - x2));
            if (!std::isfinite(d2)) d2 = small_;
        }
        const double d1 = (f1 - f0) / x1 - x1 * d2;
        dz = true;
        if (!std::isfinite(d1)) {
            x2 = -0.5 * x1;
        } else if (d2 <= small_) {
            x2 = d1 < 0.0 ? h_ : -h_;
        } else {
            x2 = -0.5 * d1 / d2;
        }
        if (std::abs(x2) > h_) x2 = x2 > 0.0 ? h_ : -h_;

        bool accepted = true;
        for (;;) {
            f2 = flin(j, x2);
            if (k >= nits || f2 <= f0) break;
            ++k;
            if (f0 < f1 && x1 * x2 > 0.0) {
                accepted = false;
                break;
            }
            x2 *= 0.5;
        }
        if (accepted) break;
    }

    ++nl_;
    if (f2 > fm) {
        x2 = xm;
    } else {
        fm = f2;
    }
    if (std::abs(x2 * (x2 - x1)) > small_) {
        d2 = (x2 * (f1 - f0) - x1 * (fm - f0)) / (x1 * x2 * (x1 - x2));
    } else if (k > 0) {
        d2 = 0.0;
    }
    if (!std::isfinite(d2)) d2 = small_;
    d2 = std::max(d2, small_);
    x1 = x2;
    fx_ = fm;
    if (sf1 < fx_) {
        fx_ = sf1;
        x1 = sx1;
    }
    if (j >= 0) x_ += x1 * v_.col(j);
}

void Praxis::quad() {
    double s = fx_;
    fx_ = qf1_;
    qf1_ = s;
    std::swap(x_, q1_);
    qd1_ = (x_ - q1_).norm();
    double step = qd1_;
    s = 0.0;
    if (qd0_ <= 0.0 || qd1_ <= 0.0 || nl_ < 3 * n_ * n_) {
        fx_ = qf1_;
        qa_ = 0.0;
        qb_ = 0.0;
        qc_ = 1.0;
    } else {
        double value = qf1_;
        line_min(-1, 2, s, step, value, true);
        qa_ = step * (step - qd1_) / (qd0_ * (qd0_ + qd1_));
        qb_ = (step + qd0_) * (qd1_ - step) / (qd0_ * qd1_);
        qc_ = step * (step + qd0_) / (qd1_ * (qd0_ + qd1_));
    }
    qd0_ = qd1_;
    const Eigen::VectorXd previous = q0_;
    q0_ = x_;
    x_ = qa_ * previous + qb_ * x_ + qc_ * q1_;
}

bool Praxis::run() {
    const auto n = static_cast<Eigen::Index>(n_);
    const bool start_illc = false;
    bool illc = start_illc;
    const double ldfac = illc ? 0.1 : 0.01;
    int kt = 0;
    fx_ = eval(x_);
    qf1_ = fx_;
    t_ = small_ + std::abs(opt_.tolerance);
    double t2 = t_;
    dmin_ = small_;
    h_ = std::max(opt_.max_step, 100.0 * t_);
    ldt_ = h_;
    v_ = Eigen::MatrixXd::Identity(n, n);
    d_ = Eigen::VectorXd::Zero(n);
    q0_ = x_;
    q1_ = x_;

    if (n_ == 1) {
        double d0 = 0.0;
        for (;;) {
            const double before = fx_;
            double s = 0.0;
            double value = fx_;
            line_min(0, 2, d0, s, value, false);
            if (std::abs(s) <= t_ + m2_ * std::abs(x_(0)) ||
                small_relative_change(before, fx_, opt_.rel_objective_tol)) {
                return true;
            }
        }
    }

    for (;;) {
        const double sweep_start = fx_;
        double sf = d_(0);
        d_(0) = 0.0;
        double s = 0.0;
        double value = fx_;
        line_min(0, 2, d_(0), s, value, false);
        if (s <= 0.0) v_.col(0) = -v_.col(0);
        if (sf <= 0.9 * d_(0) || 0.9 * sf >= d_(0)) d_.tail(n - 1).setZero();

        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        for (Eigen::Index k = 1; k < n; ++k) {
            Eigen::VectorXd y = x_;
            sf = fx_;
            if (kt > 0) illc = true;
            Eigen::Index kl = k;
            for (;;) {
                kl = k;
                double df = 0.0;
                if (illc) {
                    // Random step to escape a poorly conditioned valley.
                    for (Eigen::Index i = 0; i < n; ++i) {
                        z(i) = (0.1 * ldt_ + t2 * std::pow(10.0, kt)) * (rng_.uniform() - 0.5);
                        x_ += z(i) * v_.col(i);
                    }
                    fx_ = eval(x_);
                }
                for (Eigen::Index k2 = k; k2 < n; ++k2) {
                    const double sl = fx_;
                    s = 0.0;
                    value = fx_;
                    line_min(static_cast<int>(k2), 2, d_(k2), s, value, false);
                    const double gain = illc ? d_(k2) * (s + z(k2)) * (s + z(k2)) : sl - fx_;
                    if (df <= gain) {
                        df = gain;
                        kl = k2;
                    }
                }
                if (illc || df >= std::abs(100.0 * machep_ * fx_)) break;
                illc = true;
            }
            for (Eigen::Index k2 = 0; k2 < k; ++k2) {
                s = 0.0;
                value = fx_;
                line_min(static_cast<int>(k2), 2, d_(k2), s, value, false);
            }
            double f1 = fx_;
            fx_ = sf;
            const Eigen::VectorXd displacement = x_ - y;
            x_ = y;
            double lds = displacement.norm();
            if (lds > small_) {
                for (Eigen::Index j = kl; j >= k; --j) {
                    v_.col(j) = v_.col(j - 1);
                    d_(j) = d_(j - 1);
                }
                d_(k - 1) = 0.0;
                v_.col(k - 1) = displacement / lds;
                line_min(static_cast<int>(k - 1), 4, d_(k - 1), lds, f1, true);
                if (lds <= 0.0) {
                    lds = -lds;
                    v_.col(k - 1) = -v_.col(k - 1);
                }
            }
            ldt_ = std::max(ldfac * ldt_, lds);
            t2 = m2_ * x_.norm() + t_;
            if (ldt_ > 0.5 * t2) kt = -1;
            ++kt;
            if (kt > opt_.extra_sweeps) return true;
        }

        quad();

        double dn = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d_(i) = 1.0 / std::sqrt(d_(i));
            dn = std::max(dn, d_(i));
        }
        for (Eigen::Index j = 0; j < n; ++j) v_.col(j) *= d_(j) / dn;

        // New principal axes: left singular vectors of the scaled direction matrix.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(v_, Eigen::ComputeFullU);
        const Eigen::VectorXd sigma = svd.singularValues();
        const Eigen::MatrixXd axes = svd.matrixU();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double scaled = dn * sigma(i);
            if (scaled > large_) {
                d_(i) = vsmall_;
            } else if (scaled < small_) {
                d_(i) = vlarge_;
            } else {
                d_(i) = 1.0 / (scaled * scaled);
            }
        }
        std::vector<Eigen::Index> order(n_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d_(a) > d_(b); });
        const Eigen::VectorXd d_sorted = d_;
        for (Eigen::Index i = 0; i < n; ++i) {
            d_(i) = d_sorted(order[static_cast<std::size_t>(i)]);
            v_.col(i) = axes.col(order[static_cast<std::size_t>(i)]);
        }
        dmin_ = std::max(d_(n - 1), small_);
        illc = m2_ * d_(0) > dmin_;

        if (small_relative_change(sweep_start, std::min(fx_, f_.best_f()), opt_.rel_objective_tol)) return true;
    }
}

} // namespace

OptimResult praxis(const Objective& f, std::vector<double> x0, const OptimOptions& options) {
    CountedObjective counted(f, options.max_evals);
    OptimResult result;
    result.method = "praxis";
    if (x0.empty()) throw std::invalid_argument("praxis needs at least one coordinate");
    Praxis search(counted, x0, options);
    try {
        result.converged = search.run();
    } catch (const BudgetExhausted&) {
        result.converged = false;
    }
    result.x = counted.best_x();
    result.fx = counted.best_f();
    result.evals = counted.evals();
    return result;
}

OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const OptimOptions& options) {
    CountedObjective counted(f, options.max_evals);
    OptimResult result;
    result.method = "nelder-mead";
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("nelder_mead needs at least one coordinate");

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    try {
        const double step = std::max(0.1 * options.max_step, 1e-4);
        for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
        for (std::size_t i = 0; i <= n; ++i) values[i] = counted(simplex[i]);

        std::vector<std::size_t> order(n + 1);
        auto blend = [&](const std::vector<double>& centroid, const std::vector<double>& from, double coef) {
            std::vector<double> out(n);
            for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (from[j] - centroid[j]);
            return out;
        };
        for (;;) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second = order[n - 1];

            double spread = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
                }
            }
            const double range = values[worst] - values[best];
            if (std::isfinite(range) &&
                range <= options.rel_objective_tol * std::max(std::abs(values[best]), 1e-300) &&
                spread <= std::max(options.tolerance, 1e-12) * 1e3) {
                result.converged = true;
                break;
            }
            if (spread <= options.tolerance * 1e-3) {
                result.converged = true;
                break;
            }

            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == worst) continue;
                for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
            }
            const auto reflected = blend(centroid, simplex[worst], -1.0);
            const double fr = counted(reflected);
            if (fr < values[best]) {
                const auto expanded = blend(centroid, simplex[worst], -2.0);
                const double fe = counted(expanded);
                if (fe < fr) {
                    simplex[worst] = expanded;
                    values[worst] = fe;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                }
                continue;
            }
            if (fr < values[second]) {
                simplex[worst] = reflected;
                values[worst] = fr;
                continue;
            }
            const bool outside = fr < values[worst];
            const auto contracted = blend(centroid, simplex[worst], outside ? -0.5 : 0.5);
            const double fc = counted(contracted);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = contracted;
                values[worst] = fc;
                continue;
            }
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == best) continue;
                simplex[i] = blend(simplex[best], simplex[i], 0.5);
                values[i] = counted(simplex[i]);
            }
        }
    } catch (const BudgetExhausted&) {
        result.converged = false;
    }
    result.x = counted.best_x();
    result.fx = counted.best_f();
    result.evals = counted.evals();
    return result;
}

} // namespace pclust

#include "tdrc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tdrc/rng.hpp"

namespace tdrc::stability {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat identity(const mdp::ExpectationModel& m) { return Mat::Identity(m.n(), m.n()); }

}  // namespace

StackedSystem build_G(const mdp::ExpectationModel& model, double eta, double beta) {
    const int n = model.n();
    StackedSystem s;
    s.G.resize(2 * n, 2 * n);
    s.G.topLeftCorner(n, n) = -eta * (model.C + beta * identity(model));
    s.G.topRightCorner(n, n) = -eta * model.A;
    s.G.bottomLeftCorner(n, n) = model.A.transpose() - model.C;
    s.G.bottomRightCorner(n, n) = -model.A;
    s.g.resize(2 * n);
    s.g.head(n) = eta * model.b;
    s.g.tail(n) = model.b;
    return s;
}

std::vector<std::complex<double>> spectrum(const Mat& m) {
    Eigen::EigenSolver<Mat> es(m, false);
    const auto& ev = es.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return out;
}

bool is_hurwitz(const std::vector<std::complex<double>>& eig, double tol) {
    return std::all_of(eig.begin(), eig.end(), [tol](auto z) { return z.real() < -tol; });
}

ReducedModel reduce_to_identifiable(const mdp::ExpectationModel& model, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(model.C);
    const Vec& ev = es.eigenvalues();
    double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > tol * top) keep.push_back(i);
    ReducedModel r;
    r.basis.resize(model.n(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) r.basis.col(k) = es.eigenvectors().col(keep[k]);
    const Mat& Q = r.basis;
    r.model = mdp::model_from_matrices(Q.transpose() * model.A * Q, Q.transpose() * model.b,
                                       Q.transpose() * model.C * Q, model.d_b);
    return r;
}

namespace {

Theorem1Bounds bounds_nonsingular(const mdp::ExpectationModel& m) {
    Theorem1Bounds out;
    out.dimension = m.n();
    Mat H = 0.5 * (m.A + m.A.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> hs(H, Eigen::EigenvaluesOnly);
    out.min_eig_H = hs.eigenvalues().minCoeff();
    out.A_positive_definite = out.min_eig_H > 1e-10;
    if (out.A_positive_definite) {
        out.beta_max = kInf;
        out.eta_min = 0.0;
        return out;
    }
    // Eigenvalues mu of H^{-1} A A^T via H z = nu (A A^T) z, mu = 1 / nu. The
    // binding constraint is beta * z^T H z + z^T A A^T z > 0 over z with
    // z^T H z < 0, so beta_max = -1 / nu_min.
    Mat AAt = m.A * m.A.transpose();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> gb(H, AAt, Eigen::EigenvaluesOnly);
    if (gb.info() != Eigen::Success)
        throw std::runtime_error("A A^T is not positive definite; A is singular on the analysed subspace");
    double nu_min = gb.eigenvalues().minCoeff();
    out.beta_max = nu_min < 0.0 ? -1.0 / nu_min : kInf;
    // eta_min = -lambda_min(C^{-1} H) via H z = lambda C z.
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ge(H, m.C, Eigen::EigenvaluesOnly);
    if (ge.info() != Eigen::Success) throw std::runtime_error("C is not positive definite");
    out.eta_min = std::max(0.0, -ge.eigenvalues().minCoeff());
    return out;
}

}  // namespace

Theorem1Bounds theorem1_bounds(const mdp::ExpectationModel& model) {
    if (!model.c_singular) return bounds_nonsingular(model);
    auto reduced = reduce_to_identifiable(model);
    Theorem1Bounds out = bounds_nonsingular(reduced.model);
    out.c_singular = true;
    return out;
}

bool inside_theorem1_region(const Theorem1Bounds& b, double eta, double beta) {
    if (eta < 0.0 || beta < 0.0) return false;
    if (b.A_positive_definite) return true;
    return beta < b.beta_max && eta > b.eta_min;
}

double fixed_point_residual(const Vec& w, const mdp::ExpectationModel& model, double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
    Vec r = model.b - model.A * w;
    Vec h;
    if (beta == 0.0 && model.c_singular) {
        h = model.c_whitener.transpose() * (model.c_whitener * r);
    } else {
        Mat Cb = model.C + beta * identity(model);
        Eigen::LDLT<Mat> ldlt(Cb);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw std::invalid_argument("C + beta I is not invertible");
        h = ldlt.solve(r);
    }
    return ((model.A + beta * identity(model)).transpose() * h).norm();
}

StabilityReport analyze(const mdp::ExpectationModel& model, double eta, double beta) {
    StabilityReport rep;
    rep.eta = eta;
    rep.beta = beta;
    rep.bounds = theorem1_bounds(model);

    rep.G_spectrum_full = spectrum(build_G(model, eta, beta).G);
    mdp::ExpectationModel analysed = model;
    if (model.c_singular) analysed = reduce_to_identifiable(model).model;
    rep.bounds.dimension = analysed.n();
    rep.G_spectrum = spectrum(build_G(analysed, eta, beta).G);
    rep.hurwitz = is_hurwitz(rep.G_spectrum);
    rep.max_real_part = rep.G_spectrum.empty() ? -kInf : rep.G_spectrum.front().real();

    Mat Ab = analysed.A + beta * identity(analysed);
    Eigen::FullPivLU<Mat> lu(Ab);
    lu.setThreshold(1e-12);
    rep.rank_A_beta = static_cast<int>(lu.rank());
    try {
        Vec w = mdp::td_fixed_point(analysed);
        rep.td_fixed_point_exists = true;
        rep.fixed_point_residual = fixed_point_residual(w, analysed, beta);
    } catch (const mdp::SingularSystemError&) {
        rep.td_fixed_point_exists = false;
        rep.fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

namespace {

struct ZQuantities {
    double b_a;
    double lambda_r;
    double lambda_c;
};

// z = u + i v with (u, v) stacked in p and ||p|| = 1.
ZQuantities evaluate_z(const Mat& A, const Mat& H, const Vec& p) {
    const auto n = A.rows();
    auto u = p.head(n);
    auto v = p.tail(n);
    ZQuantities q;
    q.lambda_r = u.dot(H * u) + v.dot(H * v);
    q.lambda_c = u.dot(A * v) - v.dot(A * u);
    q.b_a = (A.transpose() * u).squaredNorm() + (A.transpose() * v).squaredNorm();
    return q;
}

constexpr double kNegTol = 1e-12;

// Upper bound on beta implied by z; +inf when z does not constrain beta.
double beta_bound(const ZQuantities& q) {
    if (q.lambda_r >= -kNegTol) return kInf;
    return q.b_a / -q.lambda_r;
}

// Lower bound on eta implied by z at regularization beta; +inf when beta is
// already too large for this z, 0 when z does not constrain eta.
double eta_bound(const ZQuantities& q, double beta) {
    if (q.lambda_r >= -kNegTol) return 0.0;
    double denom = beta * q.lambda_r + q.b_a;
    if (denom <= 0.0) return kInf;
    double inner = -beta * q.lambda_c * q.lambda_c * q.lambda_r / denom;
    return (std::sqrt(std::max(0.0, inner)) - q.lambda_r) / beta;
}

template <class F>
Vec ascend(const Vec& start, F&& objective, int iterations) {
    Vec p = start.normalized();
    double f = objective(p);
    double step = 0.1;
    const double hstep = 1e-6;
    Vec grad(p.size());
    for (int it = 0; it < iterations && step > 1e-10; ++it) {
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            Vec a = p, b = p;
            a(k) += hstep;
            b(k) -= hstep;
            grad(k) = (objective(a.normalized()) - objective(b.normalized())) / (2 * hstep);
        }
        grad -= p.dot(grad) * p;  // tangent to the sphere
        if (!grad.allFinite() || grad.norm() == 0.0) break;
        bool improved = false;
        while (step > 1e-10) {
            Vec cand = (p + step * grad.normalized()).normalized();
            double fc = objective(cand);
            if (fc > f) {
                p = cand;
                f = fc;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return p;
}

}  // namespace

SingularCBounds singular_c_bounds(const mdp::ExpectationModel& model, double beta, long n_samples, int restarts,
                                  std::uint64_t seed) {
    if (!(beta > 0.0)) throw std::invalid_argument("singular_c_bounds needs beta > 0");
    const Mat& A = model.A;
    const Mat H = 0.5 * (A + A.transpose());
    const auto n = A.rows();
    Rng rng(stream_key(seed, 0x5C));

    struct Sample {
        double score;
        Vec p;
    };
    std::vector<Sample> worst_eta, worst_beta;
    SingularCBounds out;
    out.beta_upper = kInf;
    out.eta_lower = 0.0;
    out.samples = n_samples;
    out.restarts = restarts;

    auto keep_top = [restarts](std::vector<Sample>& pool, double score, const Vec& p) {
        if (static_cast<int>(pool.size()) < restarts) {
            pool.push_back({score, p});
            return;
        }
        auto it = std::min_element(pool.begin(), pool.end(), [](auto& a, auto& b) { return a.score < b.score; });
        if (score > it->score) *it = {score, p};
    };

    Vec p(2 * n);
    for (long s = 0; s < n_samples; ++s) {
        for (Eigen::Index k = 0; k < 2 * n; ++k) p(k) = rng.normal();
        p.normalize();
        ZQuantities q = evaluate_z(A, H, p);
        double bb = beta_bound(q);
        double eb = eta_bound(q, beta);
        if (q.lambda_r < -kNegTol) out.binding = true;
        out.beta_upper = std::min(out.beta_upper, bb);
        out.eta_lower = std::max(out.eta_lower, eb);
        if (std::isfinite(bb)) keep_top(worst_beta, -bb, p);
        if (std::isfinite(eb) && eb > 0.0) keep_top(worst_eta, eb, p);
    }

    auto neg_beta = [&](const Vec& x) {
        double b = beta_bound(evaluate_z(A, H, x));
        return std::isfinite(b) ? -b : -1e300;
    };
    auto eta_obj = [&](const Vec& x) {
        double e = eta_bound(evaluate_z(A, H, x), beta);
        return std::isfinite(e) ? e : 1e300;
    };
    for (const auto& smp : worst_beta) {
        Vec best = ascend(smp.p, neg_beta, 100);
        out.beta_upper = std::min(out.beta_upper, beta_bound(evaluate_z(A, H, best)));
    }
    if (std::isfinite(out.eta_lower)) {
        for (const auto& smp : worst_eta) {
            Vec best = ascend(smp.p, eta_obj, 100);
            out.eta_lower = std::max(out.eta_lower, eta_bound(evaluate_z(A, H, best), beta));
        }
    }
    out.beta_admissible = beta < out.beta_upper && std::isfinite(out.eta_lower);
    return out;
}

}  // namespace tdrc::stability

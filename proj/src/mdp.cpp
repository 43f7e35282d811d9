#include "tdrc/mdp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tdrc::mdp {

namespace {

constexpr double kProbTol = 1e-12;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

MdpSpec::MdpSpec(int states, int actions)
    : n_states(states),
      n_actions(actions),
      transition(static_cast<std::size_t>(states) * actions * states, 0.0),
      reward(transition.size(), 0.0),
      discount(transition.size(), 0.0),
      start_dist(Vec::Zero(states)) {
    if (states < 1 || actions < 1) fail("MdpSpec needs at least one state and one action");
}

void MdpSpec::validate() const {
    std::size_t expected = static_cast<std::size_t>(n_states) * n_actions * n_states;
    if (n_states < 1 || n_actions < 1) fail("MdpSpec needs at least one state and one action");
    if (transition.size() != expected || reward.size() != expected || discount.size() != expected)
        fail("MdpSpec tensor sizes do not match n_states * n_actions * n_states");
    if (start_dist.size() != n_states) fail("start_dist has wrong length");
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            double total = 0.0;
            for (int sp = 0; sp < n_states; ++sp) {
                double p_ = p(s, a, sp);
                double g_ = g(s, a, sp);
                if (!(p_ >= 0.0 && p_ <= 1.0)) fail("transition probability outside [0,1]");
                if (!(g_ >= 0.0 && g_ <= 1.0)) fail("discount outside [0,1]");
                if (!std::isfinite(r(s, a, sp))) fail("non-finite reward");
                total += p_;
            }
            if (std::abs(total - 1.0) > kProbTol) {
                std::ostringstream os;
                os << "transition row (" << s << "," << a << ") sums to " << total;
                fail(os.str());
            }
        }
    }
    if ((start_dist.array() < 0.0).any()) fail("start_dist has negative entries");
    if (std::abs(start_dist.sum() - 1.0) > kProbTol) fail("start_dist does not sum to 1");
}

Policy Policy::uniform(int n_states, int n_actions) {
    return Policy{Mat::Constant(n_states, n_actions, 1.0 / n_actions)};
}

void Policy::validate(int n_states, int n_actions) const {
    if (probs.rows() != n_states || probs.cols() != n_actions) fail("policy shape does not match MDP");
    if ((probs.array() < 0.0).any()) fail("policy has negative probabilities");
    for (int s = 0; s < n_states; ++s)
        if (std::abs(probs.row(s).sum() - 1.0) > kProbTol) fail("policy row does not sum to 1");
}

void FeatureMap::validate(int n_states) const {
    if (phi.rows() != n_states) fail("feature matrix row count does not match n_states");
    if (phi.cols() < 1) fail("feature dimension must be at least 1");
    if (phi.isZero(0.0)) fail("feature matrix is all zeros");
    if (!phi.allFinite()) fail("feature matrix has non-finite entries");
}

Mat state_chain(const MdpSpec& mdp, const Policy& pi) {
    Mat P = Mat::Zero(mdp.n_states, mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            double pa = pi.probs(s, a);
            if (pa == 0.0) continue;
            for (int sp = 0; sp < mdp.n_states; ++sp) P(s, sp) += pa * mdp.p(s, a, sp);
        }
    return P;
}

Vec stationary_distribution(const MdpSpec& mdp, const Policy& behavior) {
    mdp.validate();
    behavior.validate(mdp.n_states, mdp.n_actions);
    const int n = mdp.n_states;
    Mat P = state_chain(mdp, behavior);

    Mat M(n + 1, n);
    M.topRows(n) = P.transpose() - Mat::Identity(n, n);
    M.row(n).setOnes();
    Vec rhs = Vec::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::ColPivHouseholderQR<Mat> qr(M);
    if (qr.rank() == n) {
        Vec d = qr.solve(rhs);
        for (int i = 0; i < n; ++i)
            if (d(i) < 0.0 && d(i) > -1e-12) d(i) = 0.0;
        if ((d.array() >= 0.0).all() && std::abs(d.sum() - 1.0) < 1e-10 &&
            (P.transpose() * d - d).lpNorm<Eigen::Infinity>() < 1e-10)
            return d / d.sum();
    }

    // Reducible chain: iterate from the start distribution.
    Vec d = mdp.start_dist;
    const long cap = 1000000;
    for (long it = 0; it < cap; ++it) {
        Vec next = P.transpose() * d;
        double change = (next - d).lpNorm<1>();
        d = next;
        if (change < 1e-12) return d / d.sum();
    }
    throw StationaryDistributionError(
        "behavior chain did not converge to a stationary distribution (periodic or reducible); "
        "supply an explicit distribution");
}

namespace {

Mat whitener(const Mat& C, int& rank) {
    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    const Vec& ev = es.eigenvalues();
    double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-10 * top) keep.push_back(i);
    rank = static_cast<int>(keep.size());
    Mat L(rank, C.rows());
    for (int k = 0; k < rank; ++k) L.row(k) = es.eigenvectors().col(keep[k]).transpose() / std::sqrt(ev(keep[k]));
    return L;
}

}  // namespace

ExpectationModel model_from_matrices(Mat A, Vec b, Mat C, Vec d_b) {
    const auto n = b.size();
    if (A.rows() != n || A.cols() != n || C.rows() != n || C.cols() != n)
        throw std::invalid_argument("model matrices have inconsistent dimensions");
    ExpectationModel m;
    m.A = std::move(A);
    m.b = std::move(b);
    m.C = 0.5 * (C + C.transpose());
    m.d_b = std::move(d_b);
    m.c_whitener = whitener(m.C, m.c_rank);
    m.c_singular = m.c_rank < n;
    return m;
}

ExpectationModel expectation_matrices(const MdpSpec& mdp, const Policy& behavior, const Policy& target,
                                      const FeatureMap& features, const std::optional<Vec>& d_override) {
    mdp.validate();
    behavior.validate(mdp.n_states, mdp.n_actions);
    target.validate(mdp.n_states, mdp.n_actions);
    features.validate(mdp.n_states);

    Vec d;
    if (d_override) {
        d = *d_override;
        if (d.size() != mdp.n_states) throw std::invalid_argument("distribution override has wrong length");
        if (d.minCoeff() < 0.0 || std::abs(d.sum() - 1.0) > 1e-9)
            throw std::invalid_argument("distribution override is not a probability vector");
    } else {
        d = stationary_distribution(mdp, behavior);
    }

    const int n = features.n_features();
    Mat A = Mat::Zero(n, n);
    Vec b = Vec::Zero(n);
    Mat C = Mat::Zero(n, n);
    for (int s = 0; s < mdp.n_states; ++s) {
        if (d(s) == 0.0) continue;
        Vec x = features.x(s);
        C.noalias() += d(s) * x * x.transpose();
        Vec expected_next = Vec::Zero(n);
        double expected_r = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            double pa = target.probs(s, a);
            if (pa == 0.0) continue;
            for (int sp = 0; sp < mdp.n_states; ++sp) {
                double p = pa * mdp.p(s, a, sp);
                if (p == 0.0) continue;
                expected_next += p * mdp.g(s, a, sp) * features.phi.row(sp).transpose();
                expected_r += p * mdp.r(s, a, sp);
            }
        }
        A.noalias() += d(s) * x * (x - expected_next).transpose();
        b += d(s) * expected_r * x;
    }
    return model_from_matrices(std::move(A), std::move(b), std::move(C), std::move(d));
}

Vec td_fixed_point(const ExpectationModel& model) {
    Eigen::FullPivLU<Mat> lu(model.A);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        Mat null = lu.kernel();
        throw SingularSystemError("A is singular; TD fixed point is not unique", static_cast<int>(lu.rank()),
                                  null);
    }
    Vec w = lu.solve(model.b);
    // One refinement step keeps ||Aw - b|| near machine precision.
    w += lu.solve(model.b - model.A * w);
    return w;
}

Vec true_values(const MdpSpec& mdp, const Policy& pi) {
    const int n = mdp.n_states;
    Mat Pg = Mat::Zero(n, n);
    Vec r = Vec::Zero(n);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            double pa = pi.probs(s, a);
            for (int sp = 0; sp < n; ++sp) {
                double p = pa * mdp.p(s, a, sp);
                Pg(s, sp) += p * mdp.g(s, a, sp);
                r(s) += p * mdp.r(s, a, sp);
            }
        }
    return (Mat::Identity(n, n) - Pg).fullPivLu().solve(r);
}

double condition_number(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / sv(sv.size() - 1);
}

}  // namespace tdrc::mdp

#include "detail/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "detail/ddouble.hpp"

namespace sobosvd::detail {

namespace {

using DdVec = std::vector<dd>;

struct SparseRows {
    std::vector<std::vector<std::pair<Eigen::Index, double>>> rows;

    explicit SparseRows(const Eigen::MatrixXd& a) : rows(static_cast<std::size_t>(a.rows())) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index l = 0; l < a.cols(); ++l) {
                if (a(i, l) != 0.0) rows[static_cast<std::size_t>(i)].emplace_back(l, a(i, l));
            }
        }
    }

    DdVec apply(const DdVec& x) const {
        DdVec y(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            dd s;
            for (const auto& [l, v] : rows[i]) s += x[static_cast<std::size_t>(l)] * v;
            y[i] = s;
        }
        return y;
    }
};

dd weighted_dot(const DdVec& a, const DdVec& b, const Eigen::VectorXd& w) {
    dd s;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] * b[i]) * w[static_cast<Eigen::Index>(i)];
    return s;
}

// y = M W_c M^T x, either through an explicit Gram matrix or column sweeps.
class GramApply {
public:
    GramApply(const Eigen::MatrixXd& m, const Eigen::VectorXd& wc, bool explicit_gram)
        : n_(m.rows()), mt_(m.transpose()), wc_(wc), explicit_(explicit_gram) {
        if (!explicit_) return;
        const Eigen::Index big_n = mt_.rows();
        gram_.assign(static_cast<std::size_t>(n_ * n_), dd{});
        std::vector<dd> row(static_cast<std::size_t>(big_n));
        for (Eigen::Index i = 0; i < n_; ++i) {
            for (Eigen::Index c = 0; c < big_n; ++c) row[static_cast<std::size_t>(c)] = two_prod(mt_(c, i), wc_[c]);
            for (Eigen::Index l = 0; l <= i; ++l) {
                dd s;
                for (Eigen::Index c = 0; c < big_n; ++c) s += row[static_cast<std::size_t>(c)] * mt_(c, l);
                gram_[static_cast<std::size_t>(i * n_ + l)] = s;
                gram_[static_cast<std::size_t>(l * n_ + i)] = s;
            }
        }
    }

    DdVec apply(const DdVec& x) const {
        DdVec y(static_cast<std::size_t>(n_));
        if (explicit_) {
            for (Eigen::Index i = 0; i < n_; ++i) {
                dd s;
                const dd* g = gram_.data() + i * n_;
                for (Eigen::Index l = 0; l < n_; ++l) s += g[l] * x[static_cast<std::size_t>(l)];
                y[static_cast<std::size_t>(i)] = s;
            }
            return y;
        }
        const Eigen::Index big_n = mt_.rows();
        DdVec t(static_cast<std::size_t>(big_n));
        for (Eigen::Index c = 0; c < big_n; ++c) {
            dd s;
            for (Eigen::Index i = 0; i < n_; ++i) s += x[static_cast<std::size_t>(i)] * mt_(c, i);
            t[static_cast<std::size_t>(c)] = s * wc_[c];
        }
        for (Eigen::Index i = 0; i < n_; ++i) {
            dd s;
            for (Eigen::Index c = 0; c < big_n; ++c) s += t[static_cast<std::size_t>(c)] * mt_(c, i);
            y[static_cast<std::size_t>(i)] = s;
        }
        return y;
    }

private:
    Eigen::Index n_;
    Eigen::MatrixXd mt_;  // M^T: column i is row i of M, contiguous
    Eigen::VectorXd wc_;
    bool explicit_;
    std::vector<dd> gram_;
};

constexpr int kMaxSweeps = 12;

}  // namespace

RefinedTransfer refine_transfer(const Eigen::MatrixXd& m, const Eigen::MatrixXd& diff, const SingularSystem& sys,
                                std::size_t first, std::size_t count) {
    const Eigen::Index n = m.rows();
    const auto K = static_cast<Eigen::Index>(count);
    const Eigen::VectorXd& wr = sys.row_weights;
    const Eigen::MatrixXd& basis = sys.left;
    const Eigen::Index nb = basis.cols();
    const Eigen::VectorXd lambda_basis = sys.sigmas.cwiseAbs2();
    const double lambda1 = lambda_basis.size() ? lambda_basis[0] : 0.0;

    // An explicit Gram matrix pays off once the number of operator
    // applications outgrows the row count.
    const GramApply gram(m, sys.col_weights, 6 * 2 * K > n);
    const SparseRows d(diff);

    auto apply_g = [&](const DdVec& x) {
        DdVec xw(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xw[i] = x[i] * wr[static_cast<Eigen::Index>(i)];
        return gram.apply(xw);
    };

    RefinedTransfer out;
    out.psi.resize(n, K);
    out.gammas.resize(n, K);
    out.lambdas.resize(K);
    out.transfer_errors.resize(K);
    out.shifts.resize(K);

    for (Eigen::Index c = 0; c < K; ++c) {
        const Eigen::Index k = c + static_cast<Eigen::Index>(first);
        DdVec x(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = basis(i, k);

        DdVec y;
        dd mu;
        double previous = std::numeric_limits<double>::infinity();
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            y = apply_g(x);
            mu = weighted_dot(x, y, wr) / weighted_dot(x, x, wr);
            Eigen::VectorXd r(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                r[i] = (y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)] * mu).hi;
            }
            // Expand the residual in the (approximate) eigenbasis and undo it
            // through the spectral shift; near-degenerate partners are skipped.
            const Eigen::VectorXd coef = basis.transpose() * wr.cwiseProduct(r);
            Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
            const double guard = 1e-13 * lambda1;
            for (Eigen::Index i = 0; i < nb; ++i) {
                if (i == k) continue;
                const double gap = lambda_basis[i] - mu.hi;
                if (std::abs(gap) > guard) delta -= (coef[i] / gap) * basis.col(i);
            }
            if (nb < n) delta += (r - basis * coef) / mu.hi;  // null space of G

            for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += dd(delta[i]);
            const dd norm = sqrt(weighted_dot(x, x, wr));
            for (auto& v : x) v = v / norm;

            // Stop once corrections reach the double-double floor.
            const double step = std::sqrt(wr.dot(delta.cwiseAbs2()));
            if (step < 1e-28 || step > 0.5 * previous) break;
            previous = step;
        }

        y = apply_g(x);
        mu = weighted_dot(x, y, wr) / weighted_dot(x, x, wr);
        const DdVec dy = d.apply(y);
        const DdVec dx = d.apply(x);
        DdVec diffv(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const dd g = dy[ui] / mu;
            out.gammas(i, c) = g.hi;
            out.psi(i, c) = x[ui].hi;
            diffv[ui] = g - dx[ui];
        }
        const double dx_norm = sqrt(weighted_dot(dx, dx, wr)).hi;
        const double err = sqrt(weighted_dot(diffv, diffv, wr)).hi;
        out.transfer_errors[c] = err / std::max(dx_norm, 1.0);
        out.lambdas[c] = mu.hi;
        out.shifts[c] = std::sqrt(wr.dot((out.psi.col(c) - basis.col(k)).cwiseAbs2()));
    }
    return out;
}

}  // namespace sobosvd::detail

#include "sobosvd/testlib.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sobosvd/error.hpp"

namespace sobosvd {

namespace {

constexpr double pi = std::numbers::pi;

struct GaussRule {
    Eigen::VectorXd x;
    Eigen::VectorXd w;
};

// Gauss-Legendre nodes and weights mapped to [0,1].
GaussRule gauss_legendre(int m) {
    GaussRule g{Eigen::VectorXd(m), Eigen::VectorXd(m)};
    for (int i = 0; i < m; ++i) {
        double t = std::cos(pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-16) break;
        }
        g.x[i] = 0.5 * (1.0 - t);
        g.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return g;
}

struct SineTerm {
    double sigma;
    double dpsi;
    double coef;
    int freq;
};

// Sorted sine terms with |psi'| = k pi; the sigma of each term is |c_k| * scale.
std::vector<SineTerm> sine_terms(const std::vector<double>& c, double scale) {
    std::vector<SineTerm> t;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        if (c[i] != 0.0) t.push_back({std::abs(c[i]) * scale, k * pi, c[i], k});
    }
    std::stable_sort(t.begin(), t.end(), [](const SineTerm& a, const SineTerm& b) { return a.sigma > b.sigma; });
    return t;
}

CaseOracle sine_oracle(const std::vector<SineTerm>& terms, std::size_t dim) {
    auto shared = std::make_shared<std::vector<SineTerm>>(terms);
    CaseOracle o;
    o.rank = terms.size();
    o.sigma = [shared](std::size_t k) { return k >= 1 && k <= shared->size() ? (*shared)[k - 1].sigma : 0.0; };
    o.dpsi_norm = [shared](std::size_t k) { return k >= 1 && k <= shared->size() ? (*shared)[k - 1].dpsi : 0.0; };
    for (const SineTerm& t : terms) {
        const double s2 = t.sigma * t.sigma;
        o.l2_sq += s2;
        o.h1_sq += s2 * (1.0 + static_cast<double>(dim) * t.dpsi * t.dpsi);
    }
    if (dim == 2) {
        o.h1_tail = [shared](std::size_t r) {
            double sum = 0.0;
            for (std::size_t k = r; k < shared->size(); ++k) {
                const SineTerm& t = (*shared)[k];
                sum += t.sigma * t.sigma * (1.0 + 2.0 * t.dpsi * t.dpsi);
            }
            return sum;
        };
    }
    return o;
}

AnalyticCase sinsum(std::vector<double> c) {
    if (c.empty()) throw Error(ErrorCode::UnknownCase, "SINSUM needs at least one coefficient");
    AnalyticCase a;
    a.dim = 2;
    a.params = c;
    a.sampler = [c](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double k = static_cast<double>(i + 1);
            s += c[i] * std::sin(k * pi * x[0]) * std::sin(k * pi * x[1]);
        }
        return s;
    };
    a.oracle = sine_oracle(sine_terms(c, 0.5), 2);
    return a;
}

AnalyticCase brownian() {
    AnalyticCase a;
    a.dim = 2;
    a.sampler = [](std::span<const double> x) { return std::min(x[0], x[1]); };
    CaseOracle o;
    o.sigma = [](std::size_t k) {
        const double f = (static_cast<double>(k) - 0.5) * pi;
        return 1.0 / (f * f);
    };
    o.dpsi_norm = [](std::size_t k) { return (static_cast<double>(k) - 0.5) * pi; };
    o.l2_sq = 1.0 / 6.0;
    o.h1_sq = 7.0 / 6.0;
    o.h1_tail = [](std::size_t r) {
        // Sum of the head subtracted from the closed-form total.
        double head = 0.0;
        for (std::size_t k = 1; k <= r; ++k) {
            const double f = (static_cast<double>(k) - 0.5) * pi;
            head += 1.0 / (f * f * f * f) + 2.0 / (f * f);
        }
        return 7.0 / 6.0 - head;
    };
    a.oracle = std::move(o);
    a.description = "min(x,y)";
    return a;
}

AnalyticCase sum3d(std::vector<double> c) {
    if (c.size() != 2) throw Error(ErrorCode::UnknownCase, "SUM3D takes exactly two coefficients");
    AnalyticCase a;
    a.dim = 3;
    a.params = c;
    a.sampler = [c](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double k = static_cast<double>(i + 1);
            s += c[i] * std::sin(k * pi * x[0]) * std::sin(k * pi * x[1]) * std::sin(k * pi * x[2]);
        }
        return s;
    };
    a.oracle = sine_oracle(sine_terms(c, std::pow(0.5, 1.5)), 3);
    return a;
}

AnalyticCase expxy() {
    constexpr int m = 48;
    const GaussRule g = gauss_legendre(m);
    const Eigen::VectorXd sw = g.w.cwiseSqrt();
    Eigen::MatrixXd k(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) k(i, j) = sw[i] * std::exp(g.x[i] * g.x[j]) * sw[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);

    // The kernel is positive definite, so eigenpairs are the singular pairs.
    auto sig = std::make_shared<std::vector<double>>();
    auto dn = std::make_shared<std::vector<double>>();
    for (int c = m - 1; c >= 0; --c) {
        const double lambda = eig.eigenvalues()[c];
        const Eigen::VectorXd psi_nodes = eig.eigenvectors().col(c).cwiseQuotient(sw);
        // psi'(x) = (1/lambda) sum_i w_i y_i e^{x y_i} psi(y_i), integrated by the same rule.
        double d2 = 0.0;
        for (int i = 0; i < m; ++i) {
            double dpsi = 0.0;
            for (int j = 0; j < m; ++j) dpsi += g.w[j] * g.x[j] * std::exp(g.x[i] * g.x[j]) * psi_nodes[j];
            dpsi /= lambda;
            d2 += g.w[i] * dpsi * dpsi;
        }
        sig->push_back(lambda);
        dn->push_back(std::sqrt(d2));
    }

    double l2 = 0.0, dx2 = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double e = std::exp(2.0 * g.x[i] * g.x[j]);
            l2 += g.w[i] * g.w[j] * e;
            dx2 += g.w[i] * g.w[j] * g.x[j] * g.x[j] * e;
        }
    }

    AnalyticCase a;
    a.dim = 2;
    a.sampler = [](std::span<const double> x) { return std::exp(x[0] * x[1]); };
    CaseOracle o;
    o.valid_terms = 8;
    o.sigma = [sig](std::size_t k) { return k >= 1 && k <= sig->size() ? (*sig)[k - 1] : 0.0; };
    o.dpsi_norm = [dn](std::size_t k) { return k >= 1 && k <= dn->size() ? (*dn)[k - 1] : 0.0; };
    o.l2_sq = l2;
    o.h1_sq = l2 + 2.0 * dx2;
    o.h1_tail = [sig, dn, h1 = o.h1_sq](std::size_t r) {
        double head = 0.0;
        for (std::size_t k = 0; k < r && k < sig->size(); ++k)
            head += (*sig)[k] * (*sig)[k] * (1.0 + 2.0 * (*dn)[k] * (*dn)[k]);
        return std::max(0.0, h1 - head);
    };
    a.oracle = std::move(o);
    a.description = "exp(x*y), Gauss-Legendre Nystrom reference";
    return a;
}

std::string format_params(const std::vector<double>& p) {
    std::ostringstream os;
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    return os.str();
}

}  // namespace

GridFunction AnalyticCase::sample_on(const std::vector<std::size_t>& n) const {
    std::vector<std::size_t> sizes = n;
    if (sizes.size() == 1) sizes.assign(dim, n[0]);
    if (sizes.size() != dim) {
        throw Error(ErrorCode::ShapeMismatch, name + " is " + std::to_string(dim) + "-dimensional, got " +
                                                  std::to_string(n.size()) + " grid sizes");
    }
    return sample(sampler, unit_axes(sizes));
}

AnalyticCase get_case(std::string_view name, const std::vector<double>& params) {
    AnalyticCase a;
    auto no_params = [&] {
        if (!params.empty()) throw Error(ErrorCode::UnknownCase, std::string(name) + " takes no parameters");
    };
    if (name == "SEP1") {
        no_params();
        a = sinsum({1.0});
        a.params.clear();
        a.description = "sin(pi x) sin(pi y)";
    } else if (name == "SINSUM") {
        a = sinsum(params.empty() ? std::vector<double>{1.0, 0.5, 0.25} : params);
        a.description = "sum_k c_k sin(k pi x) sin(k pi y), c = (" + format_params(a.params) + ")";
    } else if (name == "BROWNIAN") {
        no_params();
        a = brownian();
    } else if (name == "SEP3D") {
        no_params();
        a = sum3d({1.0, 0.0});
        a.params.clear();
        a.description = "sin(pi x) sin(pi y) sin(pi z)";
    } else if (name == "SUM3D") {
        a = sum3d(params.empty() ? std::vector<double>{1.0, 0.5} : params);
        a.description = "c1 s1 s1 s1 + c2 s2 s2 s2, c = (" + format_params(a.params) + ")";
    } else if (name == "EXPXY") {
        no_params();
        a = expxy();
    } else {
        throw Error(ErrorCode::UnknownCase, "unknown case '" + std::string(name) + "'");
    }
    a.name = std::string(name);
    return a;
}

AnalyticCase get_case(std::string_view spec) {
    const auto open = spec.find('(');
    if (open == std::string_view::npos) return get_case(spec, {});
    if (spec.back() != ')') throw Error(ErrorCode::UnknownCase, "malformed case '" + std::string(spec) + "'");
    std::vector<double> params;
    std::istringstream in(std::string(spec.substr(open + 1, spec.size() - open - 2)));
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            params.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::UnknownCase, "bad parameter '" + item + "' in '" + std::string(spec) + "'");
        }
    }
    return get_case(spec.substr(0, open), params);
}

std::vector<std::string> list_cases() { return {"SEP1", "SINSUM", "BROWNIAN", "SEP3D", "SUM3D", "EXPXY"}; }

}  // namespace sobosvd

#include "sobosvd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "sobosvd/error.hpp"
#include "sobosvd/experiment.hpp"
#include "sobosvd/testlib.hpp"

namespace sobosvd {

namespace {

class Printer {
public:
    explicit Printer(std::ostream& out) : out_(out) {}

    void line(bool ok, const std::string& name, const std::string& detail) {
        out_ << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
        all_ = all_ && ok;
    }

    bool all() const { return all_; }

private:
    std::ostream& out_;
    bool all_ = true;
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

}  // namespace

int verify_case(std::string_view case_spec, const std::vector<std::size_t>& n, std::ostream& out) {
    const AnalyticCase c = get_case(case_spec);
    const GridFunction u = c.sample_on(n);
    const std::size_t d = u.dims();
    Printer p(out);

    std::size_t rank = u.axis(0).size();
    for (std::size_t j = 0; j < d; ++j) rank = std::min(rank, numerical_rank(mode_svd(u, j)));

    ExperimentConfig cfg;
    cfg.case_spec = std::string(case_spec);
    cfg.checks = known_checks();
    const std::size_t top = std::min<std::size_t>(rank, d == 2 ? 16 : 4);
    for (std::size_t r = 0; r <= top; ++r) cfg.ranks.push_back(RankVector(d, r));
    const ExperimentResult res = run_experiment(cfg, u);
    for (const auto& chk : res.report["checks"]) {
        const std::string status = chk["status"];
        if (status == "skipped") continue;
        std::string detail = chk["metric"].get<std::string>();
        if (chk.contains("worst")) detail += fmt(" worst %.3g tol %.3g", chk["worst"].get<double>(), chk["tolerance"].get<double>());
        p.line(status == "pass", chk["name"], detail);
    }

    const SobolevAnalysis a = analyze(u, DerivativeDetail::NormsOnly);

    if (c.oracle && c.oracle->sigma) {
        const CaseOracle& o = *c.oracle;
        std::size_t kmax = std::min<std::size_t>(10, a.derivs[0].retained);
        if (o.rank) kmax = std::min(kmax, o.rank);
        if (o.valid_terms) kmax = std::min(kmax, o.valid_terms);
        std::size_t nmin = u.axis(0).size();
        for (std::size_t j = 0; j < d; ++j) nmin = std::min(nmin, u.axis(j).size());
        // Second-order scheme: 1e-3 at n = 513, scaled by h^2 below that.
        const double scale = 512.0 / static_cast<double>(nmin - 1);
        const double tol = 1e-3 * std::max(1.0, scale * scale);
        double worst = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 1; k <= kmax; ++k) {
                const double ref = o.sigma(k);
                worst = std::max(worst, std::abs(a.modes[j].sigma(k - 1) - ref) / ref);
            }
        }
        p.line(worst <= tol, "oracle_sigmas", fmt("max rel error %.3g tol %.3g", worst, tol));
    }

    {
        bool mono = true;
        double worst_drop = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double prev = 0.0;
            const std::size_t rmax = std::min<std::size_t>(std::max<std::size_t>(rank, 1), 16);
            for (std::size_t r = 1; r <= rmax; ++r) {
                const double g = gamma_constant(a.modes[j], a.derivs[j], r);
                if (g < prev * (1.0 - 1e-12)) {
                    mono = false;
                    worst_drop = std::max(worst_drop, prev - g);
                }
                prev = g;
            }
        }
        p.line(mono, "gamma_monotone", fmt("largest drop %.3g", worst_drop));
    }

    {
        RankVector rk(d);
        for (std::size_t j = 0; j < d; ++j) rk[j] = numerical_rank(a.modes[j]);
        const TuckerApprox t = hosvd_project(u, a.modes, rk);
        const double res = norm_l2(u - t.projected);
        p.line(res <= 1e-10, "exact_recovery", fmt("residual %.3g at numerical ranks", res));
    }

    {
        const TuckerApprox t = hosvd_project(u, a.modes, RankVector(d, 0));
        const double err = norm_l2(u - t.projected);
        const double un = norm_l2(u);
        const double rel = un > 0.0 ? std::abs(err - un) / un : err;
        p.line(rel <= 1e-12, "zero_rank", fmt("error %.17g vs norm %.17g", err, un));
    }

    {
        const GridFunction z = 0.0 * u;
        bool empty = true;
        for (std::size_t j = 0; j < d; ++j) {
            const SingularSystem s = mode_svd(z, j);
            const DerivativeData dd = derivative_data(z, s, j, DerivativeDetail::NormsOnly);
            empty = empty && numerical_rank(s) == 0 && dd.retained == 0;
        }
        const ErrorReport rep = h1_sandwich(z, RankVector(d, 1));
        p.line(empty && rep.measured.l2_sq == 0.0, "zero_function", empty ? "empty spectra" : "non-empty spectra");
    }

    out << (p.all() ? "verify: all checks passed" : "verify: some checks failed") << "\n";
    return p.all() ? 0 : 1;
}

}  // namespace sobosvd

#include "ckdv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <unsupported/Eigen/Polynomials>

#include "ckdv/error.hpp"
#include "ckdv/parallel.hpp"

namespace ckdv {

namespace {

constexpr double hyp_tol = 1e-12;

double br(double x) { return 1.0 + std::abs(x); }

/// Real roots of c[0] + c[1] x + ..., polished with Newton steps.
std::vector<double> real_roots(std::vector<double> c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.size() < 2) return {};
    if (c.size() == 2) return {-c[0] / c[1]};
    Eigen::VectorXd coeffs = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    std::vector<double> roots;
    for (const auto& z : solver.roots())
        if (std::abs(z.imag()) <= 1e-6 * std::max(1.0, std::abs(z.real()))) roots.push_back(z.real());
    for (double& r : roots) {
        for (int it = 0; it < 3; ++it) {
            double p = 0.0, dp = 0.0;
            for (std::size_t i = c.size(); i-- > 0;) {
                dp = dp * r + p;
                p = p * r + c[i];
            }
            if (dp == 0.0) break;
            r -= p / dp;
        }
    }
    return roots;
}

void append_roots(std::vector<double>& out, std::vector<double> c, double shift) {
    c[0] += shift;
    for (double r : real_roots(c)) out.push_back(r);
}

/// \int_R f with a geometric tail walk: the window doubles until
/// f(+-X) X / (decay - 1) is below tail_tol times the value; that estimate is
/// then added.
double integrate_line(const std::function<double(double)>& f, const std::vector<double>& bps, double decay,
                      const KernelQuad& q) {
    double B = 0.0;
    for (double x : bps) B = std::max(B, std::abs(x));
    double X = std::max(q.x_max, 2.0 * B);
    double v = integrate(f, -X, X, bps, q.quad).value;
    for (int it = 0; it < 80; ++it) {
        const double tail = (std::abs(f(X)) + std::abs(f(-X))) * X / (decay - 1.0);
        if (tail <= q.tail_tol * std::abs(v)) return v + tail;
        v += integrate(f, X, 2.0 * X, q.quad).value + integrate(f, -2.0 * X, -X, q.quad).value;
        X *= 2.0;
    }
    throw Error("kernel tail did not converge");
}

/// \int f over {inside}; the region is a finite union of intervals whose
/// endpoints are among the breakpoints.
double integrate_region(const std::function<double(double)>& f, const std::function<bool(double)>& inside,
                        std::vector<double> bps, const KernelQuad& q) {
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double lo = bps[i], hi = bps[i + 1];
        if (!(hi > lo) || !inside(0.5 * (lo + hi))) continue;
        v += integrate(f, lo, hi, q.quad).value;
    }
    return v;
}

void require(bool ok, const char* lemma, const char* constraint) {
    if (!ok) throw HypothesisViolation(lemma, constraint);
}

double xi_y_kernel(KernelId id, const KernelParams& p, double xi, double y, const KernelQuad& q) {
    if (xi == 0.0) return 0.0;
    const double s = p.s, b = p.b, bp = p.b_prime;
    const double ax = std::abs(xi);
    const double c3 = ax * ax * ax;
    switch (id) {
        case KernelId::L3_3: {
            const double c = y + 0.75;
            auto f = [&](double x) { return std::pow(1.0 + c3 * std::abs(c - x * x), -2.0 * b); };
            std::vector<double> bps{0.0};
            if (c > 0.0) bps.insert(bps.end(), {-std::sqrt(c), std::sqrt(c)});
            const double pref = std::pow(ax, 3.0 - 4.0 * s) * std::pow(1.0 + c3 * std::abs(y + 2.0), 2.0 * bp) *
                                std::pow(br(xi), 2.0 * s) * std::pow(std::abs(y + 2.0), -2.0 * s);
            return pref == 0.0 ? 0.0 : pref * integrate_line(f, bps, 4.0 * b, q);
        }
        case KernelId::L3_4: {
            const double c = y + 0.25;
            auto f = [&](double x) { return std::pow(1.0 + c3 * std::abs(c - x * x), -2.0 * b); };
            std::vector<double> bps{0.0};
            if (c > 0.0) bps.insert(bps.end(), {-std::sqrt(c), std::sqrt(c)});
            const double pref = c3 * std::pow(1.0 + c3 * std::abs(3.0 * y + 2.0), 2.0 * bp);
            return pref * integrate_line(f, bps, 4.0 * b, q);
        }
        case KernelId::L3_5: {
            const double K = 2.0 * std::abs(y + 2.0);
            if (K == 0.0) return 0.0;
            const double c = y + 0.75;
            auto arg = [c](double x) { return c - 3.0 * x * x; };
            auto f = [&](double x) {
                return std::pow(std::abs(x * x - 0.25), -2.0 * s) * std::pow(1.0 + c3 * std::abs(arg(x)), -2.0 * b);
            };
            auto inside = [&](double x) { return std::abs(arg(x)) <= K; };
            std::vector<double> bps{-0.5, 0.0, 0.5};
            const std::vector<double> poly{c, 0.0, -3.0};
            for (double sh : {-K, 0.0, K}) append_roots(bps, poly, sh);
            const double pref =
                std::pow(ax, 3.0 - 4.0 * s) * std::pow(1.0 + c3 * std::abs(y + 2.0), 2.0 * bp) * std::pow(br(xi), 2.0 * s);
            return pref * integrate_region(f, inside, bps, q);
        }
        case KernelId::L3_7: {
            const std::vector<double> poly{y, 3.0, -3.0, 2.0};
            auto P = [y](double x) { return y + 3.0 * (x - x * x) + 2.0 * x * x * x; };
            auto f = [&](double x) { return std::pow(1.0 + c3 * std::abs(P(x)), -2.0 * b); };
            std::vector<double> bps{0.5};
            append_roots(bps, poly, 0.0);
            const double pref = c3 * std::pow(1.0 + c3 * std::abs(y + 2.0), 2.0 * bp);
            return pref * integrate_line(f, bps, 6.0 * b, q);
        }
        case KernelId::L3_8:
        case KernelId::L3_10: {
            const bool a1 = id == KernelId::L3_8;
            const double K = a1 ? 2.0 * std::abs(y + 2.0) : 2.0 * std::abs(y);
            if (K == 0.0) return 0.0;
            const std::vector<double> poly = a1 ? std::vector<double>{y, 3.0, -3.0, 2.0}
                                                : std::vector<double>{y, -3.0, 3.0, -2.0};
            const double sg = a1 ? 1.0 : -1.0;
            auto P = [=](double x) { return y + sg * (3.0 * (x - x * x) + 2.0 * x * x * x); };
            auto f = [&](double x) {
                return std::pow(std::abs(x - x * x), -2.0 * s) * std::pow(1.0 + c3 * std::abs(P(x)), -2.0 * b);
            };
            auto inside = [&](double x) { return std::abs(P(x)) <= K; };
            std::vector<double> bps{0.0, 0.5, 1.0};
            for (double sh : {-K, 0.0, K}) append_roots(bps, poly, sh);
            const double weight = a1 ? std::abs(y + 2.0) : std::abs(y);
            const double pref = std::pow(ax, 3.0 - 2.0 * s) * std::pow(1.0 + c3 * weight, 2.0 * bp);
            return pref * integrate_region(f, inside, bps, q);
        }
        default:
            throw InvalidArgument("not a (xi, y) kernel");
    }
}

double resonance_kernel(KernelId id, const KernelParams& p, double xi1, double tau1, const KernelQuad& q) {
    if (std::abs(xi1) < 1.0) return 0.0;
    const double s = p.s, b = p.b, bp = p.b_prime;
    const double c1 = xi1 * xi1 * xi1;
    const double mod = id == KernelId::L3_9 ? tau1 + c1 : tau1 - c1;
    const double K = 2.0 * std::abs(mod);
    const std::vector<double> poly = id == KernelId::L3_11
                                         ? std::vector<double>{tau1 + c1, -3.0 * xi1 * xi1, 3.0 * xi1}
                                         : std::vector<double>{tau1 - c1, 3.0 * xi1 * xi1, -3.0 * xi1, 2.0};
    auto mu = [&](double x) {
        double v = 0.0;
        for (std::size_t i = poly.size(); i-- > 0;) v = v * x + poly[i];
        return v;
    };
    auto f = [&](double x) {
        const double ax = std::abs(x);
        return std::pow(ax, 2.0 + 2.0 * s) * std::pow(std::abs(x * xi1 * (x - xi1)), -2.0 * s) *
               std::pow(br(x), 2.0 * s) * std::pow(br(mu(x)), 2.0 * bp);
    };
    auto inside = [&](double x) { return std::abs(x - xi1) >= 1.0 && std::abs(mu(x)) <= K; };
    std::vector<double> bps{0.0, xi1, xi1 - 1.0, xi1 + 1.0};
    for (double sh : {-K, 0.0, K}) append_roots(bps, poly, sh);
    const double I = integrate_region(f, inside, bps, q);
    return std::pow(br(mod), -b) * std::sqrt(I);
}

}  // namespace

const std::vector<KernelId>& all_kernels() {
    static const std::vector<KernelId> ids{KernelId::L3_2a, KernelId::L3_2b, KernelId::L3_3, KernelId::L3_4,
                                           KernelId::L3_5,  KernelId::L3_6,  KernelId::L3_7, KernelId::L3_8,
                                           KernelId::L3_9,  KernelId::L3_10, KernelId::L3_11};
    return ids;
}

std::string kernel_name(KernelId id) {
    switch (id) {
        case KernelId::L3_2a: return "L3.2a";
        case KernelId::L3_2b: return "L3.2b";
        case KernelId::L3_3: return "L3.3";
        case KernelId::L3_4: return "L3.4";
        case KernelId::L3_5: return "L3.5";
        case KernelId::L3_6: return "L3.6";
        case KernelId::L3_7: return "L3.7";
        case KernelId::L3_8: return "L3.8";
        case KernelId::L3_9: return "L3.9";
        case KernelId::L3_10: return "L3.10";
        case KernelId::L3_11: return "L3.11";
    }
    return "?";
}

KernelId kernel_from_name(const std::string& name) {
    for (KernelId id : all_kernels())
        if (kernel_name(id) == name) return id;
    throw InvalidArgument("unknown kernel: " + name);
}

void check_kernel_hypotheses(KernelId id, const KernelParams& p) {
    const std::string n = kernel_name(id);
    const char* lemma = n.c_str();
    const double s = p.s, b = p.b, bp = p.b_prime;
    switch (id) {
        case KernelId::L3_2a:
            require(b > 0.5, lemma, "b > 1/2");
            return;
        case KernelId::L3_2b:
            require(p.alpha >= -hyp_tol, lemma, "alpha >= 0");
            require(p.alpha <= p.beta + hyp_tol, lemma, "alpha <= beta");
            require(p.beta > 1.0, lemma, "beta > 1");
            return;
        case KernelId::L3_3:
            require(s >= -0.75 - hyp_tol && s <= hyp_tol, lemma, "s in [-3/4, 0]");
            require(bp <= s / 3.0 - 0.25 + hyp_tol, lemma, "b' <= s/3 - 1/4");
            require(b > 0.5, lemma, "b > 1/2");
            return;
        case KernelId::L3_4:
            require(bp <= -0.25 + hyp_tol, lemma, "b' <= -1/4");
            require(b > 0.5, lemma, "b > 1/2");
            return;
        case KernelId::L3_5:
            require(s >= -0.75 - hyp_tol && s <= -0.25 + hyp_tol, lemma, "s in [-3/4, -1/4]");
            require(bp >= -0.5 - hyp_tol && bp <= s / 3.0 - 0.25 + hyp_tol, lemma, "b' in [-1/2, s/3 - 1/4]");
            require(b > 0.5, lemma, "b > 1/2");
            return;
        case KernelId::L3_7:
            require(bp <= hyp_tol, lemma, "b' <= 0");
            require(b > 0.5, lemma, "b > 1/2");
            return;
        case KernelId::L3_8:
        case KernelId::L3_10:
            require(s >= -0.75 - hyp_tol && s <= -0.5 + hyp_tol, lemma, "s in [-3/4, -1/2]");
            require(bp >= -0.5 - hyp_tol && bp <= s / 3.0 - 0.25 + hyp_tol, lemma, "b' in [-1/2, s/3 - 1/4]");
            require(b > 0.5, lemma, "b > 1/2");
            return;
        case KernelId::L3_6:
        case KernelId::L3_9:
        case KernelId::L3_11: {
            require(s > -0.75 && s <= -0.5 + hyp_tol, lemma, "s in (-3/4, -1/2]");
            require(bp > -0.5 && bp <= hyp_tol, lemma, "b' in (-1/2, 0]");
            require(b > 0.5, lemma, "b > 1/2");
            require(bp - b <= -s - 1.5 + hyp_tol, lemma, "b' - b <= -s - 3/2");
            if (id == KernelId::L3_11)
                require(bp - b <= s / 3.0 - 0.75 + hyp_tol, lemma, "b' - b <= s/3 - 3/4");
            else
                require(bp - b <= s - 1.0 / 6.0 + hyp_tol, lemma, "b' - b <= s - 1/6");
            return;
        }
    }
}

KernelParams reference_params(KernelId id) {
    switch (id) {
        case KernelId::L3_2a: return {0.0, 0.6, 0.0, 0.0, 0.0};
        case KernelId::L3_2b: return {0.0, 0.0, 0.0, 1.0, 2.0};
        case KernelId::L3_4:
        case KernelId::L3_7: return {0.0, 0.6, -0.4, 0.0, 0.0};
        case KernelId::L3_3:
        case KernelId::L3_5:
        case KernelId::L3_8:
        case KernelId::L3_10: return {-0.6, 0.55, -0.47, 0.0, 0.0};
        case KernelId::L3_6:
        case KernelId::L3_9:
        case KernelId::L3_11: return {-0.6, 0.55, -0.45, 0.0, 0.0};
    }
    return {};
}

std::vector<KernelPoint> default_samples(KernelId id) {
    std::vector<KernelPoint> pts;
    switch (id) {
        case KernelId::L3_2a:
            for (double a : {-4.0, -1.0, -0.25, 0.25, 1.0, 4.0})
                for (double e : {-8.0, -4.0, -2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
                    pts.push_back({a, e});
            return pts;
        case KernelId::L3_2b:
            for (double a : {-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0})
                for (double ap : {-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0}) pts.push_back({a, ap});
            return pts;
        case KernelId::L3_6:
        case KernelId::L3_9:
        case KernelId::L3_11:
            for (double x1 : {-4.0, -2.0, -1.0, 0.5, 1.0, 2.0, 4.0, 8.0})
                for (double sg : {-1.0, 1.0})
                    for (double off : {-1000.0, -100.0, -10.0, -1.0, 1.0, 10.0, 100.0, 1000.0})
                        pts.push_back({x1, sg * x1 * x1 * x1 + off});
            return pts;
        default:
            pts.push_back({0.0, 0.0});
            for (double xi : {-8.0, -4.0, -2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
                for (double y : {-3.0, -2.5, -2.0, -1.5, -1.0, -0.75, -0.5, -1.0 / 3.0, -0.25, -0.2, 0.0, 0.5, 1.0,
                                 2.0, 5.0, 10.0})
                    pts.push_back({xi, y});
            return pts;
    }
}

double kernel_value(KernelId id, const KernelParams& p, KernelPoint pt, const KernelQuad& q) {
    check_kernel_hypotheses(id, p);
    switch (id) {
        case KernelId::L3_2a: {
            const double A = std::abs(pt.u), eta = pt.v;
            if (A == 0.0 || eta == 0.0) return 0.0;
            auto f = [&](double x) { return std::pow(1.0 + A * std::abs(x * x - eta * eta), -2.0 * p.b); };
            return A * std::abs(eta) * integrate_line(f, {-std::abs(eta), 0.0, std::abs(eta)}, 4.0 * p.b, q);
        }
        case KernelId::L3_2b: {
            const double a = pt.u, ap = pt.v;
            auto f = [&](double x) { return std::pow(br(x - ap), -p.alpha) * std::pow(br(x - a), -p.beta); };
            return std::pow(br(a - ap), p.alpha) * integrate_line(f, {a, ap}, p.alpha + p.beta, q);
        }
        case KernelId::L3_6:
        case KernelId::L3_9:
        case KernelId::L3_11:
            return resonance_kernel(id, p, pt.u, pt.v, q);
        default:
            return xi_y_kernel(id, p, pt.u, pt.v, q);
    }
}

KernelCheck kernel_bound_check(KernelId id, const KernelParams& p, const std::vector<KernelPoint>& samples,
                               const KernelQuad& q, double stability_tol) {
    check_kernel_hypotheses(id, p);
    if (samples.empty()) throw InvalidArgument("kernel_bound_check needs at least one sample");
    KernelQuad fine = q;
    fine.quad.initial_panels *= 2;
    fine.quad.rel_tol *= 0.5;
    fine.x_max *= 2.0;
    std::vector<double> base(samples.size()), refined(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        base[i] = kernel_value(id, p, samples[i], q);
        refined[i] = kernel_value(id, p, samples[i], fine);
    });
    KernelCheck r;
    r.id = id;
    r.samples = static_cast<long>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (base[i] > r.max_value) {
            r.max_value = base[i];
            r.argmax = samples[i];
        }
        r.max_refined = std::max(r.max_refined, refined[i]);
    }
    r.rel_change = r.max_refined == 0.0 ? 0.0 : std::abs(r.max_refined - r.max_value) / r.max_refined;
    r.stable = std::isfinite(r.max_value) && r.rel_change < stability_tol;
    return r;
}

}  // namespace ckdv

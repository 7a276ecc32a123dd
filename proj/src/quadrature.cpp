#include "ckdv/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "ckdv/error.hpp"

namespace ckdv {

namespace {

// Kronrod nodes (non-negative half) and weights; odd-indexed nodes are the
// 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double k = kKronrod[7] * fc, g = kGauss[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double s = f(c - h * kNodes[i]) + f(c + h * kNodes[i]);
        k += kKronrod[i] * s;
        if (i % 2 == 1) g += kGauss[i / 2] * s;
    }
    evals += 15;
    return Panel{a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
    return integrate(f, a, b, {}, opt);
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> breakpoints,
                     const QuadOptions& opt) {
    if (!(std::isfinite(a) && std::isfinite(b))) throw InvalidArgument("integrate needs finite limits");
    if (opt.initial_panels < 1) throw InvalidArgument("initial_panels must be positive");
    QuadResult out;
    if (a == b) return out;
    const double sign = b > a ? 1.0 : -1.0;
    if (b < a) std::swap(a, b);

    breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(),
                                     [&](double x) { return !(x > a && x < b); }),
                      breakpoints.end());
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    std::vector<double> edges{a};
    edges.insert(edges.end(), breakpoints.begin(), breakpoints.end());
    edges.push_back(b);

    std::priority_queue<Panel> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double w = (edges[i + 1] - edges[i]) / opt.initial_panels;
        for (int p = 0; p < opt.initial_panels; ++p) {
            const double lo = edges[i] + p * w;
            const double hi = p + 1 == opt.initial_panels ? edges[i + 1] : lo + w;
            const Panel q = gk15(f, lo, hi, out.evaluations);
            total += q.value;
            err += q.error;
            heap.push(q);
        }
    }
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= opt.max_panels) {
            out.converged = false;
            break;
        }
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            out.converged = false;
            break;
        }
        heap.pop();
        const Panel l = gk15(f, worst.a, mid, out.evaluations);
        const Panel r = gk15(f, mid, worst.b, out.evaluations);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = sign * total;
    out.error = err;
    return out;
}

}  // namespace ckdv

#include "ckdv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>

#include "ckdv/error.hpp"

namespace ckdv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

}  // namespace

double sobolev_norm_sq(const SpectralField& f, double s) {
    const GridSpec& g = f.grid;
    double acc = 0.0;
    for (int j = 0; j < g.n; ++j) {
        const double xi = g.wavenumber(j);
        acc += std::pow(1.0 + xi * xi, s) * std::norm(f.coeffs[j]);
    }
    return acc * g.dxi();
}

double sobolev_norm(const SpectralField& f, double s) { return std::sqrt(sobolev_norm_sq(f, s)); }

RVec upsample(const SpectralField& f, int factor) {
    if (factor < 1) throw InvalidArgument("upsample factor must be >= 1");
    const GridSpec& g = f.grid;
    if (factor == 1) return inverse(f);
    const GridSpec fine{g.n * factor, g.period, g.dealias_fraction};
    SpectralField F(fine);
    const int half = g.n / 2;
    for (int k = 0; k < half; ++k) F.coeffs[k] = f.coeffs[k];
    for (int k = 1; k < half; ++k) F.coeffs[fine.n - k] = f.coeffs[g.n - k];
    // The coarse Nyquist coefficient stands for c cos(xi x): split it over +/-.
    F.coeffs[half] = 0.5 * f.coeffs[half];
    F.coeffs[fine.n - half] = 0.5 * f.coeffs[half];
    return inverse(F);
}

HsInvariants hs_invariants(const State& s, double a, double b) {
    const double h2 = s.u.grid.dx() / 2.0;
    const RVec u = upsample(s.u, 2), v = upsample(s.v, 2);
    const double cubic = ((1.0 + a) * u.array().cube() + b * u.array() * v.array().square()).sum() * h2;
    const double ux2 = l2_norm_sq(spectral_derivative(s.u, 1));
    const double vx2 = l2_norm_sq(spectral_derivative(s.v, 1));
    HsInvariants r;
    r.V = 0.5 * (1.0 + a) * ux2 + b * vx2 - cubic;
    r.F = l2_norm_sq(s.u) + (2.0 / 3.0) * b * l2_norm_sq(s.v);
    return r;
}

GgInvariants gg_invariants(const State& s, const GearGrimshaw& p) {
    const double h = s.u.grid.dx();
    const double h2 = h / 2.0;
    GgInvariants r;
    // \int f dx = sqrt(2 pi) * f^(0)
    r.phi1 = std::sqrt(2.0 * std::numbers::pi) * s.u.coeffs[0].real();
    r.phi2 = std::sqrt(2.0 * std::numbers::pi) * s.v.coeffs[0].real();
    const double u2 = l2_norm_sq(s.u), v2 = l2_norm_sq(s.v);
    r.phi3 = p.b2 * u2 + p.b1 * v2;
    const SpectralField ux = spectral_derivative(s.u, 1), vx = spectral_derivative(s.v, 1);
    const double uxvx = (ux.coeffs.conjugate().cwiseProduct(vx.coeffs)).sum().real() * s.u.grid.dxi();
    const RVec U = upsample(s.u, 2), Vv = upsample(s.v, 2);
    const auto ua = U.array(), va = Vv.array();
    const double cubic = (p.b2 * ua.cube() / 3.0 + p.b2 * p.a2 * ua.square() * va + p.b2 * p.a1 * ua * va.square() +
                          va.cube() / 3.0)
                             .sum() *
                         h2;
    r.phi4 = p.b2 * l2_norm_sq(ux) + l2_norm_sq(vx) + 2.0 * p.b2 * p.a3 * uxvx - cubic - p.r * v2;
    return r;
}

DiagnosticRecord make_record(const State& s, const SystemSpec& spec, double sobolev_s) {
    DiagnosticRecord r{};
    r.t = s.t;
    r.V = r.F = r.phi1 = r.phi2 = r.phi3 = r.phi4 = kNaN;
    r.sobolev_u = sobolev_norm(s.u, sobolev_s);
    r.sobolev_v = sobolev_norm(s.v, sobolev_s);
    bool ok = std::isfinite(r.sobolev_u) && std::isfinite(r.sobolev_v);
    if (const auto* hs = std::get_if<HirotaSatsuma>(&spec)) {
        const auto inv = hs_invariants(s, hs->a, hs->b);
        r.V = inv.V;
        r.F = inv.F;
        ok = ok && std::isfinite(r.V) && std::isfinite(r.F);
    } else if (const auto* gg = std::get_if<GearGrimshaw>(&spec)) {
        const auto inv = gg_invariants(s, *gg);
        r.phi1 = inv.phi1;
        r.phi2 = inv.phi2;
        r.phi3 = inv.phi3;
        r.phi4 = inv.phi4;
        ok = ok && std::isfinite(r.phi1 + r.phi2 + r.phi3 + r.phi4);
    } else {
        // Masses and the unweighted L2 energy are defined for every system.
        const auto inv = gg_invariants(s, GearGrimshaw{});
        r.phi1 = inv.phi1;
        r.phi2 = inv.phi2;
        r.phi3 = inv.phi3;
        ok = ok && std::isfinite(r.phi1 + r.phi2 + r.phi3);
    }
    r.valid = ok;
    return r;
}

double relative_drift(const std::vector<DiagnosticRecord>& recs, Quantity q) {
    if (recs.empty()) return 0.0;
    auto get = [q](const DiagnosticRecord& r) {
        switch (q) {
            case Quantity::V: return r.V;
            case Quantity::F: return r.F;
            case Quantity::Phi1: return r.phi1;
            case Quantity::Phi2: return r.phi2;
            case Quantity::Phi3: return r.phi3;
            case Quantity::Phi4: return r.phi4;
        }
        return kNaN;
    };
    const double q0 = get(recs.front());
    double worst = 0.0;
    for (const auto& r : recs) worst = std::max(worst, std::abs(get(r) - q0));
    return q0 == 0.0 ? worst : worst / std::abs(q0);
}

MixedNorms mixed_norms(const Trajectory& traj, double r, double T, int component) {
    if (!(T >= 0.0)) throw InvalidArgument("mixed norm horizon must be >= 0");
    if (component != 0 && component != 1) throw InvalidArgument("component must be 0 or 1");
    if (!(r >= 0.0)) throw InvalidArgument("mixed norms need r >= 0");
    std::vector<const State*> sel;
    const double slack = 1e-9 * std::max(1.0, T);
    for (const auto& s : traj.states)
        if (std::abs(s.t) <= T + slack) sel.push_back(&s);
    MixedNorms out;
    if (sel.empty()) return out;
    const GridSpec& g = traj.grid();
    const int n = g.n;
    std::vector<double> t;
    std::vector<double> sup_ux4;
    RVec sup_u2 = RVec::Zero(n), int_dr = RVec::Zero(n), int_ux = RVec::Zero(n);
    std::vector<RVec> dr_sq, ux_sq;
    for (const State* s : sel) {
        const SpectralField& f = component == 0 ? s->u : s->v;
        t.push_back(s->t);
        out.max_sobolev = std::max(out.max_sobolev, sobolev_norm(f, r));
        const SpectralField fx = spectral_derivative(f, 1);
        const RVec ux = inverse(fx);
        const RVec dr = inverse(fractional_derivative(fx, r));
        const RVec u = inverse(f);
        sup_ux4.push_back(std::pow(ux.cwiseAbs().maxCoeff(), 4));
        sup_u2 = sup_u2.cwiseMax(u.cwiseAbs2());
        dr_sq.push_back(dr.cwiseAbs2());
        ux_sq.push_back(ux.cwiseAbs2());
    }
    // Time integrals per x by trapezoid.
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double w = 0.5 * (t[i] - t[i - 1]);
        int_dr += w * (dr_sq[i] + dr_sq[i - 1]);
        int_ux += w * (ux_sq[i] + ux_sq[i - 1]);
    }
    out.l4t_linfx_ux = std::pow(trapezoid(t, sup_ux4), 0.25);
    out.linfx_l2t_dr_ux = std::sqrt(int_dr.maxCoeff());
    out.linfx_l2t_ux = std::sqrt(int_ux.maxCoeff());
    out.unweighted_l2linf = std::sqrt(sup_u2.sum() * g.dx());
    out.weighted_l2x_linft = out.unweighted_l2linf / std::sqrt(1.0 + T);
    return out;
}

}  // namespace ckdv

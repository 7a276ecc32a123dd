#include "ckdv/bourgain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ckdv/cutoff.hpp"
#include "ckdv/error.hpp"
#include "ckdv/parallel.hpp"
#include "fft.hpp"

namespace ckdv {

namespace {

constexpr double pi = std::numbers::pi;
const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * pi);

double br(double x) { return bracket(x); }

int fft_mode(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

void check_box(int nx, int nt, double Lx, double Lt) {
    if (nx < 2 || nt < 2 || nx % 2 || nt % 2) throw InvalidArgument("space-time grid sizes must be even and >= 2");
    if (!(Lx > 0.0) || !(Lt > 0.0)) throw InvalidArgument("space-time periods must be positive");
}

/// Applies the t-transform in place to every row: row(m) -> (-1)^m (h/sqrt(2 pi)) DFT_m.
void transform_rows(Eigen::MatrixXcd& M, double Lt) {
    const int nt = static_cast<int>(M.cols());
    const double scale = Lt / nt * inv_sqrt_2pi;
    CVec in(nt), out;
    for (Eigen::Index k = 0; k < M.rows(); ++k) {
        in = M.row(k).transpose();
        detail::dft(out, in);
        for (int m = 0; m < nt; ++m) M(k, m) = (m % 2 ? -scale : scale) * out[m];
    }
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// Linear-interpolated quantile of sorted data (numpy's default rule).
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size()) return sorted.back();
    const double f = pos - static_cast<double>(i);
    return sorted[i] + f * (sorted[i + 1] - sorted[i]);
}

/// Tabulated transforms of the cutoff psi and of psi^2 on a fine sigma grid.
struct CutoffTables {
    std::vector<double> sigma, psi_hat, psi_sq_hat;
    double dsigma = 0.0;

    CutoffTables() {
        const double L = 256.0;
        const int n = 1 << 17;
        const double h = L / n;
        CVec a(n), b(n), fa, fb;
        for (int j = 0; j < n; ++j) {
            const double p = psi_cutoff(-0.5 * L + j * h);
            a[j] = p;
            b[j] = p * p;
        }
        detail::dft(fa, a);
        detail::dft(fb, b);
        dsigma = 2.0 * pi / L;
        sigma.resize(n);
        psi_hat.resize(n);
        psi_sq_hat.resize(n);
        // Sorted order: sigma = (j - n/2) dsigma. Both functions are real and even.
        for (int j = 0; j < n; ++j) {
            const int m = j - n / 2;
            const int idx = m < 0 ? m + n : m;
            const double sgn = (m % 2) ? -1.0 : 1.0;
            sigma[j] = m * dsigma;
            psi_hat[j] = sgn * h * inv_sqrt_2pi * fa[idx].real();
            psi_sq_hat[j] = sgn * h * inv_sqrt_2pi * fb[idx].real();
        }
    }

    double psi_sq_hat_at(double x) const {
        const double pos = x / dsigma + static_cast<double>(sigma.size() / 2);
        if (pos <= 0.0 || pos >= static_cast<double>(sigma.size() - 1)) return 0.0;
        const auto i = static_cast<std::size_t>(pos);
        const double f = pos - static_cast<double>(i);
        return psi_sq_hat[i] + f * (psi_sq_hat[i + 1] - psi_sq_hat[i]);
    }
};

const CutoffTables& cutoff_tables() {
    static const CutoffTables tables;
    return tables;
}

void check_embedding_args(double a, double a0, double a1, double b) {
    if (!(b >= 0.0)) throw InvalidArgument("embedding requires b >= 0");
    if (a0 == a1) throw InvalidArgument("embedding requires a0 != a1");
    if (a == 0.0 || a0 == 0.0 || a1 == 0.0) throw InvalidArgument("embedding requires nonzero dispersion parameters");
}

}  // namespace

double SpaceTimeField::dxi() const { return 2.0 * pi / period_x; }
double SpaceTimeField::dtau() const { return 2.0 * pi / period_t; }
double SpaceTimeField::xi(int i) const { return dxi() * fft_mode(i, nx()); }
double SpaceTimeField::tau(int m) const { return dtau() * fft_mode(m, nt()); }

SpaceTimeField space_time_transform(const Eigen::MatrixXcd& samples, double period_x, double period_t) {
    const int nx = static_cast<int>(samples.rows()), nt = static_cast<int>(samples.cols());
    check_box(nx, nt, period_x, period_t);
    Eigen::MatrixXcd rows(nx, nt);
    const double scale = period_x / nx * inv_sqrt_2pi;
    CVec in(nx), out;
    for (int m = 0; m < nt; ++m) {
        in = samples.col(m);
        detail::dft(out, in);
        for (int k = 0; k < nx; ++k) rows(k, m) = (k % 2 ? -scale : scale) * out[k];
    }
    return time_transform(rows, period_x, period_t);
}

SpaceTimeField time_transform(const Eigen::MatrixXcd& rows, double period_x, double period_t) {
    check_box(static_cast<int>(rows.rows()), static_cast<int>(rows.cols()), period_x, period_t);
    SpaceTimeField F{rows, period_x, period_t};
    transform_rows(F.coeffs, period_t);
    return F;
}

double weighted_norm(const SpaceTimeField& F, double a, double s, double b) {
    double acc = 0.0;
    for (int k = 0; k < F.nx(); ++k) {
        const double xi = F.xi(k);
        const double c = a * xi * xi * xi;
        double row = 0.0;
        if (b == 0.0) {
            row = F.coeffs.row(k).squaredNorm();
        } else {
            for (int m = 0; m < F.nt(); ++m) row += std::pow(br(F.tau(m) + c), 2.0 * b) * std::norm(F.coeffs(k, m));
        }
        acc += (s == 0.0 ? 1.0 : std::pow(br(xi), 2.0 * s)) * row;
    }
    return std::sqrt(acc * F.dxi() * F.dtau());
}

double xsb_norm(const SpaceTimeField& F, const NormParams& p) {
    if (p.a == 0.0) throw InvalidArgument("xsb_norm requires a != 0");
    return weighted_norm(F, p.a, p.s, p.b);
}

SpaceTimeField cutoff_free_evolution(const SpectralField& u0, double a, const TimeGrid& tg, double T) {
    const GridSpec& g = u0.grid;
    Eigen::MatrixXcd rows(g.n, tg.n);
    for (int m = 0; m < tg.n; ++m) {
        const double t = tg.t(m);
        const double w = psi_cutoff(t, T);
        for (int k = 0; k < g.n; ++k) {
            const double xi = g.wavenumber(k);
            rows(k, m) = w == 0.0 ? cplx(0.0) : w * std::polar(1.0, -a * t * xi * xi * xi) * u0.coeffs[k];
        }
    }
    return time_transform(rows, g.period, tg.period);
}

SpaceTimeField random_space_time_field(int nx, int nt, double period_x, double period_t, std::mt19937_64& rng) {
    check_box(nx, nt, period_x, period_t);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> scale(0.5, 8.0);
    const double lx = scale(rng), lt = 4.0 * scale(rng);
    SpaceTimeField F{Eigen::MatrixXcd(nx, nt), period_x, period_t};
    for (int k = 0; k < nx; ++k)
        for (int m = 0; m < nt; ++m) {
            const double env = std::exp(-std::abs(F.xi(k)) / lx - std::abs(F.tau(m)) / lt);
            F.coeffs(k, m) = env * cplx(normal(rng), normal(rng));
        }
    return F;
}

LatticeScan pointwise_scan(double a, double a0, double a1, int n_x, int n_tau, double x_max, double tau_max) {
    check_embedding_args(a, a0, a1, 0.0);
    if (n_x < 2 || n_tau < 2) throw InvalidArgument("pointwise_scan needs at least two points per axis");
    LatticeScan r;
    r.bound = pointwise_bound(a, a0, a1);
    for (int i = 0; i < n_x; ++i) {
        const double x = -x_max + 2.0 * x_max * i / (n_x - 1);
        for (int j = 0; j < n_tau; ++j) {
            const double tau = -tau_max + 2.0 * tau_max * j / (n_tau - 1);
            const double q = pointwise_ratio(x, tau, a, a0, a1);
            r.max_ratio = std::max(r.max_ratio, q);
            if (q > r.bound) ++r.violations;
            ++r.points;
        }
    }
    r.pass = r.violations == 0;
    return r;
}

FwScan f_w_scan(double w_max, int n) {
    if (n < 2) throw InvalidArgument("f_w_scan needs at least two points");
    FwScan r;
    r.plateau_min = 1.0;
    for (int i = 0; i < n; ++i) {
        const double w = -w_max + 2.0 * w_max * i / (n - 1);
        const double f = f_w(w);
        r.max_value = std::max(r.max_value, f);
        if (std::abs(w) <= 1.0) r.plateau_min = std::min(r.plateau_min, f);
        ++r.points;
    }
    return r;
}

double embedding_constant(double a, double a0, double a1, double b) {
    check_embedding_args(a, a0, a1, b);
    const double c = std::pow(pointwise_bound(a, a0, a1), b);
    return b >= 0.5 ? c * std::pow(2.0, b) : c;
}

EmbeddingCheck embedding_check(const SpaceTimeField& F, double a, double a0, double a1, double s, double b) {
    EmbeddingCheck r;
    r.constant = embedding_constant(a, a0, a1, b);
    r.lhs = xsb_norm(F, {a, s, b, 0.0});
    r.rhs = xsb_norm(F, {a0, s, b, 0.0}) + xsb_norm(F, {a1, s, b, 0.0});
    r.pass = r.lhs <= r.constant * r.rhs;
    return r;
}

IntersectionRatio intersection_ratio(const SpaceTimeField& F, std::array<double, 2> first,
                                     std::array<double, 2> second, double s, double b) {
    const auto [a0, a1] = first;
    const auto [c0, c1] = second;
    IntersectionRatio r;
    r.upper = embedding_constant(c0, a0, a1, b) + embedding_constant(c1, a0, a1, b);
    r.lower = 1.0 / (embedding_constant(a0, c0, c1, b) + embedding_constant(a1, c0, c1, b));
    const double num = xsb_norm(F, {c0, s, b, 0.0}) + xsb_norm(F, {c1, s, b, 0.0});
    const double den = xsb_norm(F, {a0, s, b, 0.0}) + xsb_norm(F, {a1, s, b, 0.0});
    r.ratio = den == 0.0 ? 0.0 : num / den;
    r.pass = den == 0.0 || (r.ratio >= r.lower && r.ratio <= r.upper);
    return r;
}

NonequivalenceReport nonequivalence_demo(double a0, double a1, double s, double b, const std::vector<double>& radii,
                                         const QuadOptions& quad) {
    if (!(b > 0.5)) throw HypothesisViolation("nonequivalence", "b > 1/2");
    if (a0 == 0.0 || a1 == 0.0) throw InvalidArgument("nonequivalence requires nonzero dispersion parameters");
    if (radii.size() < 2) throw InvalidArgument("nonequivalence needs at least two radii");
    NonequivalenceReport rep;
    // Weight in xi after combining <xi>^{2s} with |v^|^2.
    double xi_power = 0.0;
    if (s > 0.5 - b) {
        rep.construction = 1;
        xi_power = -2.0 * b;
    } else if (s >= -1.5 && s <= 0.0) {
        rep.construction = 2;
        rep.d = (6.0 * b - 1.0) / 2.0;
        xi_power = 2.0 * s - rep.d;
    } else {
        throw HypothesisViolation("nonequivalence", "s > 1/2 - b or -3/2 <= s <= 0");
    }

    // Odd antiderivative of (1 + |x|)^{-2b}.
    auto antider = [b](double x) {
        const double v = (1.0 - std::pow(1.0 + std::abs(x), 1.0 - 2.0 * b)) / (2.0 * b - 1.0);
        return x < 0.0 ? -v : v;
    };

    auto truncated = [&](double a, double R) {
        std::vector<double> bps;
        for (double c : {a, a1})
            for (double side : {-1.0, 1.0}) {
                const double x = std::cbrt(side * R / c);
                if (x > 0.0 && x < R) bps.push_back(x);
            }
        auto inner = [&](double xi) {
            const double c1 = a1 * xi * xi * xi;
            if (a == a1) return antider(R + c1) - antider(-R + c1);
            const double c = a * xi * xi * xi;
            auto g = [&](double tau) { return std::pow(br(tau + c), 2.0 * b) * std::pow(br(tau + c1), -4.0 * b); };
            return integrate(g, -R, R, {-c, -c1}, quad).value;
        };
        auto outer = [&](double xi) { return std::pow(br(xi), xi_power) * inner(xi); };
        // The integrand is even in xi (xi -> -xi with tau -> -tau).
        return std::sqrt(2.0 * integrate(outer, 0.0, R, bps, quad).value);
    };

    rep.rows.resize(radii.size());
    parallel_for(radii.size(), [&](std::size_t i) {
        rep.rows[i].R = radii[i];
        rep.rows[i].norm_a1 = truncated(a1, radii[i]);
        rep.rows[i].norm_a0 = a0 == a1 ? rep.rows[i].norm_a1 : truncated(a0, radii[i]);
    });

    std::vector<double> lx, ly;
    rep.a0_increasing = true;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        lx.push_back(std::log(rep.rows[i].R));
        ly.push_back(std::log(rep.rows[i].norm_a0));
        if (i > 0 && !(rep.rows[i].norm_a0 > rep.rows[i - 1].norm_a0)) rep.a0_increasing = false;
    }
    rep.growth_exponent = least_squares_slope(lx, ly);
    const auto& last = rep.rows.back();
    const auto& prev = rep.rows[rep.rows.size() - 2];
    rep.a1_last_change = std::abs(last.norm_a1 - prev.norm_a1) / last.norm_a1;
    return rep;
}

FreeEvolutionRatio free_evolution_ratio(const SpectralField& u0, double a, double s, double b, const TimeGrid& tg) {
    FreeEvolutionRatio r;
    r.lhs = xsb_norm(cutoff_free_evolution(u0, a, tg), {a, s, b, 0.0});
    double acc = 0.0;
    for (int k = 0; k < u0.grid.n; ++k) acc += std::pow(br(u0.grid.wavenumber(k)), 2.0 * s) * std::norm(u0.coeffs[k]);
    r.rhs = std::sqrt(acc * u0.grid.dxi());
    r.ratio = r.rhs == 0.0 ? 0.0 : r.lhs / r.rhs;
    return r;
}

ConstancyReport free_evolution_constancy(const std::vector<SpectralField>& data, double a, double s, double b,
                                         const TimeGrid& tg) {
    if (data.empty()) throw InvalidArgument("free_evolution_constancy needs at least one field");
    ConstancyReport rep;
    rep.ratios.resize(data.size());
    parallel_for(data.size(), [&](std::size_t i) { rep.ratios[i] = free_evolution_ratio(data[i], a, s, b, tg).ratio; });
    const double n = static_cast<double>(rep.ratios.size());
    rep.mean = std::accumulate(rep.ratios.begin(), rep.ratios.end(), 0.0) / n;
    double var = 0.0;
    for (double r : rep.ratios) var += (r - rep.mean) * (r - rep.mean);
    rep.cv = rep.mean == 0.0 ? 0.0 : std::sqrt(var / n) / rep.mean;
    return rep;
}

Eigen::MatrixXcd duhamel_rows(const Eigen::MatrixXcd& forcing, const GridSpec& grid, double a, double T,
                              const TimeGrid& tg) {
    if (forcing.rows() != grid.n || forcing.cols() != tg.n) throw InvalidArgument("forcing shape does not match grids");
    const int n0 = tg.n / 2;  // t = 0 sits on the grid
    const double h = tg.dt();
    Eigen::MatrixXcd out(grid.n, tg.n);
    std::vector<cplx> g(tg.n), c(tg.n);
    for (int k = 0; k < grid.n; ++k) {
        const double xi = grid.wavenumber(k);
        const double w = a * xi * xi * xi;
        for (int m = 0; m < tg.n; ++m) g[m] = std::polar(1.0, w * tg.t(m)) * forcing(k, m);
        c[n0] = 0.0;
        for (int m = n0 + 1; m < tg.n; ++m) c[m] = c[m - 1] + 0.5 * h * (g[m] + g[m - 1]);
        for (int m = n0 - 1; m >= 0; --m) c[m] = c[m + 1] - 0.5 * h * (g[m] + g[m + 1]);
        for (int m = 0; m < tg.n; ++m) out(k, m) = psi_cutoff(tg.t(m), T) * std::polar(1.0, -w * tg.t(m)) * c[m];
    }
    return out;
}

DuhamelReport duhamel_exponent(const SpectralField& phi, double a, double s, double b, double b_prime,
                               const std::vector<double>& Ts, double sigma, const TimeGrid& tg) {
    if (!(b_prime > -0.5 && b_prime <= 0.0 && b >= 0.0 && b <= b_prime + 1.0))
        throw HypothesisViolation("duhamel", "-1/2 < b' <= 0 <= b <= b' + 1");
    if (Ts.size() < 2) throw InvalidArgument("duhamel_exponent needs at least two T values");
    for (double T : Ts)
        if (!(T > 0.0 && T <= 1.0)) throw HypothesisViolation("duhamel", "0 < T <= 1");
    const GridSpec& g = phi.grid;
    DuhamelReport rep;
    rep.target = b_prime + 1.0 - b;
    rep.rows.resize(Ts.size());
    parallel_for(Ts.size(), [&](std::size_t i) {
        const double T = Ts[i];
        Eigen::MatrixXcd F(g.n, tg.n);
        for (int m = 0; m < tg.n; ++m) {
            const double t = tg.t(m);
            const cplx mod = psi_cutoff(t, T) * std::polar(1.0, sigma * t / T);
            for (int k = 0; k < g.n; ++k) {
                const double xi = g.wavenumber(k);
                F(k, m) = mod * std::polar(1.0, -a * t * xi * xi * xi) * phi.coeffs[k];
            }
        }
        const Eigen::MatrixXcd D = duhamel_rows(F, g, a, T, tg);
        DuhamelRow& row = rep.rows[i];
        row.T = T;
        row.lhs = xsb_norm(time_transform(D, g.period, tg.period), {a, s, b, 0.0});
        row.rhs = xsb_norm(time_transform(F, g.period, tg.period), {a, s, b_prime, 0.0});
        row.ratio = row.rhs == 0.0 ? 0.0 : row.lhs / row.rhs;
    });
    std::vector<double> lx, ly;
    for (const auto& r : rep.rows) {
        lx.push_back(std::log(r.T));
        ly.push_back(std::log(r.ratio));
    }
    rep.exponent = least_squares_slope(lx, ly);
    return rep;
}

double epsilon_s(double s, PairKind kind) {
    if (!(s > -0.75)) throw InvalidArgument("epsilon_s requires s > -3/4");
    auto low = [kind](double x) {
        return kind == PairKind::SameSign ? std::min(-x - 0.5, x + 5.0 / 6.0) : std::min(-x - 0.5, x / 3.0 + 0.25);
    };
    if (s >= 0.0) return kind == PairKind::SameSign ? 0.25 : 0.5;
    if (s >= -0.5) return low(-5.0 / 8.0);
    return low(s);
}

bool bilinear_admissible(double s, double b, double b_prime, PairKind kind) {
    if (!(s > -0.75)) return false;
    return b_prime > -0.5 && b_prime < 0.0 && b > 0.5 && b <= b_prime + 1.0 && b_prime + 1.0 - b <= epsilon_s(s, kind);
}

double cutoff_weight(double b) {
    const CutoffTables& tb = cutoff_tables();
    double acc = 0.0;
    for (std::size_t j = 0; j < tb.sigma.size(); ++j) acc += std::pow(br(tb.sigma[j]), 2.0 * b) * tb.psi_hat[j] * tb.psi_hat[j];
    return acc * tb.dsigma;
}

double bilinear_ratio_for(const Eigen::VectorXcd& u0, const Eigen::VectorXcd& v0, double s, double b,
                          double b_prime, double a_left, double a_right, double a_out, const BilinearOptions& opt) {
    if (u0.size() != v0.size() || u0.size() % 2) throw InvalidArgument("bilinear inputs must share an even length");
    const CutoffTables& tb = cutoff_tables();
    const int M = static_cast<int>(u0.size() / 2);
    const double dxi = opt.dxi;
    auto xi_in = [&](int k) { return (k + 0.5) * dxi; };  // k in [-M, M)

    const double cb = cutoff_weight(b);
    auto in_norm = [&](const Eigen::VectorXcd& c) {
        double acc = 0.0;
        for (int k = -M; k < M; ++k) acc += std::pow(br(xi_in(k)), 2.0 * s) * std::norm(c[k + M]);
        return std::sqrt(acc * dxi * cb);
    };
    const double nu = in_norm(u0), nv = in_norm(v0);
    if (nu == 0.0 || nv == 0.0) return 0.0;

    const double W = opt.window, dtau = opt.dtau;
    std::vector<std::pair<double, cplx>> centres;
    std::vector<cplx> S;
    double total = 0.0;
    // Sum of two midpoint frequencies lands on the integer lattice m dxi.
    for (int m = -2 * M + 1; m < 2 * M; ++m) {
        if (m == 0) continue;
        const double x = m * dxi;
        centres.clear();
        for (int k1 = -M; k1 < M; ++k1) {
            const int k2 = m - 1 - k1;
            if (k2 < -M || k2 >= M) continue;
            const double x1 = xi_in(k1), x2 = xi_in(k2);
            const double omega = a_left * x1 * x1 * x1 + a_right * x2 * x2 * x2;
            centres.emplace_back(-omega, u0[k1 + M] * v0[k2 + M]);
        }
        std::sort(centres.begin(), centres.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
        const double shift = a_out * x * x * x;
        double acc = 0.0;
        std::size_t i = 0;
        while (i < centres.size()) {
            std::size_t j = i;
            while (j + 1 < centres.size() && centres[j + 1].first - centres[j].first < 2.0 * W) ++j;
            const double lo = centres[i].first - W;
            const auto npts = static_cast<std::size_t>(std::ceil((centres[j].first + W - lo) / dtau));
            S.assign(npts, cplx(0.0));
            for (std::size_t q = i; q <= j; ++q) {
                const double c = centres[q].first;
                const cplx p = centres[q].second;
                const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((c - W - lo) / dtau)));
                const auto last = std::min(npts, static_cast<std::size_t>(std::ceil((c + W - lo) / dtau)) + 1);
                for (std::size_t r = first; r < last; ++r) S[r] += p * tb.psi_sq_hat_at(lo + r * dtau - c);
            }
            for (std::size_t r = 0; r < npts; ++r)
                acc += std::pow(br(lo + r * dtau + shift), 2.0 * b_prime) * std::norm(S[r]);
            i = j + 1;
        }
        total += dxi * x * x * std::pow(br(x), 2.0 * s) * acc * dtau * dxi * dxi / (2.0 * pi);
    }
    return std::sqrt(total) / (nu * nv);
}

BilinearResult bilinear_ratio(double s, double b, double b_prime, double a_left, double a_right, double a_out,
                              int band, const BilinearOptions& opt) {
    if (opt.trials < 1) throw InvalidArgument("bilinear_ratio needs at least one trial");
    if (band < 1 || !(opt.dxi > 0.0)) throw InvalidArgument("bilinear_ratio needs a positive band and lattice step");
    BilinearResult res;
    const PairKind kind = a_left == a_right ? PairKind::SameSign : PairKind::Mixed;
    res.admissible = bilinear_admissible(s, b, b_prime, kind);
    const int M = static_cast<int>(std::lround(band / opt.dxi));
    std::vector<double> ratios(opt.trials);
    parallel_for(static_cast<std::size_t>(opt.trials), [&](std::size_t t) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(t)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal;
        auto draw = [&] {
            Eigen::VectorXcd c(2 * M);
            for (int k = -M; k < M; ++k) {
                const double xi = (k + 0.5) * opt.dxi;
                const double re = normal(rng), im = normal(rng);
                c[k + M] = cplx(re, im) * (std::sqrt(0.5) * std::pow(br(xi), -s - opt.envelope));
            }
            return c;
        };
        const Eigen::VectorXcd u = draw();
        const Eigen::VectorXcd v = draw();
        ratios[t] = bilinear_ratio_for(u, v, s, b, b_prime, a_left, a_right, a_out, opt);
    });
    for (double r : ratios)
        if (r > 0.0) res.ratios.push_back(r);
    std::vector<double> sorted = res.ratios;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty()) res.max_ratio = sorted.back();
    res.q10 = quantile(sorted, 0.1);
    res.median = quantile(sorted, 0.5);
    res.q90 = quantile(sorted, 0.9);
    return res;
}

MembershipNorms cutoff_data_norms(const SpectralField& u0, double s, double b, const TimeGrid& tg) {
    const SpaceTimeField F = cutoff_free_evolution(u0, 0.0, tg);
    return {xsb_norm(F, {1.0, s, b, 0.0}), xsb_norm(F, {-1.0, s, b, 0.0})};
}

double cutoff_data_membership(const SpectralField& u0, double s, double b, const TimeGrid& tg) {
    const MembershipNorms n = cutoff_data_norms(u0, s, b, tg);
    return std::max(n.x_plus, n.x_minus);
}

MembershipReport membership_ladder(const std::function<double(double)>& u0_hat, double period, int n0, int rungs,
                                   double s, double b, TimeGrid tg, double tol) {
    if (rungs < 2) throw InvalidArgument("membership_ladder needs at least two rungs");
    MembershipReport rep;
    int n = n0;
    for (int r = 0; r < rungs; ++r, n *= 2, tg.n *= 2) {
        const GridSpec g = make_grid(n, period);
        SpectralField u0(g);
        for (int k = 0; k < n; ++k) u0.coeffs[k] = u0_hat(g.wavenumber(k));
        const MembershipNorms m = cutoff_data_norms(u0, s, b, tg);
        rep.rungs.push_back({n, m.x_plus, m.x_minus});
    }
    const auto& last = rep.rungs.back();
    const auto& prev = rep.rungs[rep.rungs.size() - 2];
    auto rel = [](double x, double y) { return x == 0.0 ? std::abs(y) : std::abs(x - y) / std::abs(x); };
    rep.last_change = std::max(rel(last.x_plus, prev.x_plus), rel(last.x_minus, prev.x_minus));
    rep.stable = rep.last_change < tol;
    return rep;
}

}  // namespace ckdv

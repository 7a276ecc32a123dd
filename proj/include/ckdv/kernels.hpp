#pragma once

#include <string>
#include <vector>

#include "ckdv/quadrature.hpp"

namespace ckdv {

/// One-dimensional reduced forms of the kernel bounds used by the bilinear
/// estimates. Each kernel is evaluated at a point of two outer variables:
///   L3_2a: (a, eta)     |a||eta| \int dx / (1 + |a||x^2 - eta^2|)^{2b}
///   L3_2b: (a, a')      (1 + |a - a'|)^alpha \int dx / ((1 + |x - a'|)^alpha (1 + |x - a|)^beta)
///   L3_3:  (xi, y)      |xi|^{3-4s} <xi^3(y+2)>^{2b'} <xi>^{2s} |y+2|^{-2s} \int dx / <xi^3(y + 3/4 - x^2)>^{2b}
///   L3_4:  (xi, y)      |xi|^3 (1 + |xi|^3 |3y+2|)^{2b'} \int dx / (1 + |xi|^3 |y + 1/4 - x^2|)^{2b}
///   L3_5:  (xi, y)      |xi|^{3-4s} <xi^3(y+2)>^{2b'} <xi>^{2s} \int_{E_y} |x^2 - 1/4|^{-2s} dx / <xi^3(y + 3/4 - 3x^2)>^{2b},
///                       E_y = {|y + 3/4 - 3x^2| <= 2|y+2|}
///   L3_6:  (xi1, tau1)  <tau1 - xi1^3>^{-b} (\int_B |xi|^{2+2s} |xi xi1 (xi - xi1)|^{-2s} <xi>^{2s} <mu>^{2b'} dxi)^{1/2},
///                       mu = tau1 + 2xi^3 - xi1^3 - 3 xi xi1 (xi - xi1), B = {|xi - xi1| >= 1, |mu| <= 2|tau1 - xi1^3|}
///   L3_7:  (xi, z)      |xi|^3 (1 + |xi|^3 |z+2|)^{2b'} \int dx / (1 + |xi|^3 |z + 3(x - x^2) + 2x^3|)^{2b}
///   L3_8:  (xi, y)      |xi|^{3-2s} <xi^3(y+2)>^{2b'} \int_{D_y} |x - x^2|^{-2s} dx / <xi^3(y + 3(x - x^2) + 2x^3)>^{2b},
///                       D_y = {|y + 3(x - x^2) + 2x^3| <= 2|y+2|}
///   L3_9:  (xi1, tau1)  as L3_6 with <tau1 + xi1^3>^{-b} and B = {|xi - xi1| >= 1, |mu| <= 2|tau1 + xi1^3|}
///   L3_10: (xi, y)      |xi|^{3-2s} <xi^3 y>^{2b'} \int_{E_y} |x - x^2|^{-2s} dx / <xi^3(y - 3(x - x^2) - 2x^3)>^{2b},
///                       E_y = {|y - 3(x - x^2) - 2x^3| <= 2|y|}
///   L3_11: (xi1, tau1)  as L3_6 with mu = tau1 + 3 xi xi1 (xi - xi1) + xi1^3
/// The (xi1, tau1) kernels vanish for |xi1| < 1.
enum class KernelId { L3_2a, L3_2b, L3_3, L3_4, L3_5, L3_6, L3_7, L3_8, L3_9, L3_10, L3_11 };

const std::vector<KernelId>& all_kernels();
std::string kernel_name(KernelId id);
/// Parses names as produced by kernel_name; throws InvalidArgument otherwise.
KernelId kernel_from_name(const std::string& name);

struct KernelParams {
    double s = 0.0;
    double b = 0.6;
    double b_prime = -0.4;
    double alpha = 1.0;
    double beta = 2.0;
};

struct KernelPoint {
    double u = 0.0;
    double v = 0.0;
};

struct KernelQuad {
    QuadOptions quad{1e-9, 0.0, 20000, 1};
    /// Starting half-width of unbounded inner integrals; it is doubled until
    /// the power-law tail estimate drops below tail_tol times the value.
    double x_max = 16.0;
    double tail_tol = 1e-6;
};

/// Throws HypothesisViolation naming the first failed constraint.
void check_kernel_hypotheses(KernelId id, const KernelParams& p);

/// Parameter set inside the hypotheses used for the reference checks.
KernelParams reference_params(KernelId id);

/// Default outer sample grid for the kernel.
std::vector<KernelPoint> default_samples(KernelId id);

double kernel_value(KernelId id, const KernelParams& p, KernelPoint pt, const KernelQuad& q = {});

struct KernelCheck {
    KernelId id = KernelId::L3_2a;
    double max_value = 0.0;
    double max_refined = 0.0;
    double rel_change = 0.0;
    bool stable = false;
    KernelPoint argmax;
    long samples = 0;
};

/// Max of the kernel over the samples, recomputed with doubled initial
/// panels, halved tolerance and doubled starting truncation; stable iff the
/// relative change of the max is below stability_tol.
KernelCheck kernel_bound_check(KernelId id, const KernelParams& p, const std::vector<KernelPoint>& samples,
                               const KernelQuad& q = {}, double stability_tol = 0.05);

}  // namespace ckdv

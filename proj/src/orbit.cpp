#include "orbitplan/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace orbitplan {

namespace {

// Stumpff functions C(psi) and S(psi). Series near zero avoids the
// cancellation in the closed forms.
struct Stumpff {
    double c;
    double s;
};

Stumpff stumpff(double psi) {
    if (std::abs(psi) < 1.0) {
        double c = 0.0;
        double s = 0.0;
        double term_c = 0.5;        // 1/2!
        double term_s = 1.0 / 6.0;  // 1/3!
        for (int k = 0; k < 12; ++k) {
            c += term_c;
            s += term_s;
            term_c *= -psi / static_cast<double>((2 * k + 3) * (2 * k + 4));
            term_s *= -psi / static_cast<double>((2 * k + 4) * (2 * k + 5));
        }
        return {c, s};
    }
    if (psi > 0.0) {
        const double x = std::sqrt(psi);
        const double half = std::sin(0.5 * x);
        return {2.0 * half * half / psi, (x - std::sin(x)) / (psi * x)};
    }
    const double x = std::sqrt(-psi);
    return {(std::cosh(x) - 1.0) / -psi, (std::sinh(x) - x) / (-psi * x)};
}

void check_not_degenerate(const StateVector& s) {
    const double r = s.position.norm();
    if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(s.velocity.norm())) {
        throw DegenerateOrbit("state vector has zero or non-finite position");
    }
    const double h = angular_momentum(s).norm();
    if (h <= kDegenerateTolerance * r * s.velocity.norm()) {
        throw DegenerateOrbit("rectilinear state: |r x v| below tolerance");
    }
}

// Solves the universal Kepler equation for chi given dt > 0. Newton steps
// that leave the current bracket fall back to bisection (or doubling while
// no upper bound is known).
double solve_universal_anomaly(double r0, double rv0, double alpha, double dt, double mu) {
    const double sqmu = std::sqrt(mu);
    const double radial = rv0 / sqmu;
    const double shape = 1.0 - alpha * r0;

    auto residual = [&](double chi, double& deriv) {
        const double chi2 = chi * chi;
        const double psi = alpha * chi2;
        const auto [c, s] = stumpff(psi);
        deriv = radial * chi * (1.0 - psi * s) + shape * chi2 * c + r0;
        return radial * chi2 * c + shape * chi2 * chi * s + r0 * chi - sqmu * dt;
    };

    double chi = 0.0;
    if (alpha * r0 > 1e-9) {
        chi = sqmu * alpha * dt;
    } else if (alpha * r0 < -1e-9) {
        const double a = 1.0 / alpha;
        const double arg = (-2.0 * mu * alpha * dt) / (rv0 + std::sqrt(-mu * a) * shape);
        chi = arg > 0.0 ? std::sqrt(-a) * std::log(arg) : sqmu * dt / r0;
    } else {
        chi = sqmu * dt / r0;
    }
    if (!(chi > 0.0) || !std::isfinite(chi)) chi = sqmu * dt / r0;

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kKeplerMaxIterations; ++iter) {
        double deriv = 0.0;
        const double f = residual(chi, deriv);
        if (!std::isfinite(f)) {
            hi = std::min(hi, chi);
            chi = 0.5 * (lo + hi);
            continue;
        }
        if (f < 0.0) {
            lo = std::max(lo, chi);
        } else {
            hi = std::min(hi, chi);
        }
        double next = chi - f / deriv;
        if (!(next > lo && next < hi)) {
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * std::max(chi, lo) + 1.0;
        }
        const double step = next - chi;
        chi = next;
        if (std::abs(step) < kKeplerTolerance * std::max(1.0, std::abs(chi))) {
            return chi;
        }
    }
    throw KeplerNonConvergence(
        fmt::format("universal Kepler solve did not converge in {} iterations (dt={} s)",
                    kKeplerMaxIterations, dt));
}

}  // namespace

void GravModel::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("sim.mu_km3_s2 must be positive");
    if (!(min_periapsis > 0.0)) throw std::invalid_argument("sim.min_periapsis_km must be positive");
}

double wrap_two_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative number can round up to exactly 2pi.
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double specific_energy(const StateVector& s, const GravModel& g) {
    return 0.5 * s.velocity.squared_norm() - g.mu / s.position.norm();
}

double orbital_period(double semi_major_axis, const GravModel& g) {
    if (!(semi_major_axis > 0.0)) {
        throw std::invalid_argument("orbital period requires a positive semi-major axis");
    }
    return kTwoPi * std::sqrt(semi_major_axis * semi_major_axis * semi_major_axis / g.mu);
}

KeplerianElements elements_from_state(const StateVector& s, const GravModel& g) {
    check_not_degenerate(s);

    const Vec3& rv = s.position;
    const Vec3& vv = s.velocity;
    const double r = rv.norm();
    const double v2 = vv.squared_norm();
    const double rdotv = dot(rv, vv);

    const Vec3 h = cross(rv, vv);
    const double hmag = h.norm();
    const Vec3 h_hat = h / hmag;
    const double p = hmag * hmag / g.mu;

    const Vec3 e_vec = ((v2 - g.mu / r) * rv - rdotv * vv) / g.mu;
    const double e = e_vec.norm();
    if (std::abs(e - 1.0) < kParabolicTolerance) {
        throw ParabolicUnsupported(fmt::format("parabolic orbit (e={})", e));
    }

    KeplerianElements k;
    k.eccentricity = e;
    k.semi_major_axis = 1.0 / (2.0 / r - v2 / g.mu);
    k.inclination = std::atan2(std::hypot(h.x, h.y), h.z);

    const Vec3 node{-h.y, h.x, 0.0};
    const double node_mag = node.norm();
    const bool equatorial = node_mag <= kEquatorialTolerance * hmag;
    const Vec3 node_hat = equatorial ? Vec3{1.0, 0.0, 0.0} : node / node_mag;
    k.raan = equatorial ? 0.0 : wrap_two_pi(std::atan2(node.y, node.x));

    // Argument of latitude (or true longitude when equatorial).
    const double u = std::atan2(dot(cross(node_hat, rv), h_hat), dot(node_hat, rv));

    if (e <= kCircularTolerance) {
        k.arg_periapsis = 0.0;
        k.true_anomaly = wrap_two_pi(u);
    } else {
        // e cos(nu) = p/r - 1 and e sin(nu) = sqrt(p/mu) (r.v) / r keep nu
        // well conditioned for small eccentricity.
        const double nu = std::atan2(std::sqrt(p / g.mu) * rdotv, p - r);
        k.true_anomaly = wrap_two_pi(nu);
        k.arg_periapsis = wrap_two_pi(u - nu);
    }
    return k;
}

StateVector state_from_elements(const KeplerianElements& k, const GravModel& g) {
    const double e = k.eccentricity;
    if (!(e >= 0.0) || !std::isfinite(e)) {
        throw std::invalid_argument("eccentricity must be finite and non-negative");
    }
    if (std::abs(e - 1.0) < kParabolicTolerance) {
        throw ParabolicUnsupported(fmt::format("parabolic orbit (e={})", e));
    }
    if (e < 1.0 && !(k.semi_major_axis > 0.0)) {
        throw std::invalid_argument("elliptic orbit requires a positive semi-major axis");
    }
    if (e > 1.0 && !(k.semi_major_axis < 0.0)) {
        throw std::invalid_argument("hyperbolic orbit requires a negative semi-major axis");
    }
    if (!(k.inclination >= 0.0 && k.inclination <= std::numbers::pi)) {
        throw std::invalid_argument("inclination must lie in [0, pi]");
    }

    const double cos_nu = std::cos(k.true_anomaly);
    const double sin_nu = std::sin(k.true_anomaly);
    const double denom = 1.0 + e * cos_nu;
    if (!(denom > 0.0)) {
        throw std::invalid_argument("true anomaly lies beyond the hyperbolic asymptote");
    }

    const double p = k.semi_latus_rectum();
    const double r = p / denom;
    const double vscale = std::sqrt(g.mu / p);
    const double xp = r * cos_nu;
    const double yp = r * sin_nu;
    const double vxp = -vscale * sin_nu;
    const double vyp = vscale * (e + cos_nu);

    const double co = std::cos(k.raan);
    const double so = std::sin(k.raan);
    const double cw = std::cos(k.arg_periapsis);
    const double sw = std::sin(k.arg_periapsis);
    const double ci = std::cos(k.inclination);
    const double si = std::sin(k.inclination);

    const double r11 = co * cw - so * sw * ci;
    const double r12 = -co * sw - so * cw * ci;
    const double r21 = so * cw + co * sw * ci;
    const double r22 = -so * sw + co * cw * ci;
    const double r31 = sw * si;
    const double r32 = cw * si;

    StateVector s;
    s.position = {r11 * xp + r12 * yp, r21 * xp + r22 * yp, r31 * xp + r32 * yp};
    s.velocity = {r11 * vxp + r12 * vyp, r21 * vxp + r22 * vyp, r31 * vxp + r32 * vyp};
    return s;
}

StateVector propagate(const StateVector& s, double dt, const GravModel& g) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("propagation interval must be finite and non-negative");
    }
    check_not_degenerate(s);
    if (dt == 0.0) return s;

    const Vec3& r0v = s.position;
    const Vec3& v0v = s.velocity;
    const double r0 = r0v.norm();
    const double rv0 = dot(r0v, v0v);
    const double alpha = 2.0 / r0 - v0v.squared_norm() / g.mu;

    // Whole revolutions of a closed orbit are the identity map.
    double tof = dt;
    if (alpha > 0.0) {
        const double period = kTwoPi / (std::sqrt(g.mu) * alpha * std::sqrt(alpha));
        if (tof >= period) tof = std::fmod(tof, period);
        if (tof == 0.0) {
            StateVector out = s;
            out.epoch += dt;
            return out;
        }
    }

    const double chi = solve_universal_anomaly(r0, rv0, alpha, tof, g.mu);
    const double chi2 = chi * chi;
    const double sqmu = std::sqrt(g.mu);
    const auto [c, sf] = stumpff(alpha * chi2);

    const double psi = alpha * chi2;

    const double f = 1.0 - chi2 / r0 * c;
    // Equals tof - chi^3 S / sqrt(mu) via the Kepler equation, without the
    // cancellation that form suffers on long hyperbolic arcs.
    const double gcoef = (rv0 / sqmu * chi2 * c + r0 * chi * (1.0 - psi * sf)) / sqmu;
    const Vec3 r1v = f * r0v + gcoef * v0v;
    const double r1 = r1v.norm();
    const double fdot = sqmu / (r1 * r0) * chi * (psi * sf - 1.0);
    const double gdot = 1.0 - chi2 / r1 * c;

    StateVector out;
    out.position = r1v;
    out.velocity = fdot * r0v + gdot * v0v;
    out.epoch = s.epoch + dt;
    return out;
}

StateVector apply_impulse(const StateVector& s, const Vec3& direction, double dv) {
    if (std::abs(direction.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("impulse direction must be a unit vector");
    }
    if (!(dv >= 0.0)) throw std::invalid_argument("impulse magnitude must be non-negative");
    StateVector out = s;
    out.velocity += dv * direction;
    return out;
}

}  // namespace orbitplan

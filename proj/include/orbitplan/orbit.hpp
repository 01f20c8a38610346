#pragma once

// Two-body kernel: element/state conversions, universal-variable conic
// propagation and impulsive velocity changes. All angles are radians.

#include <numbers>
#include <stdexcept>
#include <string>

#include "orbitplan/vec3.hpp"

namespace orbitplan {

inline constexpr double kEarthMu = 398600.4418;          // km^3/s^2
inline constexpr double kEarthRadius = 6378.137;         // km
inline constexpr double kDefaultMinPeriapsis = 6578.0;   // km, 200 km altitude
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Eccentricities closer than this to 1 are treated as parabolic.
inline constexpr double kParabolicTolerance = 1e-8;
// Below these ratios an orbit is considered circular / equatorial and the
// undefined angles are pinned to zero.
inline constexpr double kCircularTolerance = 1e-11;
inline constexpr double kEquatorialTolerance = 1e-11;
// |r x v| <= kDegenerateTolerance * |r| |v| is rectilinear motion.
inline constexpr double kDegenerateTolerance = 1e-12;

inline constexpr int kKeplerMaxIterations = 50;
inline constexpr double kKeplerTolerance = 1e-12;

class OrbitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateOrbit : public OrbitError {
public:
    using OrbitError::OrbitError;
};

class ParabolicUnsupported : public OrbitError {
public:
    using OrbitError::OrbitError;
};

class KeplerNonConvergence : public OrbitError {
public:
    using OrbitError::OrbitError;
};

struct GravModel {
    double mu = kEarthMu;                        // km^3/s^2
    double min_periapsis = kDefaultMinPeriapsis; // km

    // Throws std::invalid_argument unless mu > 0 and min_periapsis > 0.
    void validate() const;

    friend bool operator==(const GravModel&, const GravModel&) = default;
};

struct StateVector {
    Vec3 position;      // km
    Vec3 velocity;      // km/s
    double epoch = 0.0; // s since simulation start

    friend bool operator==(const StateVector&, const StateVector&) = default;
};

struct KeplerianElements {
    double semi_major_axis = 0.0;  // km, negative for hyperbolic orbits
    double eccentricity = 0.0;
    double inclination = 0.0;      // [0, pi]
    double raan = 0.0;             // [0, 2pi)
    double arg_periapsis = 0.0;    // [0, 2pi)
    double true_anomaly = 0.0;     // [0, 2pi)

    // Semi-latus rectum, km.
    double semi_latus_rectum() const {
        return semi_major_axis * (1.0 - eccentricity * eccentricity);
    }
    // Periapsis radius, km. Valid for both ellipses and hyperbolas.
    double periapsis_radius() const { return semi_latus_rectum() / (1.0 + eccentricity); }

    friend bool operator==(const KeplerianElements&, const KeplerianElements&) = default;
};

// Wraps an angle into [0, 2pi).
double wrap_two_pi(double angle);

// Classical elements of a state. Circular orbits report arg_periapsis = 0 with
// the true anomaly measured from the ascending node; equatorial orbits report
// raan = 0 with the node direction taken as +x.
KeplerianElements elements_from_state(const StateVector& s, const GravModel& g);

// Inverse of elements_from_state, using the same singular-angle conventions.
// The returned epoch is zero.
StateVector state_from_elements(const KeplerianElements& k, const GravModel& g);

// Exact two-body propagation by `dt` seconds (dt >= 0) using the universal
// variable form of Kepler's equation.
StateVector propagate(const StateVector& s, double dt, const GravModel& g);

// Adds dv * direction to the velocity. Position and epoch are untouched.
StateVector apply_impulse(const StateVector& s, const Vec3& direction, double dv);

// v^2/2 - mu/r, km^2/s^2.
double specific_energy(const StateVector& s, const GravModel& g);

// r x v, km^2/s.
inline Vec3 angular_momentum(const StateVector& s) { return cross(s.position, s.velocity); }

// Orbital period for a > 0, seconds.
double orbital_period(double semi_major_axis, const GravModel& g);

}  // namespace orbitplan

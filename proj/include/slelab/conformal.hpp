#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace slelab {

using Complex = std::complex<double>;

// Bounded hulls attached to the real line whose half-plane maps we know in
// closed form (the tilted slit needs one Newton inversion for the forward
// direction).  Angles are in radians, theta in (0, pi).
struct HullSpec {
  enum class Kind { none, vertical_slit, half_disk, tilted_slit };

  Kind kind = Kind::none;
  double x0 = 0.0;
  double size = 0.0;   // slit height, disk radius, or slit length
  double theta = 0.0;  // tilted slit only

  static HullSpec none() { return {}; }
  static HullSpec vertical_slit(double x0, double h);
  static HullSpec half_disk(double x0, double r);
  static HullSpec tilted_slit(double x0, double length, double theta);

  // compact grammar: slit:x0,h | halfdisk:x0,r | tilt:x0,l,theta
  static HullSpec parse(const std::string& text);
  std::string to_string() const;

  double hcap() const;
  double rad() const;  // sup |z| over the hull
  bool empty() const { return kind == Kind::none || size <= 0.0; }

  bool contains(Complex z) const;   // closed hull membership
  double distance(Complex z) const; // Euclidean distance to the hull
};

// g_K(z): H minus hull -> H with g(z) = z + hcap/z + O(1/z^2)
Complex slit_map(const HullSpec& hull, Complex z);

// f_K = g_K^{-1}: H -> H minus hull
Complex slit_map_inverse(const HullSpec& hull, Complex w);

struct MapJet {
  Complex f, fp, fpp, fppp;
};

// value and first three derivatives of the hydrodynamically normalized map
// Phi = g_K at z (z away from the hull)
MapJet hull_map_jet(const HullSpec& hull, Complex z);

Complex schwarzian(const MapJet& jet);

// Sf(z) for a map given only as a callable, via centered difference stencils.
// step h scales with max(1, |z|).
Complex schwarzian(const std::function<Complex(Complex)>& f, Complex z,
                   double h_scale = 3e-3);

// Poisson kernel of the upper half-plane at boundary point x, z = u + iy
double poisson_kernel_h(double x, Complex z);

// Poisson kernel of the half-infinite strip {x > 0, 0 < y < pi} at the left
// boundary point i*yprime, via the separated sinh/sin series
double excursion_kernel_strip(Complex z, double yprime, int terms);

// Truncated real power series F(z) = sum c[n] z^n (plain coefficients).
struct PowerSeries {
  std::vector<double> c;

  PowerSeries() = default;
  explicit PowerSeries(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  int order() const { return static_cast<int>(c.size()) - 1; }
  double eval(double z) const;
  Complex eval(Complex z) const;
  PowerSeries derivative() const;
};

// generator of the conjugated Loewner flow on locally real maps:
// (Lambda F)(z) = F'(0)^2 / (F(z) - F(0)) - F'(z)/z, as a series of order
// order(F) - 2.  Requires c[1] > 0.
PowerSeries lambda_flow(const PowerSeries& f);

// parameters of the tilted-slit elementary map for one driving step:
// the inverse step map H -> H minus slit is
//   f(w) = u_prev + (v + p)^(1-alpha) (v - q)^alpha,  v = w - u_prev - du,
// with hcap = a*dt exactly.
struct TiltedStep {
  double alpha, p, q, du;
};
TiltedStep tilted_step_params(double a, double dt, double du);

// centered tilted map G(v) = (v - du + p)^(1-alpha) (v - du - q)^alpha and its
// log-derivative jet; G maps H onto H minus a slit rooted at 0.
Complex tilted_map(const TiltedStep& s, Complex v);
Complex tilted_map_deriv(const TiltedStep& s, Complex v);
// Newton inversion of tilted_map; initial guess from the vertical-slit map
Complex tilted_map_inverse(const TiltedStep& s, Complex target);

// sqrt branch continuous on the upper half-plane with sqrt_h(z^2+A) ~ z
Complex sqrt_shifted(Complex z, double A);

}  // namespace slelab

#include "slelab/conformal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace slelab {

namespace {
constexpr double kPi = std::numbers::pi;
}

HullSpec HullSpec::vertical_slit(double x0, double h) {
  if (h < 0.0) throw std::domain_error("vertical_slit: height must be >= 0");
  return {Kind::vertical_slit, x0, h, 0.0};
}

HullSpec HullSpec::half_disk(double x0, double r) {
  if (r < 0.0) throw std::domain_error("half_disk: radius must be >= 0");
  return {Kind::half_disk, x0, r, 0.0};
}

HullSpec HullSpec::tilted_slit(double x0, double length, double theta) {
  if (length < 0.0) throw std::domain_error("tilted_slit: length must be >= 0");
  if (!(theta > 0.0 && theta < kPi))
    throw std::domain_error("tilted_slit: theta must be in (0, pi)");
  return {Kind::tilted_slit, x0, length, theta};
}

HullSpec HullSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("hull spec: expected kind:args, got '" + text + "'");
  std::string kind = text.substr(0, colon);
  std::vector<double> args;
  std::stringstream ss(text.substr(colon + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size())
      throw std::invalid_argument("hull spec: bad number '" + tok + "'");
    args.push_back(v);
  }
  if (kind == "slit" && args.size() == 2) return vertical_slit(args[0], args[1]);
  if (kind == "halfdisk" && args.size() == 2) return half_disk(args[0], args[1]);
  if (kind == "tilt" && args.size() == 3)
    return tilted_slit(args[0], args[1], args[2]);
  throw std::invalid_argument("hull spec: unknown form '" + text + "'");
}

std::string HullSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::vertical_slit:
      os << "slit:" << x0 << "," << size;
      break;
    case Kind::half_disk:
      os << "halfdisk:" << x0 << "," << size;
      break;
    case Kind::tilted_slit:
      os << "tilt:" << x0 << "," << size << "," << theta;
      break;
  }
  return os.str();
}

double HullSpec::hcap() const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::vertical_slit:
      return size * size / 2.0;
    case Kind::half_disk:
      return size * size;
    case Kind::tilted_slit: {
      double alpha = theta / kPi;
      double s = size / (std::pow(1.0 - alpha, 1.0 - alpha) * std::pow(alpha, alpha));
      return alpha * (1.0 - alpha) * s * s / 2.0;
    }
  }
  return 0.0;
}

double HullSpec::rad() const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::vertical_slit:
      return std::hypot(x0, size);
    case Kind::half_disk:
      return std::fabs(x0) + size;
    case Kind::tilted_slit:
      return std::max(std::fabs(x0),
                      std::abs(Complex(x0, 0.0) + size * std::polar(1.0, theta)));
  }
  return 0.0;
}

namespace {

double dist_to_segment(Complex z, Complex a, Complex b) {
  Complex ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  double t = ((z - a).real() * ab.real() + (z - a).imag() * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace

bool HullSpec::contains(Complex z) const {
  if (empty()) return false;
  switch (kind) {
    case Kind::none:
      return false;
    case Kind::vertical_slit:
      return distance(z) < 1e-14;
    case Kind::half_disk:
      return z.imag() >= 0.0 && std::abs(z - Complex(x0, 0.0)) <= size;
    case Kind::tilted_slit:
      return distance(z) < 1e-14;
  }
  return false;
}

double HullSpec::distance(Complex z) const {
  switch (kind) {
    case Kind::none:
      return std::numeric_limits<double>::infinity();
    case Kind::vertical_slit:
      return dist_to_segment(z, Complex(x0, 0.0), Complex(x0, size));
    case Kind::half_disk: {
      if (z.imag() >= 0.0) {
        double d = std::abs(z - Complex(x0, 0.0)) - size;
        return d > 0.0 ? d : 0.0;
      }
      // below the line: distance to the base diameter
      return dist_to_segment(z, Complex(x0 - size, 0.0), Complex(x0 + size, 0.0));
    }
    case Kind::tilted_slit:
      return dist_to_segment(z, Complex(x0, 0.0),
                             Complex(x0, 0.0) + size * std::polar(1.0, theta));
  }
  return std::numeric_limits<double>::infinity();
}

Complex sqrt_shifted(Complex z, double A) {
  // sqrt(z^2 + A) with the branch that is ~ z at infinity and maps
  // H minus the slit i(0, sqrt(A)] into H
  if (z == Complex(0.0, 0.0)) return Complex(0.0, std::sqrt(A));
  return z * std::sqrt(1.0 + A / (z * z));
}

TiltedStep tilted_step_params(double a, double dt, double du) {
  if (!(a > 0.0) || !(dt > 0.0))
    throw std::domain_error("tilted_step_params: need a > 0, dt > 0");
  double s2 = 8.0 * a * dt + du * du;
  double s = std::sqrt(s2);
  double beta = du / s;
  double alpha = 0.5 * (1.0 - beta);
  return {alpha, (1.0 - alpha) * s, alpha * s, du};
}

Complex tilted_map(const TiltedStep& st, Complex v) {
  Complex A = v - st.du + st.p;
  Complex B = v - st.du - st.q;
  if (A == Complex(0, 0) || B == Complex(0, 0)) return Complex(0, 0);
  return std::exp((1.0 - st.alpha) * std::log(A) + st.alpha * std::log(B));
}

Complex tilted_map_deriv(const TiltedStep& st, Complex v) {
  Complex A = v - st.du + st.p;
  Complex B = v - st.du - st.q;
  return tilted_map(st, v) * ((1.0 - st.alpha) / A + st.alpha / B);
}

Complex tilted_map_inverse(const TiltedStep& st, Complex target) {
  // the map commutes with conjugation (real parameters); fold the lower
  // half-plane onto the upper one
  if (target.imag() < 0.0)
    return std::conj(tilted_map_inverse(st, std::conj(target)));
  // vertical-slit guess, exact when du = 0
  Complex v = st.du + sqrt_shifted(target, st.p * st.q);
  for (int it = 0; it < 60; ++it) {
    Complex g = tilted_map(st, v) - target;
    if (std::abs(g) < 1e-14 * (1.0 + std::abs(target))) return v;
    Complex gp = tilted_map_deriv(st, v);
    if (gp == Complex(0, 0)) break;
    Complex step = g / gp;
    // keep the iterate in the closed upper half-plane
    Complex next = v - step;
    int halvings = 0;
    while (next.imag() < -1e-13 && halvings < 50) {
      step *= 0.5;
      next = v - step;
      ++halvings;
    }
    v = next;
  }
  Complex g = tilted_map(st, v) - target;
  if (std::abs(g) > 1e-9 * (1.0 + std::abs(target)))
    throw std::runtime_error("tilted_map_inverse: Newton failed to converge");
  return v;
}

namespace {

// boundary evaluation is fine (arcs map into R); only the open interior is out
void require_outside(const HullSpec& hull, Complex z) {
  if (hull.kind == HullSpec::Kind::half_disk && !hull.empty() &&
      z.imag() > 0.0 && std::abs(z - Complex(hull.x0, 0.0)) < hull.size * (1.0 - 1e-12))
    throw std::domain_error("slit_map: point inside the hull");
}

}  // namespace

Complex slit_map(const HullSpec& hull, Complex z) {
  require_outside(hull, z);
  switch (hull.kind) {
    case HullSpec::Kind::none:
      return z;
    case HullSpec::Kind::vertical_slit: {
      if (hull.empty()) return z;
      Complex w = z - hull.x0;
      return hull.x0 + sqrt_shifted(w, hull.size * hull.size);
    }
    case HullSpec::Kind::half_disk: {
      if (hull.empty()) return z;
      Complex w = z - hull.x0;
      return hull.x0 + w + hull.size * hull.size / w;
    }
    case HullSpec::Kind::tilted_slit: {
      if (hull.empty()) return z;
      double alpha = hull.theta / kPi;
      double s =
          hull.size / (std::pow(1.0 - alpha, 1.0 - alpha) * std::pow(alpha, alpha));
      TiltedStep st{alpha, (1.0 - alpha) * s, alpha * s, (1.0 - 2.0 * alpha) * s};
      return hull.x0 + tilted_map_inverse(st, z - hull.x0);
    }
  }
  return z;
}

Complex slit_map_inverse(const HullSpec& hull, Complex w) {
  switch (hull.kind) {
    case HullSpec::Kind::none:
      return w;
    case HullSpec::Kind::vertical_slit: {
      if (hull.empty()) return w;
      Complex v = w - hull.x0;
      return hull.x0 + sqrt_shifted(v, -hull.size * hull.size);
    }
    case HullSpec::Kind::half_disk: {
      if (hull.empty()) return w;
      Complex v = w - hull.x0;
      // root of u + r^2/u = v in H: u = (v + sqrt(v^2 - 4 r^2)) / 2
      Complex root = sqrt_shifted(v, -4.0 * hull.size * hull.size);
      return hull.x0 + 0.5 * (v + root);
    }
    case HullSpec::Kind::tilted_slit: {
      if (hull.empty()) return w;
      double alpha = hull.theta / kPi;
      double s =
          hull.size / (std::pow(1.0 - alpha, 1.0 - alpha) * std::pow(alpha, alpha));
      TiltedStep st{alpha, (1.0 - alpha) * s, alpha * s, (1.0 - 2.0 * alpha) * s};
      return hull.x0 + tilted_map(st, w - hull.x0);
    }
  }
  return w;
}

MapJet hull_map_jet(const HullSpec& hull, Complex z) {
  require_outside(hull, z);
  if (!hull.empty() && hull.distance(z) < 1e-12)
    throw std::domain_error("hull_map_jet: point in the hull closure");
  MapJet j;
  switch (hull.kind) {
    case HullSpec::Kind::none:
      return {z, 1.0, 0.0, 0.0};
    case HullSpec::Kind::vertical_slit: {
      if (hull.empty()) return {z, 1.0, 0.0, 0.0};
      double h2 = hull.size * hull.size;
      Complex w = z - hull.x0;
      Complex g = sqrt_shifted(w, h2);
      j.f = hull.x0 + g;
      j.fp = w / g;
      j.fpp = h2 / (g * g * g);
      j.fppp = -3.0 * h2 * w / (g * g * g * g * g);
      return j;
    }
    case HullSpec::Kind::half_disk: {
      if (hull.empty()) return {z, 1.0, 0.0, 0.0};
      double r2 = hull.size * hull.size;
      Complex w = z - hull.x0;
      j.f = z + r2 / w;
      j.fp = 1.0 - r2 / (w * w);
      j.fpp = 2.0 * r2 / (w * w * w);
      j.fppp = -6.0 * r2 / (w * w * w * w);
      return j;
    }
    case HullSpec::Kind::tilted_slit: {
      if (hull.empty()) return {z, 1.0, 0.0, 0.0};
      double alpha = hull.theta / kPi;
      double s =
          hull.size / (std::pow(1.0 - alpha, 1.0 - alpha) * std::pow(alpha, alpha));
      TiltedStep st{alpha, (1.0 - alpha) * s, alpha * s, (1.0 - 2.0 * alpha) * s};
      Complex v = tilted_map_inverse(st, z - hull.x0);
      // inverse-function jet: z = G(v), Phi = G^{-1}
      Complex A = v - st.du + st.p;
      Complex B = v - st.du - st.q;
      Complex G = tilted_map(st, v);
      Complex l1 = (1.0 - st.alpha) / A + st.alpha / B;
      Complex l2 = -(1.0 - st.alpha) / (A * A) - st.alpha / (B * B);
      Complex l3 = 2.0 * (1.0 - st.alpha) / (A * A * A) + 2.0 * st.alpha / (B * B * B);
      Complex Gp = G * l1;
      Complex Gpp = G * (l2 + l1 * l1);
      Complex Gppp = G * (l3 + 3.0 * l1 * l2 + l1 * l1 * l1);
      j.f = hull.x0 + v;
      j.fp = 1.0 / Gp;
      j.fpp = -Gpp / (Gp * Gp * Gp);
      j.fppp = (3.0 * Gpp * Gpp - Gp * Gppp) / std::pow(Gp, 5);
      return j;
    }
  }
  return {z, 1.0, 0.0, 0.0};
}

Complex schwarzian(const MapJet& jet) {
  if (jet.fp == Complex(0, 0))
    throw std::domain_error("schwarzian: f'(z) = 0");
  Complex r = jet.fpp / jet.fp;
  return jet.fppp / jet.fp - 1.5 * r * r;
}

Complex schwarzian(const std::function<Complex(Complex)>& f, Complex z,
                   double h_scale) {
  // 7-point centered stencils; wide enough steps keep the third derivative
  // above roundoff for analytic maps
  double h = (h_scale > 0.0 ? h_scale : 3e-3) * std::max(1.0, std::abs(z));
  Complex v[7];
  for (int k = -3; k <= 3; ++k) v[k + 3] = f(z + static_cast<double>(k) * h);
  Complex fp = (-v[0] + 9.0 * v[1] - 45.0 * v[2] + 45.0 * v[4] - 9.0 * v[5] + v[6]) /
               (60.0 * h);
  Complex fpp = (2.0 * v[0] - 27.0 * v[1] + 270.0 * v[2] - 490.0 * v[3] +
                 270.0 * v[4] - 27.0 * v[5] + 2.0 * v[6]) /
                (180.0 * h * h);
  Complex fppp =
      (v[0] - 8.0 * v[1] + 13.0 * v[2] - 13.0 * v[4] + 8.0 * v[5] - v[6]) /
      (8.0 * h * h * h);
  if (std::abs(fp) < 1e-12)
    throw std::domain_error("schwarzian: f'(z) vanishes");
  Complex r = fpp / fp;
  return fppp / fp - 1.5 * r * r;
}

double poisson_kernel_h(double x, Complex z) {
  double y = z.imag();
  if (!(y > 0.0)) throw std::domain_error("poisson_kernel_h: Im z must be > 0");
  double u = z.real();
  return y / (kPi * ((u - x) * (u - x) + y * y));
}

double excursion_kernel_strip(Complex z, double yprime, int terms) {
  double x = z.real(), y = z.imag();
  if (!(x > 0.0) || !(y > 0.0 && y < kPi))
    throw std::domain_error("excursion_kernel_strip: z outside the strip");
  if (!(yprime > 0.0 && yprime < kPi))
    throw std::domain_error("excursion_kernel_strip: boundary point outside (0,pi)");
  if (terms < 1) terms = 1;
  double sum = 0.0;
  for (int n = 1; n <= terms; ++n) {
    sum += std::exp(-n * x) * std::sin(n * y) * std::sin(n * yprime);
  }
  return 2.0 / kPi * sum;
}

double PowerSeries::eval(double z) const {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

Complex PowerSeries::eval(Complex z) const {
  Complex acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

PowerSeries PowerSeries::derivative() const {
  if (c.size() <= 1) return PowerSeries{{0.0}};
  std::vector<double> d(c.size() - 1);
  for (std::size_t n = 1; n < c.size(); ++n)
    d[n - 1] = static_cast<double>(n) * c[n];
  return PowerSeries{std::move(d)};
}

PowerSeries lambda_flow(const PowerSeries& f) {
  int N = f.order();
  if (N < 1 || f.c[1] <= 0.0)
    throw std::domain_error("lambda_flow: need c1 > 0");
  if (N < 3) return PowerSeries{{0.0}};
  // S(z) = (F(z) - c0)/z, R = 1/S, LambdaF_m = c1^2 R_{m+1} - (m+2) c_{m+2}
  std::vector<double> S(f.c.begin() + 1, f.c.end());  // length N
  std::vector<double> R(S.size(), 0.0);
  R[0] = 1.0 / S[0];
  for (std::size_t k = 1; k < S.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += S[j] * R[k - j];
    R[k] = -acc / S[0];
  }
  double c1sq = f.c[1] * f.c[1];
  std::vector<double> out(static_cast<std::size_t>(N - 1), 0.0);
  for (int m = 0; m <= N - 2; ++m)
    out[m] = c1sq * R[m + 1] - static_cast<double>(m + 2) * f.c[m + 2];
  return PowerSeries{std::move(out)};
}

}  // namespace slelab

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "jones2d/common.hpp"
#include "jones2d/material.hpp"

namespace jones {

enum class ModeFamily { shear, pressure, axis_shear };

inline const char* to_string(ModeFamily f) {
  switch (f) {
    case ModeFamily::shear: return "shear";
    case ModeFamily::pressure: return "pressure";
    default: return "axis_shear";
  }
}

/// One closed-form eigenvalue candidate on the rectangle [0,a]x[0,b].
struct SpectrumEntry {
  double omega2 = 0.0;
  ModeFamily family = ModeFamily::shear;
  int m = 0;
  int l = 0;
};

using VectorField = std::function<Vec2(const Vec2&)>;

/// Separated eigenfunction formulas for the zero-tangential-trace
/// problem on the rectangle: a divergence-free (shear) and a
/// curl-free (pressure) family. The pressure formula degenerates to
/// the zero field when m or l vanishes.
inline Vec2 evaluate_mode(const SpectrumEntry& e, double a, double b,
                          const Vec2& x) {
  const double al = std::numbers::pi * e.m / a;
  const double be = std::numbers::pi * e.l / b;
  const double cx = std::cos(al * x.x()), sx = std::sin(al * x.x());
  const double cy = std::cos(be * x.y()), sy = std::sin(be * x.y());
  switch (e.family) {
    case ModeFamily::shear:
      return Vec2(a * e.l * cx * sy, -b * e.m * sx * cy);
    case ModeFamily::pressure:
      return Vec2(b * e.m * cx * sy, a * e.l * sx * cy);
    case ModeFamily::axis_shear:
      // The nonzero limits of the separated families on one axis:
      // (sin(l pi y / b), 0) for m = 0 and (0, sin(m pi x / a)) for l = 0.
      if (e.m == 0) return Vec2(std::sin(be * x.y()), 0.0);
      return Vec2(0.0, std::sin(al * x.x()));
  }
  return Vec2::Zero();
}

inline VectorField mode_field(const SpectrumEntry& e, double a, double b) {
  return [e, a, b](const Vec2& x) { return evaluate_mode(e, a, b, x); };
}

/// The first k closed-form eigenvalues of the zero-tangential-trace
/// rectangle problem, merged ascending: shear values
/// mu pi^2 / rho (m^2/a^2 + l^2/b^2) for m, l >= 1 and pressure values
/// (lambda + 2 mu) pi^2 / rho (m^2/a^2 + l^2/b^2) for m, l >= 0 with
/// m + l > 0.
inline std::vector<SpectrumEntry> rectangle_tangential_spectrum(
    double a, double b, const MaterialParams& p, int k) {
  require(k >= 1, "spectrum size must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rho = p.rho.max_value();
  require(p.rho.is_constant(), "closed forms assume constant density");
  const auto value = [&](double coeff, int m, int l) {
    return coeff * pi2 / rho * (double(m) * m / (a * a) + double(l) * l / (b * b));
  };
  std::vector<SpectrumEntry> all;
  const int cap = static_cast<int>(std::ceil(std::sqrt(double(k)))) + k + 4;
  for (int m = 0; m <= cap; ++m)
    for (int l = 0; l <= cap; ++l) {
      if (m >= 1 && l >= 1)
        all.push_back({value(p.mu, m, l), ModeFamily::shear, m, l});
      if (m + l > 0)
        all.push_back({value(p.lambda + 2.0 * p.mu, m, l), ModeFamily::pressure, m, l});
    }
  std::sort(all.begin(), all.end(),
            [](const SpectrumEntry& x, const SpectrumEntry& y) {
              return x.omega2 < y.omega2;
            });
  require(static_cast<int>(all.size()) >= k, "spectrum enumeration too small");
  // Any omitted index pair exceeds the cap in m or l, hence this bound.
  const double omitted_lb =
      std::min(p.mu, p.lambda + 2.0 * p.mu) * pi2 / rho *
      (double(cap + 1) * (cap + 1) / std::max(a * a, b * b));
  require(all[k - 1].omega2 < omitted_lb, "spectrum enumeration cap too small");
  all.resize(k);
  return all;
}

// ---------------------------------------------------------------------------
// Finite-difference verification oracle. Fourth-order central stencils
// with step 1e-3 * min(a,b): the second-difference rounding floor
// (~eps/h^2) stays near 1e-9 while truncation stays below 1e-8 for the
// wavenumbers checked here, so residual gates at the 1e-8 level are
// meaningful.
// ---------------------------------------------------------------------------

struct FdOracle {
  double h;

  explicit FdOracle(double a, double b) : h(1e-3 * std::min(a, b)) {}

  static double d1(const std::function<double(double)>& f, double t, double h) {
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) /
           (12 * h);
  }

  static double d2(const std::function<double(double)>& f, double t, double h) {
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) -
            f(t - 2 * h)) /
           (12 * h * h);
  }

  Vec2 laplacian(const VectorField& u, const Vec2& x) const {
    Vec2 out;
    for (int c = 0; c < 2; ++c) {
      out[c] =
          d2([&](double t) { return u(Vec2(t, x.y()))[c]; }, x.x(), h) +
          d2([&](double t) { return u(Vec2(x.x(), t))[c]; }, x.y(), h);
    }
    return out;
  }

  double divergence(const VectorField& u, const Vec2& x) const {
    return d1([&](double t) { return u(Vec2(t, x.y()))[0]; }, x.x(), h) +
           d1([&](double t) { return u(Vec2(x.x(), t))[1]; }, x.y(), h);
  }

  Vec2 grad_divergence(const VectorField& u, const Vec2& x) const {
    return Vec2(
        d1([&](double t) { return divergence(u, Vec2(t, x.y())); }, x.x(), h),
        d1([&](double t) { return divergence(u, Vec2(x.x(), t)); }, x.y(), h));
  }

  Eigen::Matrix2d gradient(const VectorField& u, const Vec2& x) const {
    Eigen::Matrix2d g;
    for (int c = 0; c < 2; ++c) {
      g(c, 0) = d1([&](double t) { return u(Vec2(t, x.y()))[c]; }, x.x(), h);
      g(c, 1) = d1([&](double t) { return u(Vec2(x.x(), t))[c]; }, x.y(), h);
    }
    return g;
  }

  double curl(const VectorField& u, const Vec2& x) const {
    const Eigen::Matrix2d g = gradient(u, x);
    return g(1, 0) - g(0, 1);
  }

  /// mu Laplace(u) + (lambda + mu) grad(div u) + rho w^2 u
  Vec2 pde_residual(const VectorField& u, const MaterialParams& p, double rho,
                    double omega2, const Vec2& x) const {
    return p.mu * laplacian(u, x) +
           (p.lambda + p.mu) * grad_divergence(u, x) +
           rho * omega2 * u(x);
  }

  /// Cauchy traction sigma(u) n from finite-difference gradients.
  Vec2 traction(const VectorField& u, const MaterialParams& p, const Vec2& x,
                const Vec2& n) const {
    const Eigen::Matrix2d g = gradient(u, x);
    const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
    const Eigen::Matrix2d sig =
        2.0 * p.mu * eps + p.lambda * eps.trace() * Eigen::Matrix2d::Identity();
    return sig * n;
  }
};

/// Outcome of the verification pass for one closed-form candidate.
struct CandidateReport {
  SpectrumEntry entry;
  bool verified = false;
  std::string rejection;  // empty when verified
  double pde_residual = 0.0;
  double trace_residual = 0.0;
  double traction_residual = 0.0;
};

namespace detail {

inline std::vector<Vec2> interior_samples(double a, double b, int per_axis) {
  std::vector<Vec2> pts;
  for (int i = 1; i <= per_axis; ++i)
    for (int j = 1; j <= per_axis; ++j)
      pts.emplace_back(a * i / (per_axis + 1.0), b * j / (per_axis + 1.0));
  return pts;
}

struct EdgeSample {
  Vec2 x, normal;
};

inline std::vector<EdgeSample> edge_samples(double a, double b, int per_edge) {
  std::vector<EdgeSample> pts;
  for (int i = 1; i <= per_edge; ++i) {
    const double s = i / (per_edge + 1.0);
    pts.push_back({{a * s, 0.0}, {0.0, -1.0}});
    pts.push_back({{a * s, b}, {0.0, 1.0}});
    pts.push_back({{0.0, b * s}, {-1.0, 0.0}});
    pts.push_back({{a, b * s}, {1.0, 0.0}});
  }
  return pts;
}

/// Runs the shared verification gates. `full_traction` demands
/// sigma(u) n = 0 on the boundary (the normal-trace problem);
/// otherwise only the normal-normal component is required to vanish
/// (the natural condition of the tangential-trace weak form), and the
/// essential trace is the tangential one.
inline CandidateReport verify_candidate(const SpectrumEntry& e, double a,
                                        double b, const MaterialParams& p,
                                        bool full_traction) {
  CandidateReport rep;
  rep.entry = e;
  const VectorField u = mode_field(e, a, b);
  const FdOracle fd(a, b);
  const double rho = p.rho.constant_value();

  double scale = 0.0;
  const auto interior = interior_samples(a, b, 31);  // ~10^3 points
  for (const auto& x : interior) scale = std::max(scale, u(x).norm());
  if (scale < 1e-12) {
    rep.rejection = "zero field";
    return rep;
  }

  for (const auto& x : interior)
    rep.pde_residual = std::max(
        rep.pde_residual, fd.pde_residual(u, p, rho, e.omega2, x).norm());
  const double pde_tol = 1e-8 * std::max(rho * e.omega2, 1.0) * scale;
  if (rep.pde_residual > pde_tol) {
    rep.rejection = "interior equation residual " +
                    std::to_string(rep.pde_residual) + " exceeds " +
                    std::to_string(pde_tol);
    return rep;
  }

  const auto edges = edge_samples(a, b, 25);
  for (const auto& s : edges) {
    const Vec2 val = u(s.x);
    const double tr = full_traction
                          ? std::abs(val.dot(s.normal))
                          : (val - val.dot(s.normal) * s.normal).norm();
    rep.trace_residual = std::max(rep.trace_residual, tr);
  }
  if (rep.trace_residual > 1e-10 * scale) {
    rep.rejection = "boundary trace residual " +
                    std::to_string(rep.trace_residual);
    return rep;
  }

  const double k = std::numbers::pi *
                   std::sqrt(double(e.m) * e.m / (a * a) +
                             double(e.l) * e.l / (b * b));
  const double stress_scale = (2.0 * p.mu + std::abs(p.lambda)) *
                              std::max(k, 1.0) * scale;
  for (const auto& s : edges) {
    const Vec2 t = fd.traction(u, p, s.x, s.normal);
    const double tr = full_traction ? t.norm() : std::abs(t.dot(s.normal));
    rep.traction_residual = std::max(rep.traction_residual, tr);
  }
  if (rep.traction_residual > 1e-6 * stress_scale) {
    rep.rejection = "boundary traction residual " +
                    std::to_string(rep.traction_residual) + " exceeds " +
                    std::to_string(1e-6 * stress_scale);
    return rep;
  }
  rep.verified = true;
  return rep;
}

}  // namespace detail

/// Verification gate for a tangential-problem candidate: interior
/// equation, zero tangential trace, and zero normal-normal stress
/// (the natural condition of the weak form).
inline CandidateReport verify_tangential_candidate(const SpectrumEntry& e,
                                                   double a, double b,
                                                   const MaterialParams& p) {
  return detail::verify_candidate(e, a, b, p, false);
}

/// Candidate eigenpairs for the zero-normal-trace problem on the
/// rectangle: the separated families with the sine/cosine roles
/// swapped so u.n = 0 holds on all four edges. Every candidate must
/// pass an independent verification (interior equation, essential
/// trace, full traction-free condition); rejected candidates are
/// reported, and an empty verified list is a legal outcome.
struct JonesCandidateReport {
  std::vector<CandidateReport> verified;
  std::vector<CandidateReport> rejected;
};

inline Vec2 evaluate_jones_candidate(const SpectrumEntry& e, double a, double b,
                                     const Vec2& x) {
  const double al = std::numbers::pi * e.m / a;
  const double be = std::numbers::pi * e.l / b;
  const double cx = std::cos(al * x.x()), sx = std::sin(al * x.x());
  const double cy = std::cos(be * x.y()), sy = std::sin(be * x.y());
  if (e.family == ModeFamily::shear)
    return Vec2(a * e.l * sx * cy, -b * e.m * cx * sy);
  return Vec2(b * e.m * sx * cy, a * e.l * cx * sy);
}

inline JonesCandidateReport jones_rectangle_candidates(
    double a, double b, const MaterialParams& p, int max_index) {
  require(p.rho.is_constant(), "closed forms assume constant density");
  JonesCandidateReport rep;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rho = p.rho.constant_value();
  for (int m = 0; m <= max_index; ++m)
    for (int l = 0; l <= max_index; ++l) {
      if (m + l == 0) continue;
      const double ks = pi2 * (double(m) * m / (a * a) + double(l) * l / (b * b));
      for (ModeFamily fam : {ModeFamily::shear, ModeFamily::pressure}) {
        SpectrumEntry e;
        e.family = fam;
        e.m = m;
        e.l = l;
        e.omega2 = (fam == ModeFamily::shear ? p.mu : p.lambda + 2.0 * p.mu) *
                   ks / rho;
        CandidateReport out;
        out.entry = e;
        const VectorField u = [e, a, b](const Vec2& x) {
          return evaluate_jones_candidate(e, a, b, x);
        };
        // Reuse the shared gates by wrapping the candidate field.
        const FdOracle fd(a, b);
        double scale = 0.0;
        const auto interior = detail::interior_samples(a, b, 31);
        for (const auto& x : interior) scale = std::max(scale, u(x).norm());
        if (scale < 1e-12) {
          out.rejection = "zero field";
          rep.rejected.push_back(out);
          continue;
        }
        for (const auto& x : interior)
          out.pde_residual = std::max(
              out.pde_residual, fd.pde_residual(u, p, rho, e.omega2, x).norm());
        const double pde_tol = 1e-8 * std::max(rho * e.omega2, 1.0) * scale;
        if (out.pde_residual > pde_tol) {
          out.rejection = "interior equation residual";
          rep.rejected.push_back(out);
          continue;
        }
        const auto edges = detail::edge_samples(a, b, 25);
        for (const auto& s : edges)
          out.trace_residual =
              std::max(out.trace_residual, std::abs(u(s.x).dot(s.normal)));
        if (out.trace_residual > 1e-10 * scale) {
          out.rejection = "normal trace residual";
          rep.rejected.push_back(out);
          continue;
        }
        const double k = std::sqrt(ks);
        const double stress_scale =
            (2.0 * p.mu + std::abs(p.lambda)) * std::max(k, 1.0) * scale;
        for (const auto& s : edges)
          out.traction_residual = std::max(
              out.traction_residual, fd.traction(u, p, s.x, s.normal).norm());
        if (out.traction_residual > 1e-6 * stress_scale) {
          out.rejection = "traction residual " +
                          std::to_string(out.traction_residual) +
                          " exceeds " + std::to_string(1e-6 * stress_scale);
          rep.rejected.push_back(out);
          continue;
        }
        out.verified = true;
        rep.verified.push_back(out);
      }
    }
  return rep;
}

/// Generate-and-verify reference spectrum of the zero-tangential-trace
/// rectangle problem: the separated families plus their nonzero
/// single-axis limits, each admitted only after passing the interior
/// equation, essential trace, and natural boundary condition gates.
/// This is the trust anchor used when comparing computed spectra with
/// closed forms.
inline std::vector<CandidateReport> verified_tangential_spectrum(
    double a, double b, const MaterialParams& p, int k) {
  require(p.rho.is_constant(), "closed forms assume constant density");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rho = p.rho.constant_value();
  std::vector<SpectrumEntry> candidates;
  const int cap = k + 4;
  for (int m = 0; m <= cap; ++m)
    for (int l = 0; l <= cap; ++l) {
      if (m + l == 0) continue;
      const double ks =
          pi2 * (double(m) * m / (a * a) + double(l) * l / (b * b));
      if (m >= 1 && l >= 1) {
        candidates.push_back({p.mu * ks / rho, ModeFamily::shear, m, l});
        candidates.push_back(
            {(p.lambda + 2.0 * p.mu) * ks / rho, ModeFamily::pressure, m, l});
      } else {
        candidates.push_back({p.mu * ks / rho, ModeFamily::axis_shear, m, l});
      }
    }
  std::sort(candidates.begin(), candidates.end(),
            [](const SpectrumEntry& x, const SpectrumEntry& y) {
              return x.omega2 < y.omega2;
            });
  std::vector<CandidateReport> verified;
  for (const auto& e : candidates) {
    if (static_cast<int>(verified.size()) >= k) break;
    CandidateReport rep = detail::verify_candidate(e, a, b, p, false);
    if (rep.verified) verified.push_back(std::move(rep));
  }
  require(static_cast<int>(verified.size()) == k,
          "verified spectrum enumeration cap too small");
  return verified;
}

/// CSV export: family,m,l,omega2,multiplicity (values sharing a
/// cluster at relative gap 1e-6 report the cluster size).
inline void export_spectrum_csv(const std::vector<SpectrumEntry>& entries,
                                std::ostream& os) {
  os << "family,m,l,omega2,multiplicity\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    int mult = 1;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (i == j) continue;
      const double gap = std::abs(entries[i].omega2 - entries[j].omega2);
      if (gap <= 1e-6 * std::max(std::abs(entries[i].omega2), 1e-300)) ++mult;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", entries[i].omega2);
    os << to_string(entries[i].family) << "," << entries[i].m << ","
       << entries[i].l << "," << buf << "," << mult << "\n";
  }
}

}  // namespace jones

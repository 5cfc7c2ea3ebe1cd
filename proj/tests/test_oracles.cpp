#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "jones2d/oracles.hpp"

using namespace jones;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double pi = std::numbers::pi;
const MaterialParams kMat{1.0, 0.5, DensityField(1.0)};
}  // namespace

TEST_CASE("closed-form tangential table on the unit square") {
  const auto list = rectangle_tangential_spectrum(1, 1, kMat, 3);
  REQUIRE_THAT(list[0].omega2, WithinRel(2 * pi * pi, 1e-13));
  REQUIRE(list[0].family == ModeFamily::shear);
  REQUIRE_THAT(list[1].omega2, WithinRel(2.5 * pi * pi, 1e-13));
  REQUIRE(list[1].family == ModeFamily::pressure);
  REQUIRE_THAT(list[2].omega2, WithinRel(2.5 * pi * pi, 1e-13));
  REQUIRE(list[2].family == ModeFamily::pressure);
}

TEST_CASE("closed forms on an elongated rectangle") {
  const auto list = rectangle_tangential_spectrum(2, 1, kMat, 12);
  double smallest_shear = 1e300;
  for (const auto& e : list)
    if (e.family == ModeFamily::shear)
      smallest_shear = std::min(smallest_shear, e.omega2);
  REQUIRE_THAT(smallest_shear, WithinRel(1.25 * pi * pi, 1e-13));
}

TEST_CASE("pressure family grows with lambda, shear family does not") {
  const MaterialParams stiffer{1.0, 2.0, DensityField(1.0)};
  const auto base = rectangle_tangential_spectrum(1, 1, kMat, 10);
  const auto up = rectangle_tangential_spectrum(1, 1, stiffer, 10);
  for (const auto& e : base) {
    for (const auto& f : up) {
      if (e.family != f.family || e.m != f.m || e.l != f.l) continue;
      if (e.family == ModeFamily::pressure) REQUIRE(f.omega2 > e.omega2);
      else REQUIRE(f.omega2 == e.omega2);
    }
  }
}

TEST_CASE("mode formulas vanish appropriately on the boundary") {
  const SpectrumEntry shear{2 * pi * pi, ModeFamily::shear, 1, 1};
  REQUIRE(evaluate_mode(shear, 1, 1, Vec2(0, 0)).norm() == 0.0);

  const SpectrumEntry pressure{5 * pi * pi, ModeFamily::pressure, 1, 1};
  for (const auto& e : {shear, pressure}) {
    for (int i = 0; i <= 24; ++i) {
      const double s = i / 24.0;
      // Tangential components on the four edges.
      REQUIRE(std::abs(evaluate_mode(e, 1, 1, Vec2(s, 0.0)).x()) <= 1e-12);
      REQUIRE(std::abs(evaluate_mode(e, 1, 1, Vec2(s, 1.0)).x()) <= 1e-12);
      REQUIRE(std::abs(evaluate_mode(e, 1, 1, Vec2(0.0, s)).y()) <= 1e-12);
      REQUIRE(std::abs(evaluate_mode(e, 1, 1, Vec2(1.0, s)).y()) <= 1e-12);
    }
  }
}

TEST_CASE("shear modes are divergence free, pressure modes curl free") {
  const FdOracle fd(1, 1);
  for (int m = 1; m <= 3; ++m)
    for (int l = 1; l <= 3; ++l) {
      const SpectrumEntry s{0.0, ModeFamily::shear, m, l};
      const SpectrumEntry p{0.0, ModeFamily::pressure, m, l};
      const double k = pi * std::sqrt(double(m * m + l * l));
      for (const Vec2& x : {Vec2(0.37, 0.61), Vec2(0.11, 0.83), Vec2(0.5, 0.29)}) {
        const double scale = k * std::max(evaluate_mode(s, 1, 1, x).norm(), 1.0);
        REQUIRE(std::abs(fd.divergence(mode_field(s, 1, 1), x)) <= 1e-6 * scale);
        REQUIRE(std::abs(fd.curl(mode_field(p, 1, 1), x)) <= 1e-6 * scale);
      }
    }
}

TEST_CASE("closed forms satisfy the interior equation up to (3,3)") {
  const FdOracle fd(1, 1);
  for (int m = 1; m <= 3; ++m)
    for (int l = 1; l <= 3; ++l)
      for (ModeFamily fam : {ModeFamily::shear, ModeFamily::pressure}) {
        const double coeff = fam == ModeFamily::shear ? kMat.mu
                                                      : kMat.lambda + 2 * kMat.mu;
        const SpectrumEntry e{coeff * pi * pi * (m * m + l * l), fam, m, l};
        const VectorField u = mode_field(e, 1, 1);
        double worst = 0.0, scale = 0.0;
        for (const Vec2& x :
             {Vec2(0.3, 0.7), Vec2(0.52, 0.18), Vec2(0.81, 0.44)}) {
          worst = std::max(worst, fd.pde_residual(u, kMat, 1.0, e.omega2, x).norm());
          scale = std::max(scale, u(x).norm());
        }
        REQUIRE(worst <= 1e-6 * e.omega2 * std::max(scale, 1.0));
      }
}

TEST_CASE("verification gate accepts true eigenpairs and rejects corrupted ones") {
  const SpectrumEntry good{pi * pi, ModeFamily::axis_shear, 0, 1};
  const CandidateReport ok = verify_tangential_candidate(good, 1, 1, kMat);
  REQUIRE(ok.verified);

  SpectrumEntry bad = good;
  bad.omega2 *= 1.1;  // wrong eigenvalue: interior equation fails
  const CandidateReport rej = verify_tangential_candidate(bad, 1, 1, kMat);
  REQUIRE_FALSE(rej.verified);
  REQUIRE_THAT(rej.rejection, ContainsSubstring("interior"));
}

TEST_CASE("verified tangential spectrum of the unit square") {
  const auto refs = verified_tangential_spectrum(1, 1, kMat, 6);
  const double expect[] = {pi * pi,     pi * pi,     2 * pi * pi,
                           4 * pi * pi, 4 * pi * pi, 5 * pi * pi};
  for (int i = 0; i < 6; ++i)
    REQUIRE_THAT(refs[i].entry.omega2, WithinRel(expect[i], 1e-12));
  REQUIRE(refs[0].entry.family == ModeFamily::axis_shear);
  REQUIRE(refs[1].entry.family == ModeFamily::axis_shear);
  REQUIRE(refs[2].entry.family == ModeFamily::shear);
}

TEST_CASE("no separated normal-trace eigenpair survives verification on the rectangle") {
  const JonesCandidateReport rep = jones_rectangle_candidates(1, 1, kMat, 3);
  REQUIRE(rep.verified.empty());
  REQUIRE_FALSE(rep.rejected.empty());
  int traction_rejections = 0;
  for (const auto& r : rep.rejected) {
    REQUIRE_FALSE(r.rejection.empty());
    if (r.rejection.find("traction") != std::string::npos) {
      ++traction_rejections;
      // These candidates do satisfy the interior equation and the
      // normal trace; only the free-traction condition fails.
      REQUIRE(r.trace_residual <= 1e-10);
    }
  }
  REQUIRE(traction_rejections > 0);
}

TEST_CASE("spectrum csv export") {
  const auto list = rectangle_tangential_spectrum(1, 1, kMat, 3);
  std::ostringstream os;
  export_spectrum_csv({list.begin(), list.end()}, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "family,m,l,omega2,multiplicity");
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    if (rows == 1) REQUIRE_THAT(line, ContainsSubstring("shear,1,1"));
    if (rows > 1) REQUIRE_THAT(line, ContainsSubstring(",2"));  // doubled value
  }
  REQUIRE(rows == 3);
}

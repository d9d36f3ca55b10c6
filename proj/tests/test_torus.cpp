// Integer matrix algebra, unipotent triangularization, torus points, and the
// three flow kinds.  Everything here runs over exact rationals so checks can
// demand equality, not closeness.

#include <complex>
#include <vector>

#include "doctest.h"
#include "osc/numeric.hpp"
#include "osc/torus.hpp"

using namespace osc;
using namespace osc::torus;

namespace {

IMat from_rows(int d, std::initializer_list<long> entries) {
  IMat m(d, d);
  auto it = entries.begin();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = Int(*it++);
  return m;
}

}  // namespace

// ===========================================================================
// integer matrices
// ===========================================================================

TEST_CASE("IMat determinant and unimodular inverse") {
  IMat a = from_rows(2, {2, 1, 1, 1});
  CHECK(a.det() == 1);
  IMat inv = a.inverse_unimodular();
  CHECK((a * inv).is_identity());
  CHECK((inv * a).is_identity());

  IMat b = from_rows(2, {2, 0, 0, 2});
  CHECK(b.det() == 4);
  CHECK_THROWS_AS(b.inverse_unimodular(), ConfigError);

  IMat c = from_rows(3, {1, 2, 3, 0, 1, 4, 5, 6, 0});
  CHECK(c.det() == 1);
  CHECK((c * c.inverse_unimodular()).is_identity());
}

TEST_CASE("IMat power and transpose") {
  IMat n = from_rows(2, {1, 0, 1, 1});
  CHECK(n.pow(0).is_identity());
  CHECK(n.pow(5).at(1, 0) == 5);
  CHECK(n.transpose().at(0, 1) == 1);
  CHECK(n.transpose().at(1, 0) == 0);
}

TEST_CASE("column echelon factors M U = H with unimodular U") {
  IMat m(2, 3);
  m.at(0, 0) = 2; m.at(0, 1) = 4; m.at(0, 2) = 4;
  m.at(1, 0) = -6; m.at(1, 1) = 6; m.at(1, 2) = 12;
  auto e = col_echelon(m);
  CHECK((m * e.u) == e.h);
  Int du = e.u.det();
  CHECK((du == 1 || du == -1));
  CHECK(e.rank == 2);
  for (int j = e.rank; j < e.h.cols(); ++j)
    for (int i = 0; i < e.h.rows(); ++i) CHECK(e.h.at(i, j) == 0);
}

TEST_CASE("kernel basis spans the integer kernel") {
  IMat m(1, 3);
  m.at(0, 0) = 1; m.at(0, 1) = 2; m.at(0, 2) = 3;
  IMat k = kernel_basis(m);
  CHECK(k.cols() == 2);
  CHECK((m * k).is_zero());

  IMat m2(2, 2);
  m2.at(0, 0) = 1; m2.at(0, 1) = 0;
  m2.at(1, 0) = 0; m2.at(1, 1) = 1;
  CHECK(kernel_basis(m2).cols() == 0);
}

TEST_CASE("kernel basis is saturated") {
  // M = (2 4): the kernel lattice is generated by (2, -1), not (4, -2)
  IMat m(1, 2);
  m.at(0, 0) = 2; m.at(0, 1) = 4;
  IMat k = kernel_basis(m);
  REQUIRE(k.cols() == 1);
  CHECK((m * k).is_zero());
  Int g = gcd(k.at(0, 0), k.at(1, 0));
  CHECK((g == 1 || g == -1));
}

TEST_CASE("solve_integer finds exact solutions and detects none") {
  IMat m = from_rows(2, {2, 0, 0, 3});
  auto y = solve_integer(m, {Int(4), Int(9)});
  REQUIRE(y.has_value());
  CHECK((*y)[0] == 2);
  CHECK((*y)[1] == 3);
  CHECK_FALSE(solve_integer(m, {Int(1), Int(3)}).has_value());
}

TEST_CASE("complete_unimodular extends a primitive column") {
  IMat v(2, 1);
  v.at(0, 0) = 2; v.at(1, 0) = 3;
  IMat u = complete_unimodular(v);
  Int du = u.det();
  CHECK((du == 1 || du == -1));
  CHECK(u.at(0, 0) == 2);
  CHECK(u.at(1, 0) == 3);

  IMat w(2, 1);
  w.at(0, 0) = 2; w.at(1, 0) = 4;  // not primitive
  CHECK_THROWS_AS(complete_unimodular(w), ConfigError);
}

TEST_CASE("unipotence predicates") {
  CHECK(is_unipotent(from_rows(2, {1, 0, 4, 1})));
  CHECK(is_unipotent(IMat::identity(3)));
  CHECK_FALSE(is_unipotent(from_rows(2, {2, 0, 0, 1})));
  CHECK_FALSE(is_unipotent(from_rows(2, {0, -1, 1, 0})));

  CHECK(nilpotency_index(IMat::identity(2)) == 1);
  CHECK(nilpotency_index(from_rows(2, {1, 0, 4, 1})) == 2);
  CHECK(nilpotency_index(from_rows(3, {1, 0, 0, 1, 1, 0, 1, 1, 1})) == 3);
}

TEST_CASE("unipotent_triangularize yields det +1 and a strictly lower conjugate") {
  // conjugates of lower unitriangular matrices by small unimodular maps
  std::vector<IMat> cases = {
      from_rows(2, {3, -4, 1, -1}),
      from_rows(2, {1, 0, 7, 1}),
      IMat::identity(3),
  };
  // a genuine 3x3 conjugate: Q L Q^-1 with L lower unitriangular
  IMat l = from_rows(3, {1, 0, 0, 2, 1, 0, -1, 3, 1});
  IMat q = from_rows(3, {1, 1, 0, 1, 2, 1, 0, 1, 2});
  REQUIRE(q.det() == 1);
  cases.push_back(q * l * q.inverse_unimodular());

  for (const auto& a : cases) {
    REQUIRE(is_unipotent(a));
    IMat p = unipotent_triangularize(a);
    CHECK(p.det() == 1);
    IMat conj = p.inverse_unimodular() * a * p;
    for (int i = 0; i < conj.rows(); ++i)
      for (int j = i; j < conj.cols(); ++j) CHECK(conj.at(i, j) == ((i == j) ? 1 : 0));
  }
}

TEST_CASE("least_unipotent_power finds the order of the rotation part") {
  IMat r = from_rows(2, {0, -1, 1, 0});  // r^2 = -I, r^4 = I
  auto q = least_unipotent_power(r, 10);
  REQUIRE(q.has_value());
  CHECK(*q == 4);
  CHECK(least_unipotent_power(from_rows(2, {2, 0, 0, 1}), 6) == std::nullopt);
  CHECK(least_unipotent_power(from_rows(2, {1, 0, 3, 1}), 4) == 1);
}

// ===========================================================================
// points and observables
// ===========================================================================

TEST_CASE("make_point reduces the lift into [0,1)") {
  auto p = make_point(std::vector<Rat>{Rat(5, 4), Rat(-1, 3)});
  CHECK(p.lift[0] == Rat(5, 4));
  CHECK(p.coords[0] == Rat(1, 4));
  CHECK(p.coords[1] == Rat(2, 3));
}

TEST_CASE("character and trig polynomial evaluation") {
  std::vector<double> x = {0.25, 0.7};
  auto v = character_eval(CharacterIndex{1, 0}, x);
  CHECK(std::abs(v - std::complex<double>(0, 1)) < 1e-15);
  auto w = character_eval(CharacterIndex{-1, 0}, x);
  CHECK(std::abs(w - std::complex<double>(0, -1)) < 1e-15);

  TrigPolynomial tp;
  tp.terms[CharacterIndex{1, 0}] = {2.0, 0.0};
  tp.terms[CharacterIndex{0, 0}] = {0.5, 0.0};  // constant character
  auto s = trigpoly_eval(tp, x);
  CHECK(std::abs(s - std::complex<double>(0.5, 2.0)) < 1e-14);
}

TEST_CASE("torus distance wraps per coordinate") {
  std::vector<double> a = {0.1, 0.9};
  std::vector<double> b = {0.9, 0.15};
  CHECK(torus_distance(a, b) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(torus_distance(a, a) == 0.0);
}

// ===========================================================================
// flows
// ===========================================================================

namespace {

SimplePolySkew<Rat> quadratic_skew() {
  SimplePolySkew<Rat> f;
  f.d = 2;
  f.k = 2;
  f.a = Rat(1, 4);
  f.b.assign(3, std::vector<Rat>(3, Rat(0)));
  f.h.assign(3, Poly1<Rat>{});
  f.h[2].c = {Rat(0), Rat(0), Rat(1)};  // h_2(x) = x^2
  return f;
}

}  // namespace

TEST_CASE("simple skew steps match the hand-computed orbit") {
  auto f = quadratic_skew();
  auto p = make_point(std::vector<Rat>{Rat(0), Rat(0)});
  step(Flow<Rat>(f), p);
  CHECK(p.coords[0] == Rat(1, 4));
  CHECK(p.coords[1] == Rat(0));
  step(Flow<Rat>(f), p);
  CHECK(p.coords[0] == Rat(1, 2));
  CHECK(p.coords[1] == Rat(1, 16));
  step(Flow<Rat>(f), p);
  CHECK(p.coords[0] == Rat(3, 4));
  CHECK(p.coords[1] == Rat(5, 16));
}

TEST_CASE("triangular coupling reads the previous step's values") {
  SimplePolySkew<Rat> f;
  f.d = 3;
  f.k = 1;
  f.a = Rat(1, 3);
  f.b.assign(4, std::vector<Rat>(4, Rat(0)));
  f.b[3][2] = Rat(1);
  f.h.assign(4, Poly1<Rat>{});
  f.h[2].c = {Rat(0), Rat(1)};  // h_2(x) = x

  Orbit<Rat> orbit(Flow<Rat>(f), make_point(std::vector<Rat>{Rat(0), Rat(0), Rat(0)}));
  orbit.advance(3);
  CHECK(orbit.point().lift[0] == Rat(1));
  CHECK(orbit.point().lift[1] == Rat(1));   // 0 + h(0) + h(1/3) + h(2/3)
  CHECK(orbit.point().lift[2] == Rat(1, 3));  // picks up x_2 one step late
  CHECK(orbit.point().coords[0] == Rat(0));
  CHECK(orbit.point().coords[1] == Rat(0));
}

TEST_CASE("general skew evaluates h on all earlier coordinates") {
  GeneralPolySkew<Rat> g;
  g.d = 3;
  g.k = 2;
  g.a = Rat(1, 5);
  g.h.assign(4, MPoly<Rat>{});
  g.h[2].nvars = 1;
  g.h[2].terms.push_back({{2}, Rat(1)});  // x1^2
  g.h[3].nvars = 2;
  g.h[3].terms.push_back({{1, 1}, Rat(1)});  // x1 * x2

  auto p = make_point(std::vector<Rat>{Rat(0), Rat(0), Rat(0)});
  step(Flow<Rat>(g), p);
  CHECK(p.lift == std::vector<Rat>{Rat(1, 5), Rat(0), Rat(0)});
  step(Flow<Rat>(g), p);
  CHECK(p.lift[1] == Rat(1, 25));
  CHECK(p.lift[2] == Rat(0));
  step(Flow<Rat>(g), p);
  CHECK(p.lift[1] == Rat(1, 5));                 // 1/25 + (2/5)^2
  CHECK(p.lift[2] == Rat(2, 125));               // (2/5) * (1/25)
}

TEST_CASE("affine map acts by matrix times reduced coordinates") {
  AffineMap<Rat> f;
  f.A = from_rows(2, {1, 0, 1, 1});
  f.t = {Rat(1, 4), Rat(0)};
  auto p = make_point(std::vector<Rat>{Rat(3, 4), Rat(1, 2)});
  step(Flow<Rat>(f), p);
  CHECK(p.coords[0] == Rat(0));       // 3/4 + 1/4
  CHECK(p.coords[1] == Rat(1, 4));    // 3/4 + 1/2 mod 1
}

TEST_CASE("power_affine equals q single steps on coordinates") {
  AffineMap<Rat> f;
  f.A = from_rows(2, {1, 0, 1, 1});
  f.t = {Rat(1, 4), Rat(1, 6)};
  auto start = make_point(std::vector<Rat>{Rat(1, 3), Rat(1, 2)});

  Orbit<Rat> orbit(Flow<Rat>(f), start);
  orbit.advance(7);

  auto fq = power_affine(f, 7);
  auto p = start;
  step(Flow<Rat>(fq), p);
  CHECK(p.coords == orbit.point().coords);
}

TEST_CASE("validate_flow rejects malformed shapes") {
  AffineMap<Rat> bad;
  bad.A = IMat(2, 3);
  bad.t = {Rat(0), Rat(0)};
  CHECK_THROWS_AS(validate_flow(Flow<Rat>(bad)), ConfigError);

  auto f = quadratic_skew();
  f.h[2].c = {Rat(0), Rat(0), Rat(0), Rat(1)};  // degree 3 > k = 2
  CHECK_THROWS_AS(validate_flow(Flow<Rat>(f)), ConfigError);

  auto g = quadratic_skew();
  g.h.pop_back();
  CHECK_THROWS_AS(validate_flow(Flow<Rat>(g)), ConfigError);
}

TEST_CASE("recommended precision grows with horizon and degree") {
  auto f = quadratic_skew();
  long p1 = recommended_prec(Flow<Rat>(f), 1000);
  long p2 = recommended_prec(Flow<Rat>(f), 1'000'000);
  CHECK(p1 >= 128);
  CHECK(p2 > p1);
}

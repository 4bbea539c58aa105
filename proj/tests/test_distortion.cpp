#include <doctest.h>

#include <cmath>

#include "twistcirc/distortion.hpp"

using namespace twistcirc;

namespace {

const ConstantTypeIrrational& alpha() {
  static auto a = ConstantTypeIrrational::golden(24);
  return a;
}
const KappaMachinery& km() {
  static KappaMachinery m(alpha());
  return m;
}
const Configuration& window(double amplitude) {
  static Configuration perturbed = birkhoff_minimize(
      TwistMap(alpha(), 10, 0.5, Potential::standard(1.0)), 4181, 6765);
  static Configuration flat = birkhoff_minimize(
      TwistMap(alpha(), 10, 0.5, Potential()), 4181, 6765);
  return amplitude == 0.0 ? flat : perturbed;
}

}  // namespace

TEST_CASE("K0 basics: zero at j = 0 and on the rigid rotation") {
  const auto& c = window(1.0);
  auto v = make_chord(c, 3, 3 + 89);
  CHECK(K0(c, 0, v) == 0.0);
  const auto& f = window(0.0);
  auto u = make_chord(f, 3, 3 + 89);
  for (long long j : {1LL, 10LL, 144LL, -55LL})
    CHECK(std::abs(K0(f, j, u)) < 1e-10);
}

TEST_CASE("K0 cocycle and antisymmetry identities") {
  const auto& c = window(1.0);
  auto fam = enumerate_type2(c, km(), 6, 24, 17);
  long long js[] = {1, 5, 34, -21, 89, 233};
  for (const auto& v : fam)
    for (long long j : js)
      for (long long k : {3LL, -13LL, 55LL}) {
        auto vj = iterate_chord(c, v, j);
        CHECK(std::abs(K0(c, j + k, v) - K0(c, k, vj) - K0(c, j, v)) <
              1e-12);
        auto vmj = iterate_chord(c, v, -j);
        CHECK(std::abs(K0(c, -j, v) + K0(c, j, vmj)) < 1e-12);
      }
}

TEST_CASE("K1 vanishes on equal halves and flips under swap") {
  const auto& c = window(1.0);
  auto pairs = enumerate_pairs(c, km(), 6, 9, 16, 23);
  REQUIRE(!pairs.empty());
  for (const auto& p : pairs) {
    ChordPair same{p.v1, p.v1, p.lambda, p.Theta};
    CHECK(K1(c, 21, same) == 0.0);
    ChordPair sw{p.v2, p.v1, p.lambda, p.Theta};
    for (long long j : {1LL, 8LL, -34LL})
      CHECK(K1(c, j, sw) == doctest::Approx(-K1(c, j, p)).epsilon(1e-14));
  }
}

TEST_CASE("K2 rearrangement identity and vanishing on identical halves") {
  const auto& c = window(1.0);
  auto quads = enumerate_quadruples(c, km(), 6, 9, 9, 8, 29);
  REQUIRE(!quads.empty());
  for (const auto& qd : quads) {
    ChordQuadruple same{qd.front, qd.front, qd.lambda, qd.Theta};
    CHECK(K2(c, 13, same) == 0.0);
    for (long long j : {1LL, 21LL, -5LL}) {
      double lhs = qd.back.Theta * K2(c, j, qd);
      double rhs = K1(c, j, qd.back) -
                   (qd.back.Theta / qd.front.Theta) * K1(c, j, qd.front);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("sup containment and budget monotonicity") {
  const auto& c = window(1.0);
  auto small = enumerate_type2(c, km(), 6, 16, 31);
  auto large = enumerate_type2(c, km(), 6, 32, 31);
  long long qN = alpha().q(10);
  auto ss = K0_sups_over(c, small, qN);
  auto sl = K0_sups_over(c, large, qN);
  CHECK(ss.one_sided <= ss.two_sided);
  CHECK(sl.one_sided <= sl.two_sided);
  CHECK(ss.two_sided <= sl.two_sided + 1e-18);  // prefix property
  CHECK(ss.one_sided <= sl.one_sided + 1e-18);
}

TEST_CASE("Denjoy-type bound: K0_N <= 2 Ktilde1_N on shared samples") {
  const auto& c = window(1.0);
  for (int kappa : {6, 7}) {
    int N = km().windows(kappa).n_kappa;
    auto pairs = enumerate_pairs(c, km(), kappa, N, 48,
                                 derive_seed(1, kappa, N, -1));
    REQUIRE(!pairs.empty());
    std::vector<Chord> shared;
    for (const auto& p : pairs) {
      shared.push_back(p.v1);
      shared.push_back(p.v2);
    }
    long long qN = alpha().q(N);
    auto k0 = K0_sups_over(c, shared, qN);
    auto k1 = K1_sups_over(c, pairs, qN);
    CHECK(k0.one_sided <= 2.0 * k1.two_sided + 1e-15);
  }
}

TEST_CASE("K0 envelope shrinks with the potential amplitude") {
  auto mk = [&](double amp) {
    auto c = birkhoff_minimize(
        TwistMap(alpha(), 10, 0.5, Potential::standard(amp)), 4181, 6765);
    auto fam = enumerate_type2(c, km(), 6, 32, 3);
    return K0_sups_over(c, fam, alpha().q(16)).two_sided;
  };
  double k1 = mk(1.0), k2 = mk(0.5), k3 = mk(0.25);
  CHECK(k2 <= k1);
  CHECK(k3 <= k2);
}

TEST_CASE("grad1 and the one-step expansion agree") {
  const auto& c = window(1.0);
  auto pairs = enumerate_pairs(c, km(), 6, 9, 64, 101);
  REQUIRE(!pairs.empty());
  for (const auto& p : pairs) {
    CHECK(std::abs(E1_one_step(c, p) - grad1(p)) < 1e-10);
    ChordPair sw{p.v2, p.v1, p.lambda, p.Theta};
    CHECK(grad1(sw) == doctest::Approx(-grad1(p)).epsilon(1e-14));
  }
  // rigid rotation: all difference quotients vanish
  const auto& f = window(0.0);
  auto fp = enumerate_pairs(f, km(), 6, 9, 16, 101);
  for (const auto& p : fp) CHECK(std::abs(grad1(p)) < 1e-8);
}

TEST_CASE("grad2 vanishes on identical halves and on the rigid rotation") {
  const auto& c = window(1.0);
  auto quads = enumerate_quadruples(c, km(), 6, 9, 9, 8, 37);
  REQUIRE(!quads.empty());
  for (const auto& qd : quads) {
    ChordQuadruple same{qd.front, qd.front, qd.lambda, qd.Theta};
    CHECK(grad2(same) == 0.0);
    CHECK(std::isfinite(grad2(qd)));
  }
}

TEST_CASE("kappa1: zero on the rigid rotation, stable across r") {
  const auto& f = window(0.0);
  auto fp = enumerate_pairs(f, km(), 6, 9, 8, 5);
  for (const auto& p : fp) CHECK(kappa1_of(f, p, alpha().q(9)) < 1e-8);
  const auto& c = window(1.0);
  auto sup_at = [&](int r) {
    auto pairs = enumerate_pairs(c, km(), 6, r, 32, 5);
    REQUIRE(!pairs.empty());
    double sup = 0;
    for (const auto& p : pairs)
      sup = std::max(sup, kappa1_of(c, p, alpha().q(r)));
    return sup;
  };
  // deepening r does not inflate the sup beyond a modest envelope
  double s6 = sup_at(6), s9 = sup_at(9);
  CHECK(s6 > 0);
  CHECK(s9 <= 2.0 * s6);
}

TEST_CASE("averaging check: bound, skip contract, rigid rotation") {
  const auto& c = window(1.0);
  long long qN = alpha().q(16);
  auto fam = enumerate_type2(c, km(), 6, 32, 13);
  for (const auto& v : fam) {
    auto dev = averaging_check(c, v, qN);
    REQUIRE(dev.has_value());  // Type-II guarantees lambda > 2/q_Nbar
    CHECK(*dev <= 1.0 / double(qN));
  }
  Chord small{};
  small.lambda = 1.0 / double(qN);  // below the 2/q_N threshold
  CHECK(!averaging_check(c, small, qN).has_value());
  const auto& f = window(0.0);
  auto u = make_chord(f, 0, 89);
  auto dev = averaging_check(f, u, qN);
  REQUIRE(dev.has_value());
  CHECK(*dev <= 1.0 / double(qN));
}

TEST_CASE("lambda sups: containment, floor, bounded one-step ratio") {
  const auto& c = window(1.0);
  auto ls = lambda_sups(c, km(), 6, 64, 19);
  CHECK(ls.lambda_I >= 1.0);
  CHECK(ls.lambda_II >= 1.0);
  CHECK(ls.lambda_II <= ls.lambda_I);
  CHECK(ls.boud_violations == 0);
  // rigid rotation: both sups collapse to 1 up to the rational gap
  const auto& f = window(0.0);
  auto lf = lambda_sups(f, km(), 6, 64, 19);
  CHECK(lf.lambda_I <= 1.0 + 10.0 * lf.rational_slack);
  CHECK(lf.lambda_II <= 1.0 + 10.0 * lf.rational_slack);
}

TEST_CASE("G modulus: nonnegative, near zero on the rigid rotation") {
  const auto& c = window(1.0);
  auto pairs = enumerate_pairs(c, km(), 6, 9, 32, 41);
  CHECK(g_modulus_over(pairs) >= 0.0);
  const auto& f = window(0.0);
  auto fp = enumerate_pairs(f, km(), 6, 9, 32, 41);
  CHECK(g_modulus_over(fp) < 1e-4);
}

TEST_CASE("table construction and cell-wise max merge") {
  const auto& c = window(1.0);
  Budgets b{24, 12, 6};
  auto t1 = build_distortion_table(c, km(), 6, 7, b, 11, 0.5);
  REQUIRE(t1.rows.size() == 2);
  for (const auto& row : t1.rows) {
    CHECK(row.lambda_I >= row.lambda_II);
    CHECK(row.K0_Nbar <= row.K0t_Nbar);
    CHECK(row.boud_violations == 0);
    CHECK(!row.cells.empty());
    CHECK(row.avg_dev_max <= row.avg_bound);
  }
  auto t2 = build_distortion_table(c, km(), 6, 7, b, 12, 0.5);
  auto m12 = merge_tables(t1, t2);
  auto m21 = merge_tables(t2, t1);
  for (size_t k = 0; k < m12.rows.size(); ++k) {
    CHECK(m12.rows[k].lambda_II == m21.rows[k].lambda_II);
    CHECK(m12.rows[k].K0t_Nbar ==
          std::max(t1.rows[k].K0t_Nbar, t2.rows[k].K0t_Nbar));
  }
  auto idem = merge_tables(t1, t1);
  for (size_t k = 0; k < idem.rows.size(); ++k)
    CHECK(idem.rows[k].K0t_Nbar == t1.rows[k].K0t_Nbar);
  CHECK_THROWS_AS(build_distortion_table(c, km(), 7, 6, b, 1, 0.5),
                  std::invalid_argument);
}

TEST_CASE("condition evaluation: holds on small amplitude, flips on huge") {
  const auto& c = window(1.0);
  Budgets b{24, 12, 6};
  auto t = build_distortion_table(c, km(), 6, 7, b, 11, 0.5);
  auto rep = evaluate_conditions(t, km(), 0.5, alpha().bound());
  CHECK(rep.threshold == doctest::Approx(0.5 / 960.0));
  CHECK(rep.sigma > 0);
  CHECK(rep.sigma < 0.125);  // linear response valid at this amplitude
  for (const auto& row : rep.rows) {
    CHECK(row.R_holds);
    CHECK(row.response_bound > 0);
    CHECK(row.S_holds);
    CHECK(row.T_holds);
  }
  CHECK(rep.implications_consistent);
  CHECK(rep.criterion1 == "bounded-with-margin");
  CHECK(rep.criterion2 == "bounded-with-margin");
  CHECK(rep.criterion3 == "bounded-with-margin");
  CHECK(rep.missing_kappas.empty());
  CHECK_THROWS_AS(
      evaluate_conditions(DistortionTable{}, km(), 0.5, alpha().bound()),
      std::invalid_argument);
}

TEST_CASE("rigid rotation: all-zero distortion table") {
  const auto& f = window(0.0);
  Budgets b{24, 12, 6};
  auto t = build_distortion_table(f, km(), 6, 6, b, 7, 0.5);
  const auto& row = t.rows[0];
  CHECK(row.K0t_Nbar < 1e-8);
  for (const auto& cell : row.cells) {
    CHECK(cell.K1t_r < 1e-8);
    CHECK(cell.grad1_sup < 1e-6);
    CHECK(cell.kappa1_sup < 1e-8);
  }
  auto rep = evaluate_conditions(t, km(), 0.5, alpha().bound());
  for (const auto& r : rep.rows) CHECK(r.R_holds);
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "rvlbm/collision.hpp"

using namespace rvlbm;

namespace {

RelaxationVector random_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::array<double, 9> s{};
  for (int k = 3; k < 9; ++k) s[static_cast<std::size_t>(k)] = u(rng);
  return RelaxationVector(s);
}

}  // namespace

TEST_SUITE("collision") {
  TEST_CASE("trt1 placement") {
    const auto s = trt1(1.5, 1.984375);
    CHECK(s[0] == 0);
    CHECK(s[1] == 0);
    CHECK(s[2] == 0);
    CHECK(s[3] == 1.5);
    CHECK(s[4] == 1.984375);
    CHECK(s[5] == 1.984375);
    CHECK(s[6] == 1.5);
    CHECK(s[7] == 1.5);
    CHECK(s[8] == 1.5);
    for (int k = 0; k < 9; ++k) CHECK(trt1(0, 0)[k] == 0);
    CHECK(trt1(1.3, 1.3) == RelaxationVector::bgk(1.3));
    CHECK(trt1(1.3, 1.3).is_bgk());
    CHECK_FALSE(trt1(1.3, 1.4).is_bgk());
  }

  TEST_CASE("trt2 placement") {
    const auto s = trt2(1.0, 2.0);
    CHECK(s[3] == 1.0);
    CHECK(s[4] == 1.0);
    CHECK(s[5] == 1.0);
    CHECK(s[6] == 2.0);
    CHECK(s[7] == 2.0);
    CHECK(s[8] == 1.0);
    CHECK(trt2(0.7, 0.7) == RelaxationVector::bgk(0.7));
    const auto p = trt2(rate_from_exponent(0), rate_from_exponent(3));
    const std::array<double, 9> want{0, 0, 0, 1, 1, 1, 1.875, 1.875, 1};
    CHECK(p.rates() == want);
  }

  TEST_CASE("rate validation") {
    CHECK_THROWS_AS(trt1(2.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(trt1(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(trt2(1.0, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(RelaxationVector::bgk(-1), std::invalid_argument);
    CHECK_THROWS_AS(RelaxationVector(std::array<double, 9>{0.1, 0, 0, 1, 1, 1, 1, 1, 1}), std::invalid_argument);
    CHECK_NOTHROW(trt1(2.0, 2.0));
    CHECK(rate_from_exponent(7) == 2.0 - 1.0 / 128.0);
  }

  TEST_CASE("relaxation type names") {
    CHECK(parse_relaxation_type("trt1") == RelaxationType::Trt1);
    CHECK(parse_relaxation_type("TRT2") == RelaxationType::Trt2);
    CHECK(parse_relaxation_type("bgk") == RelaxationType::Bgk);
    CHECK(to_string(RelaxationType::Trt2) == "trt2");
    CHECK_THROWS(parse_relaxation_type("mrt"));
  }

  TEST_CASE("viscosity conversion") {
    const auto a = viscosity_to_rates(0.0366, 1e-4, 1.0, 1.0 / 16.0);
    CHECK(a.s_e == doctest::Approx(0.443).epsilon(1e-3));
    CHECK(std::round(a.s_e * 100) / 100 == doctest::Approx(0.44));
    CHECK(std::round(a.s_nu * 100) / 100 == doctest::Approx(1.98));
    const double s_nu = viscosity_to_rate(1e-4, 1.0, 1.0 / 128.0);
    CHECK(s_nu == doctest::Approx(1.857).epsilon(1e-3));
    CHECK(viscosity_to_rate(0.0, 1.0, 0.01) == 2.0);
    for (double v : {1e-6, 1e-4, 0.01, 0.0366, 0.3}) {
      for (double dt : {1.0 / 16, 1.0 / 128, 0.5}) {
        const double s = viscosity_to_rate(v, 1.0, dt);
        CHECK(std::abs(rate_to_viscosity(s, 1.0, dt) - v) <= 1e-12);
      }
    }
    CHECK_THROWS_AS(viscosity_to_rate(-1e-3, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(viscosity_to_rate(1e-3, 1.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("utilde policies") {
    const Vec2 u(0.3, -0.2);
    CHECK(UtildePolicy::zero().resolve(u) == Vec2::Zero());
    CHECK(UtildePolicy::fluid().resolve(u) == u);
    CHECK(UtildePolicy::scaled_fluid(0.5).resolve(u) == 0.5 * u);
    CHECK(UtildePolicy::fixed_at(Vec2(1, 2)).resolve(u) == Vec2(1, 2));
    CHECK(UtildePolicy::zero().is_constant());
    CHECK(UtildePolicy::scaled_fluid(0.0).is_constant());
    CHECK_FALSE(UtildePolicy::fluid().is_constant());
    CHECK(UtildePolicy::fixed_at(Vec2(1, 2)).constant_shift() == Vec2(1, 2));
  }

  TEST_CASE("relax limits") {
    const VelocitySet vs = d2q9(1.0);
    const auto c = LatticeConstants::d2q9(1.0);
    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t) {
      const Vec9 f = oracle::random_state(rng, c, vs, 0.3, 0.2);
      const auto [rho, q] = oracle::moments(f, vs);
      for (auto fam : {Family::A, Family::B}) {
        for (const Vec2& w : {Vec2(0, 0), Vec2(0.2, -0.1), Vec2(q / rho)}) {
          const MomentBasis b{fam, 0.3};
          const Vec9 same = relax(f, b, vs, c, w, RelaxationVector::bgk(0.0), EquilibriumKind::Truncated2);
          CHECK((same - f).cwiseAbs().maxCoeff() <= 1e-14);
          for (auto kind : {EquilibriumKind::Truncated2, EquilibriumKind::Product4}) {
            const Vec9 eq = relax(f, b, vs, c, w, RelaxationVector::bgk(1.0), kind);
            CHECK((eq - feq(kind, rho, q / rho, c, vs)).cwiseAbs().maxCoeff() <= 1e-13);
          }
        }
      }
    }
  }

  TEST_CASE("relax conserves the example state") {
    const VelocitySet vs = d2q9(1.0);
    const auto c = LatticeConstants::d2q9(1.0);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> uni(-0.02, 0.02);
    // Random state with rho = 1 and u = (0.1, 0) built by adding a
    // moment-free perturbation to the equilibrium.
    Vec9 f = feq(EquilibriumKind::Truncated2, 1.0, Vec2(0.1, 0), c, vs);
    const Mat9 m = moment_entries({Family::A, 0.0}, vs, Vec2::Zero());
    Vec9 dm = Vec9::Zero();
    for (int k = 3; k < 9; ++k) dm(k) = uni(rng);
    f += m.partialPivLu().solve(dm);
    const auto [rho, q] = oracle::moments(f, vs);
    CHECK(rho == doctest::Approx(1.0).epsilon(1e-14));
    const Vec9 out = relax(f, {Family::A, 0.0}, vs, c, Vec2(0.1, 0), trt1(1.2, 1.8), EquilibriumKind::Truncated2);
    const auto [rho2, q2] = oracle::moments(out, vs);
    CHECK(std::abs(rho2 - rho) <= 1e-12);
    CHECK((q2 - q).norm() <= 1e-12);
  }

  TEST_CASE("relax rejects non-positive density") {
    const VelocitySet vs = d2q9(1.0);
    const auto c = LatticeConstants::d2q9(1.0);
    Vec9 f = Vec9::Zero();
    CHECK_THROWS_AS(relax(f, {}, vs, c, Vec2::Zero(), trt1(1, 1), EquilibriumKind::Truncated2), StateBlowupError);
    f(0) = -1.0;
    CHECK_THROWS_AS(relax(f, {}, vs, c, Vec2::Zero(), trt1(1, 1), EquilibriumKind::Truncated2), StateBlowupError);
  }

  TEST_CASE("conservation over random draws") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> uni(-0.5, 0.5), al(-1, 1);
    for (int t = 0; t < 1000; ++t) {
      const double lambda = t % 3 == 0 ? 2.0 : 1.0;
      const VelocitySet vs = d2q9(lambda);
      const auto c = LatticeConstants::d2q9(lambda);
      const Vec9 f = oracle::random_state(rng, c, vs, 0.4, 0.3);
      const MomentBasis b{t % 2 ? Family::A : Family::B, al(rng)};
      const Vec2 w(uni(rng) * lambda, uni(rng) * lambda);
      const auto kind = t % 4 < 2 ? EquilibriumKind::Truncated2 : EquilibriumKind::Product4;
      const Vec9 out = relax(f, b, vs, c, w, random_rates(rng), kind);
      const auto [r0, q0] = oracle::moments(f, vs);
      const auto [r1, q1] = oracle::moments(out, vs);
      CHECK(std::abs(r1 - r0) <= 1e-10);
      CHECK((q1 - q0).norm() <= 1e-10 * lambda);
    }
  }

  TEST_CASE("BGK does not depend on the shift") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> uni(-0.5, 0.5), rate(0, 2), al(-1, 1);
    const VelocitySet vs = d2q9(1.0);
    const auto c = LatticeConstants::d2q9(1.0);
    for (int t = 0; t < 200; ++t) {
      const Vec9 f = oracle::random_state(rng, c, vs, 0.4, 0.3);
      const MomentBasis b{t % 2 ? Family::A : Family::B, al(rng)};
      const auto s = RelaxationVector::bgk(rate(rng));
      const Vec9 a = relax(f, b, vs, c, Vec2(uni(rng), uni(rng)), s, EquilibriumKind::Product4);
      const Vec9 z = relax(f, b, vs, c, Vec2(uni(rng), uni(rng)), s, EquilibriumKind::Product4);
      CHECK((a - z).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("alpha equivalences") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> uni(-0.4, 0.4), rate(0, 2);
    const VelocitySet vs = d2q9(1.0);
    const auto c = LatticeConstants::d2q9(1.0);
    for (int t = 0; t < 200; ++t) {
      const Vec9 f = oracle::random_state(rng, c, vs, 0.4, 0.3);
      const double se = rate(rng), sn = rate(rng);
      for (const auto& s : {trt1(se, sn), trt2(se, sn)}) {
        const Vec9 a0 = relax(f, {Family::A, 0.0}, vs, c, Vec2::Zero(), s, EquilibriumKind::Truncated2);
        const Vec9 a1 = relax(f, {Family::A, 1.0}, vs, c, Vec2::Zero(), s, EquilibriumKind::Truncated2);
        CHECK((a0 - a1).cwiseAbs().maxCoeff() <= 1e-10);
      }
      const Vec2 w(uni(rng), uni(rng));
      const Vec9 b0 = relax(f, {Family::B, 0.0}, vs, c, w, trt1(se, sn), EquilibriumKind::Truncated2);
      const Vec9 b7 = relax(f, {Family::B, 0.7}, vs, c, w, trt1(se, sn), EquilibriumKind::Truncated2);
      CHECK((b0 - b7).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("cell collider agrees with relax") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> rate(0, 2), al(-1, 1);
    for (double lambda : {1.0, 25.0 * std::sqrt(3.0)}) {
      const VelocitySet vs = d2q9(lambda);
      const auto c = LatticeConstants::d2q9(lambda);
      for (const auto& policy : {UtildePolicy::zero(), UtildePolicy::fluid(), UtildePolicy::scaled_fluid(0.6),
                                 UtildePolicy::fixed_at(Vec2(0.1, -0.2) * lambda)}) {
        for (int t = 0; t < 30; ++t) {
          const MomentBasis b{t % 2 ? Family::A : Family::B, al(rng)};
          const auto s = trt1(rate(rng), rate(rng));
          const auto kind = t % 3 ? EquilibriumKind::Truncated2 : EquilibriumKind::Product4;
          const CellCollider col(b, vs, c, s, kind, policy);
          CHECK(col.fused() == policy.is_constant());
          Vec9 f = oracle::random_state(rng, c, vs, 0.4, 0.3);
          const auto [rho, q] = oracle::moments(f, vs);
          const Vec9 want = relax(f, b, vs, c, policy.resolve(q / rho), s, kind);
          col.collide(f.data(), rho, q / rho);
          CHECK((f - want).cwiseAbs().maxCoeff() <= 1e-11 * std::max(1.0, want.cwiseAbs().maxCoeff()));
        }
      }
    }
  }
}

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "coevo/graphon.hpp"

using namespace coevo;

namespace {

// Independent quadrature oracle: dense midpoint Riemann sum over a cell pair.
double brute_force_cell_average(const std::function<double(double, double)>& f,
                                int i, int j, int n, int samples = 400) {
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double x = (i + (s + 0.5) / samples) / n;
    for (int t = 0; t < samples; ++t) {
      acc += f(x, (j + (t + 0.5) / samples) / n);
    }
  }
  return acc / (static_cast<double>(samples) * samples);
}

}  // namespace

TEST_CASE("Partition cells and point lookup") {
  const Partition p(4);
  CHECK(p.cell_measure() == doctest::Approx(0.25));
  CHECK(p.cell_lower(0) == 0.0);
  CHECK(p.cell_upper(3) == 1.0);
  CHECK(p.midpoint(1) == doctest::Approx(0.375));
  CHECK(p.cell_index(0.0) == 0);
  CHECK(p.cell_index(0.25) == 1);   // half-open cells
  CHECK(p.cell_index(0.9999) == 3);
  CHECK(p.cell_index(1.0) == 3);    // last cell closed
  CHECK_THROWS_AS(p.cell_index(-0.01), std::out_of_range);
  CHECK_THROWS_AS(p.cell_index(1.01), std::out_of_range);
  CHECK_THROWS_AS(Partition(0), std::invalid_argument);
}

TEST_CASE("kernel families respect their declared bounds on a dense grid") {
  const Kernel kernels[] = {Kernel::constant(1.5), Kernel::cosine_shift(1.0, 0.5),
                            Kernel::product(2.0, -0.5),
                            Kernel::tabulated({0.5, 1.0, 1.5, 2.0}, 2)};
  for (const auto& k : kernels) {
    for (int i = 0; i <= 64; ++i) {
      for (int j = 0; j <= 64; ++j) {
        const double v = k(i / 64.0, j / 64.0);
        CHECK(v >= k.inf_bound() - 1e-12);
        CHECK(v <= k.sup_bound() + 1e-12);
      }
    }
  }
  CHECK(Kernel::cosine_shift(1.0, 0.5).inf_bound() == doctest::Approx(0.5));
  CHECK(Kernel::cosine_shift(1.0, 0.5).certified_bounds());
  CHECK_FALSE(Kernel::tabulated({1.0}, 1).certified_bounds());
}

TEST_CASE("discretize_frequencies") {
  SUBCASE("constant") {
    const auto vals = discretize_frequencies(FrequencySpec::constant(2.0), Partition(7));
    for (double v : vals) CHECK(v == 2.0);
  }
  SUBCASE("affine omega(x)=x, n=4: exact cell means") {
    const auto vals = discretize_frequencies(FrequencySpec::affine(0.0, 1.0), Partition(4));
    REQUIRE(vals.size() == 4);
    CHECK(vals[0] == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(vals[1] == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(vals[2] == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(vals[3] == doctest::Approx(0.875).epsilon(1e-14));
  }
  SUBCASE("affine omega(x)=x, n=1: mean over [0,1]") {
    const auto vals = discretize_frequencies(FrequencySpec::affine(0.0, 1.0), Partition(1));
    CHECK(vals[0] == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("discretize_weights_average reference values") {
  SUBCASE("constant kernel") {
    const auto g = discretize_weights_average(Kernel::constant(3.25), Partition(3));
    for (double w : g.weights) CHECK(w == doctest::Approx(3.25).epsilon(1e-15));
  }
  SUBCASE("W(x,y)=x+y, n=2: closed-form quarter-square integrals") {
    const auto k =
        Kernel::custom([](double x, double y) { return x + y; }, 0.0, 2.0);
    const auto g = discretize_weights_average(k, Partition(2));
    CHECK(g.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.at(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.at(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.at(1, 1) == doctest::Approx(1.5).epsilon(1e-14));
  }
  SUBCASE("cosine kernel, n=1: the shift integrates away") {
    const auto g = discretize_weights_average(Kernel::cosine_shift(1.0, 0.5), Partition(1));
    CHECK(g.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("converges to the brute-force oracle at second order") {
    const auto k = Kernel::cosine_shift(1.0, 0.5);
    auto gap = [&](int subsamples) {
      const auto g = discretize_weights_average(k, Partition(3), subsamples);
      double worst = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          worst = std::max(worst, std::abs(g.at(i, j) -
                                           brute_force_cell_average(
                                               [&](double x, double y) { return k(x, y); },
                                               i, j, 3, 512)));
      return worst;
    };
    const double g4 = gap(4), g8 = gap(8), g16 = gap(16);
    CHECK(g16 < 1e-3);
    CHECK(g8 < g4 / 3.5);
    CHECK(g16 < g8 / 3.5);
  }
}

TEST_CASE("discretize_weights_sample reference values") {
  SUBCASE("constant kernel") {
    const auto g = discretize_weights_sample(Kernel::constant(-2.0), Partition(5));
    for (double w : g.weights) CHECK(w == -2.0);
  }
  SUBCASE("W(x,y)=x+y, n=2: coincides with the cell average") {
    const auto k = Kernel::custom([](double x, double y) { return x + y; }, 0.0, 2.0);
    const auto g = discretize_weights_sample(k, Partition(2));
    CHECK(g.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.at(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.at(1, 1) == doctest::Approx(1.5).epsilon(1e-14));
  }
  SUBCASE("W(x,y)=xy, n=2: products of midpoints") {
    const auto g = discretize_weights_sample(Kernel::product(1.0), Partition(2));
    CHECK(g.at(0, 0) == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(g.at(0, 1) == doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(g.at(1, 0) == doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(g.at(1, 1) == doctest::Approx(0.5625).epsilon(1e-14));
  }
}

TEST_CASE("average and sample rules agree exactly for affine kernels") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double c0 = coef(rng), cx = coef(rng), cy = coef(rng);
    const auto k = Kernel::custom(
        [=](double x, double y) { return c0 + cx * x + cy * y; }, -6.0, 6.0);
    const Partition p(3);
    const auto ga = discretize_weights_average(k, p);
    const auto gs = discretize_weights_sample(k, p);
    for (size_t m = 0; m < ga.weights.size(); ++m)
      CHECK(ga.weights[m] == doctest::Approx(gs.weights[m]).epsilon(1e-13));
  }
}

TEST_CASE("average vs sample discrepancy shrinks with n for smooth kernels") {
  const auto k = Kernel::cosine_shift(1.0, 0.5);
  auto discrepancy = [&](int n) {
    const auto ga = discretize_weights_average(k, Partition(n), 8);
    const auto gs = discretize_weights_sample(k, Partition(n));
    double worst = 0.0;
    for (size_t m = 0; m < ga.weights.size(); ++m)
      worst = std::max(worst, std::abs(ga.weights[m] - gs.weights[m]));
    return worst;
  };
  const double d4 = discrepancy(4), d8 = discrepancy(8), d16 = discrepancy(16);
  CHECK(d8 < d4);
  CHECK(d16 < d8);
}

TEST_CASE("cell averages track the kernel to first order") {
  // |W^N(x,y) - W(x,y)| <= Lip(W) * diam(cell rectangle) at sampled points
  const auto k = Kernel::cosine_shift(1.0, 0.5);
  const double lip = 0.5 * kTwoPi;  // |grad| <= amp*2pi per axis
  const int n = 8;
  const auto g = discretize_weights_average(k, Partition(n), 8);
  const double diam = std::sqrt(2.0) / n;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 500; ++rep) {
    const double x = unit(rng), y = unit(rng);
    const int i = Partition(n).cell_index(x), j = Partition(n).cell_index(y);
    CHECK(std::abs(g.at(i, j) - k(x, y)) <= lip * diam + 1e-12);
  }
}

TEST_CASE("discretize_phases") {
  SUBCASE("constant") {
    const auto f = discretize_phases([](double) { return 0.5; }, Partition(6));
    for (double v : f.phases) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("phi0(x)=x, n=4") {
    const auto f = discretize_phases([](double x) { return x; }, Partition(4));
    CHECK(f.phases[0] == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(f.phases[1] == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(f.phases[2] == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(f.phases[3] == doctest::Approx(0.875).epsilon(1e-14));
  }
  SUBCASE("phi0(x)=2pi x, n=2") {
    const auto f = discretize_phases([](double x) { return kTwoPi * x; }, Partition(2));
    CHECK(f.phases[0] == doctest::Approx(kTwoPi / 4.0).epsilon(1e-14));
    CHECK(f.phases[1] == doctest::Approx(3.0 * kTwoPi / 4.0).epsilon(1e-14));
  }
}

TEST_CASE("lift_phases point evaluation") {
  const auto f = lift_phases({0.0, kTwoPi / 2.0}, Partition(2));
  CHECK(f.eval_at(0.25) == 0.0);
  CHECK(f.eval_at(0.75) == doctest::Approx(kTwoPi / 2.0));
  CHECK(f.eval_at(0.5) == doctest::Approx(kTwoPi / 2.0));  // half-open convention
  CHECK_THROWS_AS(f.eval_at(-0.1), std::out_of_range);
  CHECK_THROWS_AS(f.eval_at(1.1), std::out_of_range);
}

TEST_CASE("refine replicates blocks and preserves fiber masses") {
  SUBCASE("constant replication") {
    const auto g = refine(StepGraphon(Partition(1), {2.5}), 2);
    CHECK(g.partition.n == 2);
    for (double w : g.weights) CHECK(w == 2.5);
  }
  SUBCASE("identity refinement") {
    const StepGraphon g(Partition(2), {1, 2, 3, 4});
    const auto r = refine(g, 2);
    CHECK(r.weights == g.weights);
  }
  SUBCASE("block replication 2 -> 4") {
    const auto r = refine(StepGraphon(Partition(2), {1, 2, 3, 4}), 4);
    REQUIRE(r.partition.n == 4);
    const std::vector<double> expected = {1, 1, 2, 2, 1, 1, 2, 2,
                                          3, 3, 4, 4, 3, 3, 4, 4};
    CHECK(r.weights == expected);
  }
  SUBCASE("rejects non-multiples") {
    const StepGraphon g(Partition(2), {1, 2, 3, 4});
    CHECK_THROWS_AS(refine(g, 3), std::invalid_argument);
    CHECK_THROWS_AS(refine(g, 1), std::invalid_argument);
  }
  SUBCASE("fiber masses preserved exactly on random matrices") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
      const int n = 1 + static_cast<int>(rng() % 5);
      std::vector<double> w(static_cast<size_t>(n) * n);
      for (auto& x : w) x = val(rng);
      const StepGraphon g(Partition(n), w);
      const auto r = refine(g, n * 3);
      for (int i = 0; i < n; ++i)
        for (int s = 0; s < 3; ++s)
          CHECK(r.fiber_mass(i * 3 + s) == doctest::Approx(g.fiber_mass(i)).epsilon(1e-13));
    }
  }
}

TEST_CASE("positivity_threshold") {
  const auto h = CouplingSpec::sine_lag(1.0, 0.7);
  CHECK(positivity_threshold(h, 0.0, 5.0) == 0.0);
  CHECK(positivity_threshold(CouplingSpec::sine_lag(0.0, 0.0), 0.3, 5.0) == 0.0);
  CHECK(positivity_threshold(h, 0.1, 5.0) ==
        doctest::Approx(0.64872127070012819).epsilon(1e-14));

  // monotone in ||H||, eps, T
  CHECK(positivity_threshold(CouplingSpec::sine_lag(2.0, 0.0), 0.1, 5.0) >
        positivity_threshold(h, 0.1, 5.0));
  CHECK(positivity_threshold(h, 0.2, 5.0) > positivity_threshold(h, 0.1, 5.0));
  CHECK(positivity_threshold(h, 0.1, 6.0) > positivity_threshold(h, 0.1, 5.0));
}

TEST_CASE("berner_horizon_bound") {
  CHECK(berner_horizon_bound(std::exp(1.0) - 1.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(berner_horizon_bound(1.0, 0.05) ==
        doctest::Approx(13.862943611198906).epsilon(1e-14));
  CHECK(berner_horizon_bound(1e-12, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::isinf(berner_horizon_bound(0.5, 0.0)));
  CHECK_THROWS_AS(berner_horizon_bound(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(berner_horizon_bound(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("check_assumptions") {
  SUBCASE("constant kernel, Berner model: A5 margin vs threshold") {
    const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 4.0);
    const auto report = check_assumptions(Kernel::constant(1.0), model);
    CHECK(report.all_pass());
    const auto& a5 = report.find("A5");
    CHECK(a5.pass);
    CHECK(a5.margin == doctest::Approx(1.0 - 0.22140275816016985).epsilon(1e-10));
  }
  SUBCASE("zero kernel fails A5 for nonzero H") {
    const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 4.0);
    const auto report = check_assumptions(Kernel::constant(0.0), model);
    CHECK_FALSE(report.find("A5").pass);
    CHECK(report.regularity_pass());
  }
  SUBCASE("cosine kernel with c_W = 0.5 passes") {
    const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 4.0);
    const auto report = check_assumptions(Kernel::cosine_shift(1.0, 0.5), model);
    CHECK(report.all_pass());
    CHECK(report.find("A5").margin == doctest::Approx(0.5 - 0.22140275816016985).epsilon(1e-10));
  }
  SUBCASE("discontinuous custom kernel fails the continuity checks") {
    const auto k = Kernel::custom(
        [](double x, double) { return x < 0.5 ? 0.0 : 1.0; }, 0.0, 1.0);
    const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 4.0);
    const auto report = check_assumptions(k, model);
    CHECK_FALSE(report.find("A6").pass);
    CHECK_FALSE(report.regularity_pass());
  }
  SUBCASE("phi0 continuity is covered when supplied") {
    const auto model = make_berner(1.0, 0.3, 0.7, 0.05, 0.0, 4.0);
    const auto good = check_assumptions(Kernel::constant(1.0), model,
                                        [](double x) { return kTwoPi * x; });
    CHECK(good.find("A4").pass);
    const auto bad = check_assumptions(Kernel::constant(1.0), model,
                                       [](double x) { return x < 0.5 ? 0.0 : 1.0; });
    CHECK_FALSE(bad.find("A4").pass);
  }
}

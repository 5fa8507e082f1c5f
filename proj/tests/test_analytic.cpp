#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "hestonweak/analytic.hpp"
#include "oracles.hpp"

using namespace heston;
using cplx = std::complex<double>;

namespace {

// Vanishing vol-of-vol with v0 = lambda: the variance path is flat, so the
// model degenerates to Black-Scholes with sigma^2 = lambda.
HestonParams bs_like(double s0, double var, double mu, double t) {
    return HestonParams(s0, var, mu, 1.0, var, 1e-10, 0.0, t);
}

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("cf normalization at u = 0") {
    for (const char* name : {"model1", "model2", "model3"}) {
        const auto p = preset(name);
        const cplx v = heston_cf(cplx(0.0, 0.0), p, p.t_horizon);
        CHECK(std::abs(v - cplx(1.0, 0.0)) <= 1e-12);
    }
}

TEST_CASE("cf at u = -i recovers the forward price") {
    for (const char* name : {"model1", "model2", "model3"}) {
        const auto p = preset(name);
        const cplx v = heston_cf(cplx(0.0, -1.0), p, p.t_horizon);
        const double want = p.s0 * std::exp(p.mu * p.t_horizon);
        CHECK(std::abs(v.imag()) <= 1e-12 * want);
        CHECK(v.real() == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("cf Hermitian symmetry over random frequencies") {
    std::mt19937 gen(2718);
    std::uniform_real_distribution<double> udist(1e-3, 60.0);
    for (const char* name : {"model1", "model2", "model3"}) {
        const auto p = preset(name);
        for (int i = 0; i < 200; ++i) {
            const double u = udist(gen);
            const cplx a = std::conj(heston_cf(cplx(u, 0.0), p, p.t_horizon));
            const cplx b = heston_cf(cplx(-u, 0.0), p, p.t_horizon);
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("cf modulus never exceeds 1 on the real line") {
    std::mt19937 gen(3141);
    std::uniform_real_distribution<double> udist(0.0, 80.0);
    for (const char* name : {"model1", "model2", "model3"}) {
        const auto p = preset(name);
        for (int i = 0; i < 200; ++i) {
            const double u = udist(gen);
            CHECK(std::abs(heston_cf(cplx(u, 0.0), p, p.t_horizon)) <=
                  1.0 + 1e-12);
        }
    }
}

TEST_CASE("cf degenerates to the lognormal cf as theta -> 0") {
    const double var = 0.04;
    const double mu = 0.1;
    const double t = 1.7;
    const HestonParams p(100, var, mu, 1.3, var, 1e-8, 0.0, t);
    const double sigma = std::sqrt(var);
    for (double u : {0.3, 1.0, 3.7, 10.0, 25.0}) {
        const cplx got = heston_cf(cplx(u, 0.0), p, t);
        const cplx want = oracles::bs_cf(cplx(u, 0.0), 100.0, sigma, mu, t);
        CHECK(std::abs(got - want) <= 1e-7);
        CHECK(std::fabs(std::abs(got) - std::abs(want)) <= 1e-8);
    }
}

TEST_CASE("cf requires positive time and guards overflow") {
    const auto p = preset("model1");
    CHECK_THROWS_AS((void)heston_cf(cplx(1.0, 0.0), p, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)heston_cf(cplx(1.0, 0.0), p, -1.0),
                    std::invalid_argument);
    // Deep imaginary frequencies ask for E S_T^400, which overflows; the
    // guard reports it instead of returning inf.
    CHECK_THROWS_AS((void)heston_cf(cplx(0.0, -400.0), p, p.t_horizon),
                    std::runtime_error);
}

TEST_CASE("Black-Scholes degenerate limit prices") {
    const auto p = bs_like(100.0, 0.04, 0.0, 1.0);
    const auto call = call_price(p, 100.0);
    const auto put = put_price(p, 100.0);
    const auto digital = digital_price(p, 100.0);
    CHECK(std::fabs(call.value - oracles::bs_call(100, 100, 0.2, 0.0, 1.0)) <
          1e-6);
    CHECK(std::fabs(put.value - oracles::bs_put(100, 100, 0.2, 0.0, 1.0)) <
          1e-6);
    CHECK(std::fabs(digital.value -
                    oracles::bs_digital(100, 100, 0.2, 0.0, 1.0)) < 1e-6);
    // P1 = Phi(d1), P2 = Phi(d2) with d1 = -d2 = sigma/2 here.
    REQUIRE(call.p1.has_value());
    REQUIRE(call.p2.has_value());
    CHECK(std::fabs(*call.p1 - oracles::normal_cdf(0.1)) < 1e-8);
    CHECK(std::fabs(*call.p2 - oracles::normal_cdf(-0.1)) < 1e-8);
}

TEST_CASE("Black-Scholes degenerate limit with drift and away from the money") {
    const auto p = bs_like(100.0, 0.09, 0.03, 2.0);
    const double sigma = 0.3;
    for (double k : {70.0, 100.0, 145.0}) {
        CHECK(std::fabs(call_price(p, k).value -
                        oracles::bs_call(100, k, sigma, 0.03, 2.0)) < 1e-6);
        CHECK(std::fabs(put_price(p, k).value -
                        oracles::bs_put(100, k, sigma, 0.03, 2.0)) < 1e-6);
        CHECK(std::fabs(digital_price(p, k).value -
                        oracles::bs_digital(100, k, sigma, 0.03, 2.0)) <
              1e-6);
    }
}

TEST_CASE("deep in-the-money call approaches the spot") {
    const auto p = preset("model2");
    const auto c = call_price(p, 1e-6);
    const double forward_drop = 1e-6 * std::exp(-p.mu * p.t_horizon);
    CHECK(std::fabs(c.value - (p.s0 - forward_drop)) < 1e-4);
    CHECK(*c.p1 == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(*c.p2 == doctest::Approx(1.0).epsilon(1e-7));
    // The matching put is worthless.
    CHECK(std::fabs(put_price(p, 1e-6).value) < 1e-4);
}

TEST_CASE("digital strike limits") {
    const auto p = preset("model2");
    const double disc = std::exp(-p.mu * p.t_horizon);
    CHECK(std::fabs(digital_price(p, 1e-4).value) < 1e-6);
    CHECK(std::fabs(digital_price(p, 1e5).value - disc) < 1e-6);
    CHECK_FALSE(digital_price(p, 100.0).p1.has_value());
}

TEST_CASE("put-call parity holds by construction") {
    for (const char* name : {"model1", "model2", "model3"}) {
        const auto p = preset(name);
        const double disc = std::exp(-p.mu * p.t_horizon);
        for (double k : {90.0, 100.0, 110.0}) {
            const auto c = call_price(p, k);
            const auto put = put_price(p, k);
            const double residual =
                std::fabs(c.value - put.value - p.s0 + k * disc);
            CHECK(residual < 1e-9);
        }
    }
}

TEST_CASE("digital complements the exercise probability") {
    for (const char* name : {"model1", "model2", "model3"}) {
        const auto p = preset(name);
        const double disc = std::exp(-p.mu * p.t_horizon);
        const auto d = digital_price(p, p.s0);
        REQUIRE(d.p2.has_value());
        CHECK(std::fabs(d.value + disc * *d.p2 - disc) <= 1e-12);
    }
}

TEST_CASE("strike ladder monotonicity and probability bounds") {
    for (const char* name : {"model1", "model2", "model3"}) {
        const auto p = preset(name);
        double prev_call = std::numeric_limits<double>::infinity();
        double prev_put = -1.0;
        double prev_digital = -1.0;
        for (int k = 50; k <= 150; k += 10) {
            const auto c = call_price(p, k);
            const auto put = put_price(p, k);
            const auto d = digital_price(p, k);
            const double tol = 1e-9 + c.est_error + d.est_error;
            CHECK(c.value <= prev_call + tol);
            CHECK(put.value >= prev_put - tol);
            // The indicator pays at and below K, so its price grows with K.
            CHECK(d.value >= prev_digital - tol);
            REQUIRE(c.p1.has_value());
            REQUIRE(c.p2.has_value());
            CHECK(*c.p1 >= -c.est_error - 1e-12);
            CHECK(*c.p1 <= 1.0 + c.est_error + 1e-12);
            CHECK(*c.p2 >= -c.est_error - 1e-12);
            CHECK(*c.p2 <= 1.0 + c.est_error + 1e-12);
            CHECK(c.value >= -tol);
            CHECK(put.value >= -tol);
            CHECK(d.value >= -tol);
            prev_call = c.value;
            prev_put = put.value;
            prev_digital = d.value;
        }
    }
}

TEST_CASE("reported quadrature error bounds the true Black-Scholes gap") {
    const auto p = bs_like(100.0, 0.04, 0.0, 1.0);
    const auto c = call_price(p, 100.0);
    CHECK(c.est_error < 1e-6);
    CHECK(c.est_error >= 0.0);
}

TEST_CASE("configuration validation") {
    const auto p = preset("model1");
    QuadratureConfig bad_tol;
    bad_tol.abs_tol = 0.0;
    CHECK_THROWS_AS((void)call_price(p, 100.0, bad_tol),
                    std::invalid_argument);
    bad_tol.abs_tol = -1e-9;
    CHECK_THROWS_AS((void)call_price(p, 100.0, bad_tol),
                    std::invalid_argument);
    QuadratureConfig bad_nodes;
    bad_nodes.max_nodes = 63;
    CHECK_THROWS_AS((void)digital_price(p, 100.0, bad_nodes),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)call_price(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)call_price(p, -100.0), std::invalid_argument);
}

TEST_CASE("node budget exhaustion carries the best estimate") {
    const auto p = preset("model3");
    QuadratureConfig tight;
    tight.abs_tol = 1e-13;
    tight.max_nodes = 64;
    bool threw = false;
    try {
        (void)call_price(p, 100.0, tight);
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(std::isfinite(e.best_estimate));
    }
    CHECK(threw);
}

TEST_CASE("model reference values are stable across tolerance settings") {
    // The model2 at-the-money put backs the convergence studies; computing
    // it at two tolerances must agree within the looser one.
    const auto p = preset("model2");
    QuadratureConfig loose;
    loose.abs_tol = 1e-7;
    const auto a = put_price(p, 100.0, loose);
    const auto b = put_price(p, 100.0);
    CHECK(std::fabs(a.value - b.value) <= 1e-7 + b.est_error);
    CHECK(b.value > 0.0);
    CHECK(b.value < p.s0);
}

}  // TEST_SUITE

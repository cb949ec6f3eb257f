#include <cmath>
#include <vector>

#include "doctest.h"
#include "sparc/channel.hpp"
#include "sparc/stats.hpp"

using namespace sparc;

TEST_CASE("zero noise copies the input exactly") {
    const std::vector<double> x = {1.5, -2.25, 0.0, 1e-9};
    const ChannelDraw d = transmit(x, 0.0, 77);
    CHECK(d.y == x);
    for (double w : d.w) CHECK(w == 0.0);
}

TEST_CASE("noise is additive and seed-reproducible") {
    std::vector<double> x(256);
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin((double)i);
    const ChannelDraw a = transmit(x, 2.0, 5);
    const ChannelDraw b = transmit(x, 2.0, 5);
    const ChannelDraw c = transmit(x, 2.0, 6);
    CHECK(a.y == b.y);
    CHECK(a.y != c.y);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(a.y[i] == doctest::Approx(x[i] + a.w[i]).epsilon(1e-15));
}

TEST_CASE("noise power matches sigma2") {
    const std::vector<double> x(20000, 0.0);
    const double sigma2 = 3.5;
    const ChannelDraw d = transmit(x, sigma2, 314);
    double sum2 = 0.0;
    for (double w : d.w) sum2 += w * w;
    const double est = sum2 / (double)x.size();
    // Chi-square concentration: rel std err = sqrt(2/n) ~ 1%.
    CHECK(est == doctest::Approx(sigma2).epsilon(0.05));
    CHECK(std::abs(mean_of(d.w)) < 5.0 * std::sqrt(sigma2 / (double)x.size()));
}

TEST_CASE("noise scales as sqrt of sigma2") {
    const std::vector<double> x(64, 0.0);
    const ChannelDraw a = transmit(x, 1.0, 9);
    const ChannelDraw b = transmit(x, 4.0, 9);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(b.w[i] == doctest::Approx(2.0 * a.w[i]).epsilon(1e-12));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "ringsfwm/config.hpp"

using namespace ringsfwm;
using Catch::Matchers::WithinRel;

TEST_CASE("a minimal document keeps every default", "[config]") {
    const auto c = parse_config("kappa_p_ratio = 10\n");
    REQUIRE(c.kappa_p_ratio == 10.0);
    REQUIRE(c.g_p_over_opt == 1.0);
    REQUIRE(c.g_is_over_opt == 1.0);
    REQUIRE_FALSE(c.pump_fwhm_over_kappa_p.has_value());
    REQUIRE(c.grid_n == 513);
    REQUIRE(c.grid_halfwidth_factor == 8.0);
    REQUIRE(c.tol_k == 1e-4);

    const auto p = resonator_params(c);
    REQUIRE(p.kappa_p == 10.0);
    REQUIRE(p.kappa_is == 1.0);
    REQUIRE_THAT(p.g_p, WithinRel(optimal_coupling(10.0), 1e-14));
    REQUIRE_THAT(p.g_is, WithinRel(optimal_coupling(1.0), 1e-14));
    REQUIRE_FALSE(pump_spec(c).has_value());

    REQUIRE(parse_config("").kappa_p_ratio == 1.0);
}

TEST_CASE("the pump width key produces the matching spectral density", "[config]") {
    const auto c = parse_config("kappa_p_ratio = 6.6\npump_fwhm_over_kappa_p = 0.45\n");
    const auto pump = pump_spec(c);
    REQUIRE(pump.has_value());
    const double fwhm = 0.45 * 6.6;
    const double ln2 = std::log(2.0);
    REQUIRE_THAT(pump->sigma, WithinRel(fwhm * fwhm / (8.0 * ln2), 1e-14));
    REQUIRE(pump->omega0 == 0.0);
}

TEST_CASE("comments, blank lines and either separator are accepted", "[config]") {
    const std::string doc =
        "# run setup\n"
        "\n"
        "kappa_p_ratio: 6.6   # wide pump ring\n"
        "  grid_n =  257\t\n"
        "tol_k: 1e-5\n";
    const auto c = parse_config(doc);
    REQUIRE(c.kappa_p_ratio == 6.6);
    REQUIRE(c.grid_n == 257);
    REQUIRE(c.tol_k == 1e-5);
}

TEST_CASE("serialization round-trips exactly", "[config]") {
    RunConfig c;
    c.kappa_p_ratio = 6.6;
    c.g_p_over_opt = 1.1;
    c.g_is_over_opt = 0.30000000000000004; // deliberately not a short decimal
    c.pump_fwhm_over_kappa_p = 1e-5;
    c.grid_n = 1025;
    c.grid_halfwidth_factor = 12.5;
    c.tol_k = 3.3333333333333333e-7;
    REQUIRE(parse_config(serialize_config(c)) == c);

    RunConfig d; // defaults, no pump width
    REQUIRE(parse_config(serialize_config(d)) == d);

    // session-only fields do not affect equality
    RunConfig e = d;
    e.out_dir = "/elsewhere";
    e.heatmap = true;
    e.ratios = {2.0};
    REQUIRE(e == d);
}

TEST_CASE("malformed documents are rejected with context", "[config]") {
    REQUIRE_THROWS_AS(parse_config("kappa_p_ratio\n"), ParseError);
    REQUIRE_THROWS_AS(parse_config("kappa_p_ratio = \n"), ParseError);
    REQUIRE_THROWS_AS(parse_config("kappa_p_ratio = fast\n"), ParseError);
    REQUIRE_THROWS_AS(parse_config("kappa_p_ratio = 1.0 extra\n"), ParseError);
    REQUIRE_THROWS_AS(parse_config("grid_n = 2.5\n"), ParseError);
    REQUIRE_THROWS_AS(parse_config("kappa_p_ratio = 1\nkappa_p_ratio = 2\n"), ParseError);
    REQUIRE_THROWS_AS(parse_config("ring_count = 2\n"), UnknownKey);

    REQUIRE_THROWS_AS(parse_config("kappa_p_ratio = -1\n"), NonPositiveRate);
    REQUIRE_THROWS_AS(parse_config("kappa_p_ratio = 0\n"), NonPositiveRate);
    REQUIRE_THROWS_AS(parse_config("g_p_over_opt = -0.5\n"), NonPositiveRate);
    REQUIRE_THROWS_AS(parse_config("pump_fwhm_over_kappa_p = 0\n"), NonPositiveRate);
    REQUIRE_THROWS_AS(parse_config("tol_k = 0\n"), NonPositiveRate);
    REQUIRE_THROWS_AS(parse_config("grid_halfwidth_factor = -8\n"), NonPositiveRate);

    REQUIRE_THROWS_AS(parse_config("grid_n = 512\n"), ParseError);
    REQUIRE_THROWS_AS(parse_config("grid_n = 1\n"), ParseError);

    try {
        parse_config("kappa_p_ratio = 1\nbogus line\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("config files load through the same parser", "[config]") {
    const std::string path = "test_config_roundtrip.cfg";
    {
        std::ofstream out(path);
        out << "kappa_p_ratio = 6.6\ngrid_n = 129\n";
    }
    const auto c = load_config_file(path);
    REQUIRE(c.kappa_p_ratio == 6.6);
    REQUIRE(c.grid_n == 129);
    std::remove(path.c_str());

    REQUIRE_THROWS_AS(load_config_file("does_not_exist.cfg"), IoError);
}

#include "doctest.h"

#include "permsym/channels.hpp"
#include "permsym/error.hpp"
#include "permsym/oracle/dense.hpp"

using namespace permsym;

TEST_CASE("amplitude damping")
{
    const auto id = adc(0.0);
    CHECK((id.gamma - identity_channel(2).gamma).cwiseAbs().maxCoeff() == 0.0);
    for (double g : {0.0, 0.19, 0.3, 1.0}) {
        const auto c = adc(g);
        CHECK_NOTHROW(validate_channel(c));
        CHECK(entanglement_fidelity(c) == doctest::Approx(adc_uncoded(g)).epsilon(1e-14));
    }
    CHECK(entanglement_fidelity(adc(1.0)) == doctest::Approx(0.25));
    long support = 0;
    const auto c = adc(0.3);
    for (long i = 0; i < 16; ++i) support += c.gamma(i / 4, i % 4) != cplx{};
    CHECK(support == 5);
    CHECK_THROWS_AS(adc(1.5), ArgumentError);
    CHECK_THROWS_AS(adc(-0.1), ArgumentError);
}

TEST_CASE("depolarizing and replacement")
{
    CHECK((depolarizing(0).gamma - identity_channel(2).gamma).cwiseAbs().maxCoeff() == 0.0);
    for (double p : {0.1, 0.2, 1.0}) {
        CHECK_NOTHROW(validate_channel(depolarizing(p)));
        CHECK(entanglement_fidelity(depolarizing(p)) == doctest::Approx(1 - 0.75 * p));
    }
    for (int d = 2; d <= 4; ++d) CHECK(entanglement_fidelity(replacement(d, d)) == doctest::Approx(1.0 / (d * d)));
    CHECK_NOTHROW(validate_channel(replacement(2, 3)));
    CHECK_THROWS_AS(depolarizing(2), ArgumentError);
    CHECK_THROWS_AS(entanglement_fidelity(replacement(2, 3)), ArgumentError);
}

TEST_CASE("flagged channels")
{
    const auto single = flagged({adc(0.2)}, {1.0});
    CHECK((single.gamma - adc(0.2).gamma).cwiseAbs().maxCoeff() == 0.0);
    const auto pair = flagged({identity_channel(2), replacement(2, 2)}, {0.5, 0.5});
    CHECK_NOTHROW(validate_channel(pair));
    CHECK(pair.d_out == 4);
    CHECK_THROWS_AS(flagged({adc(0.1), adc(0.2)}, {0.5, 0.6}), ArgumentError);
    CHECK_THROWS_AS(flagged({adc(0.1), replacement(3, 2)}, {0.5, 0.5}), ArgumentError);

    // Coin between identical channels: tracing out the flag gives the channel.
    const auto coin = flagged({adc(0.3), adc(0.3)}, {0.25, 0.75});
    Eigen::MatrixXcd traced = Eigen::MatrixXcd::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int a2 = 0; a2 < 2; ++a2)
            for (int f = 0; f < 2; ++f)
                for (int b = 0; b < 2; ++b)
                    for (int b2 = 0; b2 < 2; ++b2)
                        traced(a * 2 + b, a2 * 2 + b2) += coin.gamma(a * 4 + 2 * f + b, a2 * 4 + 2 * f + b2);
    CHECK((traced - adc(0.3).gamma).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("tensor product of channels")
{
    const auto t = tensor_product(adc(0.2), depolarizing(0.1));
    CHECK_NOTHROW(validate_channel(t));
    CHECK(entanglement_fidelity(t) == doctest::Approx(adc_uncoded(0.2) * (1 - 0.075)));
}

TEST_CASE("reference curves")
{
    CHECK(leung4(0.0) == doctest::Approx(1.0));
    CHECK(fivequbit(0.0) == doctest::Approx(1.0));
    CHECK(fivequbit(0.05) > depolarizing_uncoded(0.05));
    CHECK(fivequbit(0.5) < depolarizing_uncoded(0.5));
    CHECK(leung4(0.05) > adc_uncoded(0.05));
    CHECK(reference_curve(ReferenceKind::FiveQubit, 0.1) == fivequbit(0.1));
}

TEST_CASE("JSON round trip and errors")
{
    for (const auto& c : {adc(0.37), depolarizing(0.2), flagged({identity_channel(2), replacement(2, 2)}, {0.3, 0.7})}) {
        const auto back = channel_from_json(channel_to_json(c));
        CHECK(back.d_in == c.d_in);
        CHECK(back.d_out == c.d_out);
        CHECK((back.gamma - c.gamma).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(back.flags.has_value() == c.flags.has_value());
    }
    auto j = channel_to_json(adc(0.1));
    j["normalization"] = "phi";
    for (auto& e : j["entries"]) e["re"] = e["re"].get<double>() / 2;
    CHECK((channel_from_json(j).gamma - adc(0.1).gamma).cwiseAbs().maxCoeff() < 1e-15);

    auto bad = channel_to_json(adc(0.1));
    bad["entries"][2]["row"] = 99;
    try {
        channel_from_json(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("entries[2]") != std::string::npos);
    }
    auto not_tp = channel_to_json(adc(0.1));
    not_tp["entries"][0]["re"] = 2.0;
    CHECK_THROWS_AS(channel_from_json(not_tp), ParseError);
    CHECK_THROWS_AS(channel_from_json(nlohmann::json::object()), ParseError);
}

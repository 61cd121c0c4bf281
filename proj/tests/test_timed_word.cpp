#include <catch2/catch_amalgamated.hpp>

#include <mitlkit/timed_word.hpp>

using namespace mitlkit;

TEST_CASE("construction validates timestamps") {
    CHECK_NOTHROW(TimedWord({{"a", Rational(0)}, {"b", Rational(0)}, {"a", Rational(2)}}));
    CHECK_THROWS_AS(TimedWord({{"a", Rational(1)}, {"b", Rational(1, 2)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TimedWord({{"a", Rational(-1)}}), std::invalid_argument);
    CHECK(TimedWord().empty());
    CHECK(TimedWord().size() == 0);
}

TEST_CASE("delays measure from time origin zero") {
    const TimedWord w({{"a", Rational(1, 2)}, {"b", Rational(1, 2)}, {"c", Rational(2)}});
    CHECK(w.delay(0) == Rational(1, 2));
    CHECK(w.delay(1) == Rational(0));
    CHECK(w.delay(2) == Rational(3, 2));
    CHECK(w[1].letter == "b");
    CHECK(w.letters() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("parse reads the printed form") {
    const TimedWord w = TimedWord::parse("(a,0.1)(b,2)");
    REQUIRE(w.size() == 2);
    CHECK(w[0] == TimedEvent{"a", Rational(1, 10)});
    CHECK(w[1] == TimedEvent{"b", Rational(2)});
    CHECK(w.to_string() == "(a,0.1)(b,2)");

    CHECK(TimedWord::parse("") == TimedWord());
    CHECK(TimedWord::parse("  ( a , 1/2 ) ( b_2 , 3 ) ").to_string() == "(a,0.5)(b_2,3)");
    CHECK(TimedWord::parse("(sigma,1.5)")[0].letter == "sigma");
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(TimedWord::parse("a,1)"), std::invalid_argument);
    CHECK_THROWS_AS(TimedWord::parse("(,1)"), std::invalid_argument);
    CHECK_THROWS_AS(TimedWord::parse("(a 1)"), std::invalid_argument);
    CHECK_THROWS_AS(TimedWord::parse("(a,1"), std::invalid_argument);
    CHECK_THROWS_AS(TimedWord::parse("(a,)"), std::invalid_argument);
    CHECK_THROWS_AS(TimedWord::parse("(a,2)(b,1)"), std::invalid_argument);
}

TEST_CASE("round trip preserves the word") {
    const char* samples[] = {
        "(a,0)",
        "(a,0)(a,0)(a,0)",
        "(x,0.25)(y,0.25)(x,1.75)(z,6)",
        "(a,1/3)(b,2/3)",
    };
    for (const char* s : samples) {
        const TimedWord w = TimedWord::parse(s);
        CAPTURE(s);
        CHECK(TimedWord::parse(w.to_string()) == w);
    }
}

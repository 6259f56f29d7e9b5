#include <random>

#include "doctest.h"
#include "lpvkit/words.hpp"
#include "test_support.hpp"

using namespace lpv;
using lpvtest::word;

TEST_CASE("enumerate_words order and size") {
    SUBCASE("binary alphabet up to length 2") {
        const auto words = enumerate_words(2, 2);
        std::vector<std::string> got;
        for (const auto& w : words) got.push_back(w.str());
        CHECK(got == std::vector<std::string>{"e", "1", "2", "11", "12", "21", "22"});
    }
    SUBCASE("unary alphabet") {
        const auto words = enumerate_words(1, 3);
        std::vector<std::string> got;
        for (const auto& w : words) got.push_back(w.str());
        CHECK(got == std::vector<std::string>{"e", "1", "11", "111"});
    }
    SUBCASE("ternary alphabet, length 1") {
        const auto words = enumerate_words(3, 1);
        std::vector<std::string> got;
        for (const auto& w : words) got.push_back(w.str());
        CHECK(got == std::vector<std::string>{"e", "1", "2", "3"});
    }
    SUBCASE("duplicate-free and totally ordered") {
        const auto words = enumerate_words(3, 4);
        CHECK(words.size() == 1 + 3 + 9 + 27 + 81);
        for (std::size_t i = 1; i < words.size(); ++i) CHECK(words[i - 1] < words[i]);
    }
}

TEST_CASE("word textual form round trip") {
    CHECK(word("e").empty());
    CHECK(word("e").str() == "e");
    CHECK(word("21").str() == "21");
    CHECK(word("121").size() == 3);
    CHECK_THROWS_AS(ScheduleWord::parse("1a"), ParseError);
    CHECK_THROWS_AS(ScheduleWord::parse("102"), ParseError);
}

TEST_CASE("p_of_word") {
    const ScheduleWeights weights((Vector(2) << 1.0, 0.75).finished());
    CHECK(weights.of_word(word("e")) == 1.0);
    CHECK(weights.of_word(word("21")) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(weights.of_word(word("22")) == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK_THROWS_AS(ScheduleWeights((Vector(2) << 0.9, 0.75).finished()), ValidationError);
    CHECK_THROWS_AS(ScheduleWeights((Vector(2) << 1.0, -0.5).finished()), ValidationError);
}

TEST_CASE("mu_product") {
    Matrix mu(5, 2);
    mu.col(0).setOnes();
    mu.col(1) << 0.1, 0.2, 0.5, -1.0, 0.3;
    SUBCASE("constant channel") {
        for (Index t = 0; t < 5; ++t) CHECK(mu_product(word("1"), mu, t) == 1.0);
    }
    SUBCASE("empty word convention") { CHECK(mu_product(word("e"), mu, 3) == 1.0); }
    SUBCASE("two-letter product ending at t") {
        // mu_2(t-1) * mu_2(t) with t = 3: 0.5 * -1.0
        CHECK(mu_product(word("22"), mu, 3) == doctest::Approx(-0.5).epsilon(1e-15));
    }
    SUBCASE("out-of-range time index") {
        CHECK_THROWS_AS(mu_product(word("22"), mu, 0), RangeError);
        CHECK_THROWS_AS(mu_product(word("1"), mu, 5), RangeError);
    }
}

TEST_CASE("word_matrix_product") {
    const auto model = lpvtest::sec6_model();
    SUBCASE("empty word gives the identity") {
        CHECK(word_matrix_product(word("e"), model.A).isApprox(Matrix::Identity(3, 3)));
    }
    SUBCASE("reversed-order product") {
        const Matrix m = word_matrix_product(word("21"), model.A);
        CHECK(m.isApprox(model.A[0] * model.A[1], 1e-15));
        CHECK(m(0, 0) == 0.0);
    }
    SUBCASE("square of the first matrix") {
        const Matrix m = word_matrix_product(word("11"), model.A);
        CHECK(m(0, 0) == doctest::Approx(0.16).epsilon(1e-15));
        CHECK(m(0, 1) == doctest::Approx(0.16).epsilon(1e-15));
        CHECK(m(0, 2) == 0.0);
    }
    SUBCASE("shape errors") {
        std::vector<Matrix> bad{Matrix::Zero(2, 3)};
        CHECK_THROWS_AS(word_matrix_product(word("1"), bad), ShapeError);
    }
}

TEST_CASE("word algebra properties") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len(0, 4);
    std::uniform_int_distribution<int> letter(1, 3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);

    std::vector<Matrix> family(3);
    for (auto& m : family) {
        m.resize(3, 3);
        for (Index i = 0; i < 3; ++i)
            for (Index j = 0; j < 3; ++j) m(i, j) = coef(rng);
    }
    const ScheduleWeights weights((Vector(3) << 1.0, 0.8, 1.3).finished());

    const auto random_word = [&] {
        std::vector<int> letters;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) letters.push_back(letter(rng));
        return ScheduleWord(letters);
    };

    for (int trial = 0; trial < 100; ++trial) {
        const ScheduleWord v = random_word();
        const ScheduleWord w = random_word();
        const ScheduleWord vw = v.concat(w);
        // Concatenation law from the reversed product definition.
        CHECK(word_matrix_product(vw, family)
                  .isApprox(word_matrix_product(w, family) * word_matrix_product(v, family),
                            1e-12));
        CHECK(weights.of_word(vw) ==
              doctest::Approx(weights.of_word(v) * weights.of_word(w)).epsilon(1e-12));
    }
}

TEST_CASE("mu_product concatenation identity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-1.5, 1.5);
    Matrix mu(40, 3);
    mu.col(0).setOnes();
    for (Index t = 0; t < 40; ++t)
        for (Index j = 1; j < 3; ++j) mu(t, j) = coef(rng);

    const ScheduleWord v = word("213");
    const ScheduleWord w = word("32");
    for (Index t = 10; t < 40; ++t) {
        const double lhs = mu_product(v.concat(w), mu, t);
        const double rhs = mu_product(v, mu, t - static_cast<Index>(w.size())) *
                           mu_product(w, mu, t);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

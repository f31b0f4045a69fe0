#include "common.hpp"

using namespace obt;

TEST_CASE("admissibility") {
    CHECK(is_admissible("12"));
    CHECK_FALSE(is_admissible("11"));
    CHECK_FALSE(is_admissible("121"));
    CHECK(is_admissible("1213"));
    CHECK_THROWS_AS(is_admissible("1a"), DomainError);
    CHECK_THROWS_AS(is_admissible("14", 3), DomainError);
}

TEST_CASE("transpose and canonical rotation") {
    CHECK(transpose("123") == "321");
    CHECK(transpose("12") == "21");
    CHECK(transpose(transpose("13212")) == "13212");
    CHECK(canonical("312") == "123");
    CHECK(canonical("21") == "12");
}

TEST_CASE("palindromes") {
    auto p = is_palindromic("12");
    REQUIRE(p);
    CHECK(p->pos_q != p->pos_zero);
    auto q = is_palindromic("1213");
    REQUIRE(q);
    CHECK(q->pos_q == 1);
    CHECK(q->pos_zero == 3);
    CHECK_FALSE(is_palindromic("123"));
}

TEST_CASE("homoclinic family") {
    CHECK(homoclinic_family("12", "32", 3) == "32121212");
    CHECK(homoclinic_family("12", "32", 1) == "3212");
    for (int n = 1; n <= 8; ++n) CHECK(is_palindromic(homoclinic_family("12", "32", n)));
    CHECK_THROWS_AS(homoclinic_family("12", "31", 2), DomainError);
    CHECK(enumerate_admissible(3, 2).size() == 6);
}

#include "common.hpp"

#include <filesystem>

using namespace obt;

TEST_CASE("symmetric table gives equal two-periodic lengths") {
    Table t = equilateral();
    auto st = build_spectrum(t, {"12", "13", "23", "21"}, 256);
    PrecisionGuard g(256);
    CHECK(st.entries.size() == 3);
    CHECK(close(st.length("12"), st.length("13"), tenpow(-14)));
    CHECK(close(st.length("13"), st.length("23"), tenpow(-14)));
    CHECK(st.find("21") == st.find("12"));
    CHECK(st.find("21")->aliases.size() == 2);
    CHECK(close(st.length("12"), Real(8), tenpow(-70)));
}

TEST_CASE("empty spectrum and inadmissible words") {
    Table t = equilateral();
    auto st = build_spectrum(t, {}, 128);
    CHECK(st.entries.empty());
    CHECK_FALSE(st.table_hash.empty());
    CHECK_THROWS_AS(build_spectrum(t, {"11"}, 128), DomainError);
    CHECK_THROWS_AS(st.length("12"), NotFound);
}

TEST_CASE("write, read and query") {
    Table t = equilateral();
    auto st = build_spectrum(t, {"12", "123"}, 192);
    auto path = (std::filesystem::temp_directory_path() / "ob_spectrum_test.jsonl").string();
    write_spectrum(st, path);
    auto back = read_spectrum(path);
    CHECK(back.table_hash == st.table_hash);
    CHECK(back.bits == 192);
    CHECK(back.entries.size() == 2);
    CHECK(back.find("231")->length == st.find("123")->length);
    auto q = query(path, "312", st.table_hash);
    CHECK_FALSE(q.stale);
    CHECK(q.entry.key == "123");
    CHECK(query(path, "12", table_fingerprint(pair_at("6"))).stale);
    CHECK_THROWS_AS(query(path, "11"), DomainError);
    CHECK_THROWS_AS(query(path, "13"), NotFound);
    std::filesystem::remove(path);
}

TEST_CASE("fingerprint depends on the geometry") {
    CHECK(table_fingerprint(pair_at("6")) == table_fingerprint(pair_at("6")));
    CHECK(table_fingerprint(pair_at("6")) != table_fingerprint(pair_at("6.5")));
}

#pragma once

#include <openssl/sha.h>

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "solver.hpp"

namespace ob {

inline constexpr int kFormatVersion = 1;

struct SpectrumEntry {
    Word key;                  // canonical rotation
    std::vector<Word> aliases; // spellings requested by the caller
    std::string length, le, residual;
    unsigned bits = 0;
    std::string error;         // non-empty when the solve failed
    bool ok() const { return error.empty(); }
};

struct SpectrumTable {
    std::string table_hash;
    unsigned bits = 0;
    std::map<Word, SpectrumEntry> entries;

    const SpectrumEntry* find(const Word& w) const {
        auto it = entries.find(canonical(w));
        return it == entries.end() ? nullptr : &it->second;
    }
    Real length(const Word& w) const;
    Real le(const Word& w) const;
};

struct NotFound : std::out_of_range {
    using std::out_of_range::out_of_range;
};

inline const SpectrumEntry& require(const SpectrumTable& st, const Word& w) {
    if (!is_admissible(w)) throw DomainError("inadmissible word " + w);
    const SpectrumEntry* e = st.find(w);
    if (!e) throw NotFound("word " + w + " not in spectrum");
    if (!e->ok()) throw NotFound("word " + w + " failed: " + e->error);
    return *e;
}
inline Real SpectrumTable::length(const Word& w) const { return from_decimal(require(*this, w).length); }
inline Real SpectrumTable::le(const Word& w) const { return from_decimal(require(*this, w).le); }

inline std::string sha256_hex(const std::string& s) {
    unsigned char md[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), md);
    std::ostringstream os;
    for (unsigned char c : md) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(c);
    return os.str();
}

inline std::string table_fingerprint(const Table& t) {
    std::ostringstream os;
    for (const auto& sp : t.specs()) {
        os << static_cast<int>(sp.kind) << '|' << sp.cx << '|' << sp.cy << '|' << sp.radius << '|' << sp.semi_a << '|'
           << sp.semi_b << '|' << sp.angle << '|';
        for (auto& c : sp.rho_cos) os << c << ',';
        os << '|';
        for (auto& c : sp.rho_sin) os << c << ',';
        os << '|' << sp.p0[0] << ',' << sp.p0[1] << ',' << sp.p1[0] << ',' << sp.p1[1] << '\n';
    }
    return sha256_hex(os.str());
}

inline int serial_digits(unsigned bits) { return static_cast<int>(bits * 0.30102999566398) + 3; }

inline SpectrumEntry make_entry(const PeriodicOrbit& o) {
    SpectrumEntry e;
    e.key = canonical(o.word);
    e.aliases = {o.word};
    int dg = serial_digits(o.bits);
    e.length = to_decimal(o.length, dg);
    e.le = to_decimal(o.le, dg);
    e.residual = to_decimal(o.residual, 6);
    e.bits = o.bits;
    return e;
}

inline void merge(SpectrumTable& st, SpectrumEntry e, const Word& alias) {
    auto it = st.entries.find(e.key);
    if (it == st.entries.end()) {
        e.aliases = {alias};
        st.entries.emplace(e.key, std::move(e));
    } else if (std::find(it->second.aliases.begin(), it->second.aliases.end(), alias) == it->second.aliases.end()) {
        it->second.aliases.push_back(alias);
    }
}

// words are solved independently; failures are recorded per word
inline SpectrumTable build_spectrum(const Table& t, const std::vector<Word>& words, unsigned bits) {
    PrecisionGuard g(bits);
    SpectrumTable st;
    st.table_hash = table_fingerprint(t);
    st.bits = bits;
    for (const auto& w : words) {
        if (!is_admissible(w, t.size())) throw DomainError("inadmissible word " + w);
        Word key = canonical(w);
        if (st.entries.count(key)) {
            merge(st, st.entries[key], w);
            continue;
        }
        try {
            merge(st, make_entry(solve_orbit(t, key)), w);
        } catch (const std::exception& ex) {
            SpectrumEntry e;
            e.key = key;
            e.bits = bits;
            e.error = ex.what();
            merge(st, e, w);
        }
    }
    return st;
}

// sigma, tau sigma^n for n in [n_min, n_max], warm-started along the family
inline void add_family(SpectrumTable& st, const Table& t, const Word& sigma, const Word& tau, int n_min, int n_max) {
    PrecisionGuard g(st.bits);
    HomoclinicData hd = solve_family(t, sigma, tau, n_min, n_max);
    merge(st, make_entry(hd.base), sigma);
    for (auto& [n, o] : hd.orbits) merge(st, make_entry(o), o.word);
}

inline nlohmann::json entry_json(const SpectrumEntry& e) {
    nlohmann::json j{{"word", e.key}, {"aliases", e.aliases}, {"bits", e.bits}};
    if (e.ok()) {
        j["length"] = e.length;
        j["le"] = e.le;
        j["residual"] = e.residual;
    } else {
        j["error"] = e.error;
    }
    return j;
}

inline void write_spectrum(const SpectrumTable& st, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    nlohmann::json h{{"format_version", kFormatVersion},
                     {"kind", "mls-header"},
                     {"table_hash", st.table_hash},
                     {"precision_bits", st.bits},
                     {"entries", st.entries.size()}};
    os << h.dump() << '\n';
    for (auto& [k, e] : st.entries) os << entry_json(e).dump() << '\n';
}

inline SpectrumTable read_spectrum(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty spectrum file " + path);
    auto h = nlohmann::json::parse(line);
    if (h.value("kind", "") != "mls-header") throw std::runtime_error("missing spectrum header in " + path);
    if (h.value("format_version", 0) != kFormatVersion) throw std::runtime_error("unsupported spectrum format version");
    SpectrumTable st;
    st.table_hash = h.at("table_hash").get<std::string>();
    st.bits = h.at("precision_bits").get<unsigned>();
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        SpectrumEntry e;
        e.key = j.at("word").get<std::string>();
        e.aliases = j.at("aliases").get<std::vector<std::string>>();
        e.bits = j.at("bits").get<unsigned>();
        if (j.contains("error")) {
            e.error = j["error"].get<std::string>();
        } else {
            e.length = j.at("length").get<std::string>();
            e.le = j.at("le").get<std::string>();
            e.residual = j.at("residual").get<std::string>();
        }
        st.entries.emplace(e.key, e);
    }
    return st;
}

struct QueryResult {
    SpectrumEntry entry;
    bool stale = false; // table hash differs from the expected one
};

inline QueryResult query(const std::string& path, const Word& w, const std::string& expected_hash = "") {
    if (!is_admissible(w)) throw DomainError("inadmissible word " + w);
    SpectrumTable st = read_spectrum(path);
    QueryResult q{require(st, w), !expected_hash.empty() && expected_hash != st.table_hash};
    return q;
}

} // namespace ob

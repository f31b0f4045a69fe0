#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "openbilliards/pipeline.hpp"

using namespace ob;
namespace fs = std::filesystem;

namespace {

// exit codes: 0 success, 1 failed check or stage, 2 bad input
constexpr int kOk = 0, kFail = 1, kInput = 2;

struct Flags {
    std::optional<unsigned> precision;
    std::optional<int> n_min, n_max, order, jet_order, threads;
    std::optional<std::string> out;
};

void add_common(CLI::App* c, Flags& f) {
    c->add_option("--precision", f.precision, "working precision in bits (env OPENBILLIARDS_PRECISION)");
    c->add_option("--n-min", f.n_min, "smallest family index");
    c->add_option("--n-max", f.n_max, "largest family index");
    c->add_option("--order", f.order, "truncation order P of the Lyapunov series");
    c->add_option("--jet-order", f.jet_order, "jet order K of the normal form");
    c->add_option("--out", f.out, "output file or directory");
    c->add_option("--threads", f.threads, "worker threads for independent jobs");
}

RunConfig apply(RunConfig rc, const Flags& f, bool table_had_precision) {
    if (!table_had_precision) rc.precision = env_precision(rc.precision);
    if (f.precision) rc.precision = *f.precision;
    if (f.n_min) rc.n_min = *f.n_min;
    if (f.n_max) rc.n_max = *f.n_max;
    if (f.order) rc.order = *f.order;
    if (f.jet_order) rc.jet_order = *f.jet_order;
    if (f.threads) rc.threads = *f.threads;
    if (f.out) rc.out = *f.out;
    rc.validate();
    return rc;
}

TableConfig load(const std::string& path, const Flags& f) {
    TableConfig tc = load_config(path);
    bool has_prec = false;
    {
        auto root = toml::parse_file(path);
        has_prec = static_cast<bool>(root["run"]["precision"]);
    }
    tc.run = apply(tc.run, f, has_prec);
    return tc;
}

void write_file(const fs::path& p, const std::string& s) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << s;
}

void emit(const json& j, const std::optional<std::string>& out) {
    if (out) write_file(*out, j.dump(2) + "\n");
    else std::cout << j.dump(2) << "\n";
}

int cmd_validate(const std::string& path, const Flags& f) {
    TableConfig tc = load(path, f);
    PrecisionGuard g(tc.run.precision);
    Table t = tc.table();
    auto r = check_non_eclipse(t);
    if (r.pass) {
        std::cout << "PASS non-eclipse: " << t.size() << " scatterers, smallest separation " << r.margin << "\n";
        return kOk;
    }
    std::cout << "FAIL non-eclipse: hull of scatterers " << r.triple[0] << " and " << r.triple[1]
              << " meets scatterer " << r.triple[2] << " (penetration depth " << r.depth << ")\n";
    return kFail;
}

int cmd_orbit(const std::string& path, const std::vector<std::string>& words, const Flags& f) {
    TableConfig tc = load(path, f);
    PrecisionGuard g(tc.run.precision);
    Table t = tc.table();
    json out{{"format_version", kFormatVersion}, {"kind", "orbits"}, {"precision_bits", tc.run.precision},
             {"table_hash", table_fingerprint(t)}, {"generated_at", utc_now()}, {"orbits", json::array()}};
    int rc = kOk;
    for (auto& w : words) {
        try {
            if (!is_admissible(w, t.size())) throw DomainError("inadmissible word " + w);
            out["orbits"].push_back(orbit_json(solve_orbit(t, w)));
        } catch (const std::exception& e) {
            out["orbits"].push_back({{"word", w}, {"error", e.what()}});
            std::cerr << "orbit " << w << ": " << e.what() << "\n";
            rc = kFail;
        }
    }
    emit(out, f.out);
    return rc;
}

// word-list jobs run on a pool; results are merged in input order
SpectrumTable spectrum_from_words(const Table& t, const std::vector<Word>& words, unsigned bits, int threads) {
    std::vector<std::optional<SpectrumEntry>> res(words.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        PrecisionGuard g(bits);
        for (size_t k; (k = next++) < words.size();) {
            SpectrumEntry e;
            e.key = canonical(words[k]);
            e.bits = bits;
            try {
                e = make_entry(solve_orbit(t, e.key));
            } catch (const std::exception& ex) {
                e.error = ex.what();
            }
            res[k] = e;
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    SpectrumTable st;
    st.bits = bits;
    st.table_hash = table_fingerprint(t);
    for (size_t k = 0; k < words.size(); ++k) merge(st, *res[k], words[k]);
    return st;
}

int cmd_spectrum(const std::string& path, const std::string& words_file, const Flags& f) {
    TableConfig tc = load(path, f);
    const RunConfig& rc = tc.run;
    PrecisionGuard g(rc.precision);
    Table t = tc.table();
    std::string out = f.out.value_or(tc.run.name.empty() ? "spectrum.mls.jsonl" : tc.run.name + ".mls.jsonl");
    int code = kOk;
    SpectrumTable st;
    if (!words_file.empty()) {
        std::ifstream is(words_file);
        if (!is) throw std::runtime_error("cannot read " + words_file);
        std::vector<Word> words;
        std::string line;
        for (int ln = 1; std::getline(is, line); ++ln) {
            auto b = line.find_first_not_of(" \t\r"), e = line.find_last_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#') continue;
            Word w = line.substr(b, e - b + 1);
            bool ok = false;
            try {
                ok = is_admissible(w, t.size());
            } catch (const DomainError&) {
            }
            if (!ok) {
                std::cerr << words_file << ":" << ln << ": rejected: inadmissible word " << w << "\n";
                code = kFail;
                continue;
            }
            words.push_back(w);
        }
        st = spectrum_from_words(t, words, rc.precision, rc.threads);
    } else {
        st.bits = rc.precision;
        st.table_hash = table_fingerprint(t);
        add_family(st, t, rc.sigma, rc.tau, rc.n_min, rc.n_max);
    }
    for (auto& [k, e] : st.entries)
        if (!e.ok()) std::cerr << "word " << k << ": " << e.error << "\n", code = kFail;
    write_spectrum(st, out);
    std::cout << "wrote " << st.entries.size() << " entries to " << out << "\n";
    return code;
}

int cmd_extract(const std::string& spec_path, const std::string& table_path, const Word& sigma, const Word& tau,
                const std::string& a1_tol, const Flags& f) {
    SpectrumTable st = read_spectrum(spec_path);
    RunConfig rc;
    rc = apply(rc, f, true);
    PrecisionGuard g(st.bits);
    ExtractOptions o;
    o.sigma = sigma;
    o.tau = tau;
    // default range: the longest run of family members present in the file
    int lo = 0, hi = -1;
    for (int n = 1, start = 0; n <= 1024; ++n) {
        if (!st.find(homoclinic_family(sigma, tau, n))) {
            start = 0;
            continue;
        }
        if (!start) start = n;
        if (n - start > hi - lo) lo = start, hi = n;
    }
    o.n_min = f.n_min.value_or(hi >= lo ? lo : rc.n_min);
    o.n_max = f.n_max.value_or(hi >= lo ? hi : rc.n_max);
    o.order = f.order.value_or(3);
    o.a1_tol = Real(a1_tol);
    std::optional<Table> t;
    if (!table_path.empty()) {
        TableConfig tc = load_config(table_path);
        t = tc.table();
        o.table = &*t;
        o.pair_k = tc.run.pair_k;
    }
    auto r = run_extract(st, o);
    r.report["generated_at"] = utc_now();
    fs::path dir = f.out.value_or("extract");
    fs::create_directories(dir);
    write_file(dir / "report.json", r.report.dump(2) + "\n");
    for (auto& c : r.csv) write_file(dir / (c.name + ".csv"), c.str());
    for (auto& e : r.log.errors)
        std::cerr << "stage " << e["stage"].get<std::string>() << ": " << e["error"].get<std::string>() << "\n";
    std::cout << "wrote " << (dir / "report.json").string() << "\n";
    return r.log.ok() ? kOk : kFail;
}

int cmd_nf(const std::string& path, bool glue, const Flags& f) {
    TableConfig tc = load(path, f);
    PrecisionGuard g(tc.run.precision);
    StageLog log;
    auto r = run_nf(tc.table(), tc.run, glue, log);
    r.report["errors"] = log.errors;
    r.report["generated_at"] = utc_now();
    if (r.gd) r.report["scaled_coefficients"] = coefficients_json(scaled_coefficients(r.nf, *r.gd, tc.run.order), "normal form and gluing");
    emit(r.report, f.out);
    for (auto& e : log.errors)
        std::cerr << "stage " << e["stage"].get<std::string>() << ": " << e["error"].get<std::string>() << "\n";
    return log.ok() ? kOk : kFail;
}

int cmd_verify(const std::string& path, const Flags& f) {
    TableConfig tc = load(path, f);
    auto v = run_verify(tc);
    v.report["generated_at"] = utc_now();
    fs::path dir = f.out.value_or("verify");
    fs::create_directories(dir);
    write_file(dir / "verify.json", v.report.dump(2) + "\n");
    for (auto& c : v.csv) write_file(dir / (c.name + ".csv"), c.str());
    if (!v.spectrum.entries.empty()) write_spectrum(v.spectrum, (dir / "spectrum.mls.jsonl").string());
    for (auto& c : v.checks)
        std::cout << (c.skipped ? "SKIP " : c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.value
                  << (c.bound.empty() ? "" : " (bound " + c.bound + ")") << (c.detail.empty() ? "" : "  " + c.detail)
                  << "\n";
    for (auto& e : v.report["errors"])
        std::cerr << "stage " << e["stage"].get<std::string>() << ": " << e["error"].get<std::string>() << "\n";
    return v.ok() && v.report["errors"].empty() ? kOk : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"openbilliards: periodic orbits, length spectra and their inversion for open billiards"};
    app.require_subcommand(1);
    Flags f;
    std::string table, spectrum, words_file, table_opt, a1_tol = "1e-12";
    std::vector<std::string> words;
    Word sigma = "12", tau = "32";
    bool glue = true;

    auto* v = app.add_subcommand("validate", "check convexity and the non-eclipse condition");
    v->add_option("table", table, "table config (TOML)")->required();
    add_common(v, f);

    auto* o = app.add_subcommand("orbit", "solve periodic orbits for the given words");
    o->add_option("table", table)->required();
    o->add_option("words", words)->required();
    add_common(o, f);

    auto* s = app.add_subcommand("spectrum", "build a .mls.jsonl spectrum (word list or the homoclinic family)");
    s->add_option("table", table)->required();
    s->add_option("--words", words_file, "file with one word per line");
    add_common(s, f);

    auto* e = app.add_subcommand("extract", "recover invariants from a spectrum file");
    e->add_option("spectrum", spectrum)->required();
    e->add_option("--table", table_opt, "table config, enables the semi-blind S-trace route");
    e->add_option("--sigma", sigma);
    e->add_option("--tau", tau);
    e->add_option("--a1-tol", a1_tol, "degeneracy tolerance on the first Birkhoff invariant");
    add_common(e, f);

    auto* n = app.add_subcommand("nf", "Birkhoff normal form and gluing data of a 2-periodic orbit");
    n->add_option("table", table)->required();
    n->add_flag("!--no-glue", glue, "skip the gluing map");
    add_common(n, f);

    auto* y = app.add_subcommand("verify", "forward, spectrum, inverse and cross-checks on one table");
    y->add_option("table", table)->required();
    add_common(y, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        int c = app.exit(ex);
        return c == 0 ? kOk : kInput;
    }
    try {
        if (*v) return cmd_validate(table, f);
        if (*o) return cmd_orbit(table, words, f);
        if (*s) return cmd_spectrum(table, words_file, f);
        if (*e) return cmd_extract(spectrum, table_opt, sigma, tau, a1_tol, f);
        if (*n) return cmd_nf(table, glue, f);
        if (*y) return cmd_verify(table, f);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kInput;
    } catch (const toml::parse_error& ex) {
        std::cerr << "parse error: " << ex.description() << "\n";
        return kInput;
    } catch (const DomainError& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return kInput;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kFail;
    }
    return kOk;
}

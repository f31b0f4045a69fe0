#pragma once

#include <charconv>
#include <optional>

#include "coding.hpp"
#include "geometry.hpp"
#include "toml.hpp"

namespace ob {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// settings a table file may carry; command-line flags override them
struct RunConfig {
    std::string path, name;
    unsigned precision = 256;
    int n_min = 4, n_max = 24;
    int order = 4;
    int jet_order = 12;
    std::string out = ".";
    int threads = 1;
    Word sigma = "12", tau = "32";
    int pair_j = 1, pair_k = 2, third = 3;

    void validate() const {
        if (precision < 64) throw ConfigError("precision must be at least 64 bits");
        if (n_min < 1 || n_max < n_min) throw ConfigError("empty n-range");
        if (order < 1 || order > 12) throw ConfigError("order must lie in 1..12");
        if (jet_order < 2) throw ConfigError("jet order must be at least 2");
        if (threads < 1) throw ConfigError("thread count must be positive");
    }
};

struct TableConfig {
    RunConfig run;
    std::vector<CurveSpec> specs;
    Table table() const { return Table(specs); }
};

namespace detail {

// numbers may be written as strings (exact) or TOML numbers (read as the shortest double repr)
inline std::string num(const toml::node* n, const std::string& what) {
    if (!n) throw ConfigError("missing " + what);
    if (auto s = n->value_exact<std::string>()) {
        try {
            (void)Real(*s);
        } catch (const std::exception&) {
            throw ConfigError(what + ": not a number: " + *s);
        }
        return *s;
    }
    if (auto i = n->value_exact<int64_t>()) return std::to_string(*i);
    if (auto d = n->value_exact<double>()) {
        char buf[64];
        auto r = std::to_chars(buf, buf + sizeof buf, *d);
        return std::string(buf, r.ptr);
    }
    throw ConfigError(what + ": expected a number");
}

inline std::vector<std::string> nums(const toml::node* n, const std::string& what, size_t min_len = 0) {
    std::vector<std::string> v;
    if (!n) {
        if (min_len) throw ConfigError("missing " + what);
        return v;
    }
    auto* a = n->as_array();
    if (!a) throw ConfigError(what + ": expected an array");
    for (size_t i = 0; i < a->size(); ++i) v.push_back(num(a->get(i), what + "[" + std::to_string(i) + "]"));
    if (v.size() < min_len) throw ConfigError(what + ": too few entries");
    return v;
}

inline std::array<std::string, 2> pair_of(const toml::node* n, const std::string& what) {
    auto v = nums(n, what, 2);
    if (v.size() != 2) throw ConfigError(what + ": expected two entries");
    return {v[0], v[1]};
}

template <class T>
void opt(const toml::table& t, const char* key, T& dst) {
    if (auto* n = t.get(key)) {
        auto v = n->value<T>();
        if (!v) throw ConfigError(std::string("run.") + key + ": wrong type");
        dst = *v;
    }
}

inline CurveSpec curve(const toml::table& s, int idx) {
    std::string where = "scatterer " + std::to_string(idx);
    auto kind = s["kind"].value<std::string>();
    if (!kind) throw ConfigError(where + ": missing kind");
    CurveSpec c;
    if (*kind == "circle") {
        auto ctr = pair_of(s.get("center"), where + ".center");
        c = CurveSpec::circle(ctr[0], ctr[1], num(s.get("radius"), where + ".radius"));
    } else if (*kind == "ellipse") {
        auto ctr = pair_of(s.get("center"), where + ".center");
        auto ax = pair_of(s.get("semi_axes"), where + ".semi_axes");
        std::string ang = s.get("angle") ? num(s.get("angle"), where + ".angle") : "0";
        c = CurveSpec::ellipse(ctr[0], ctr[1], ax[0], ax[1], ang);
    } else if (*kind == "fourier") {
        auto ctr = pair_of(s.get("center"), where + ".center");
        c = CurveSpec::fourier(ctr[0], ctr[1], nums(s.get("rho_cos"), where + ".rho_cos", 1),
                               nums(s.get("rho_sin"), where + ".rho_sin"));
    } else if (*kind == "segment") {
        c = CurveSpec::segment(pair_of(s.get("from"), where + ".from"), pair_of(s.get("to"), where + ".to"));
    } else {
        throw ConfigError(where + ": unknown kind " + *kind);
    }
    c.label = s["label"].value_or(std::to_string(idx));
    return c;
}

} // namespace detail

inline TableConfig parse_config(const toml::table& root, const std::string& path = "") {
    TableConfig tc;
    tc.run.path = path;
    if (auto v = root["format_version"].value<int64_t>(); v && *v != 1)
        throw ConfigError("unsupported format_version " + std::to_string(*v));
    tc.run.name = root["name"].value_or(std::string{});
    auto* arr = root["scatterer"].as_array();
    if (!arr || arr->empty()) throw ConfigError("no [[scatterer]] entries");
    int idx = 1;
    for (auto& n : *arr) {
        auto* s = n.as_table();
        if (!s) throw ConfigError("scatterer " + std::to_string(idx) + ": expected a table");
        tc.specs.push_back(detail::curve(*s, idx++));
    }
    if (tc.specs.size() > 9) throw ConfigError("at most 9 scatterers");
    if (auto* r = root["run"].as_table()) {
        int64_t prec = tc.run.precision;
        detail::opt(*r, "precision", prec);
        tc.run.precision = static_cast<unsigned>(std::max<int64_t>(prec, 0));
        detail::opt(*r, "n_min", tc.run.n_min);
        detail::opt(*r, "n_max", tc.run.n_max);
        detail::opt(*r, "order", tc.run.order);
        detail::opt(*r, "jet_order", tc.run.jet_order);
        detail::opt(*r, "sigma", tc.run.sigma);
        detail::opt(*r, "tau", tc.run.tau);
        detail::opt(*r, "third", tc.run.third);
        if (auto* p = r->get("pair")) {
            auto* a = p->as_array();
            if (!a || a->size() != 2) throw ConfigError("run.pair: expected two labels");
            tc.run.pair_j = static_cast<int>(a->get(0)->value_or<int64_t>(0));
            tc.run.pair_k = static_cast<int>(a->get(1)->value_or<int64_t>(0));
        }
    }
    int m = static_cast<int>(tc.specs.size());
    for (int lab : {tc.run.pair_j, tc.run.pair_k})
        if (lab < 1 || lab > m) throw ConfigError("run.pair: label out of range");
    return tc;
}

inline TableConfig load_config(const std::string& path) {
    toml::table root;
    try {
        root = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << path << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
        throw ConfigError(os.str());
    }
    return parse_config(root, path);
}

inline TableConfig parse_config_string(std::string_view text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
    return parse_config(root);
}

} // namespace ob

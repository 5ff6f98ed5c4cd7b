#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mt/extraction.hpp"
#include "mt/mazur_tate.hpp"

namespace mt {

// Form ingestion (LMFDB-style JSON), the eigensymbol disk cache, table
// computation with consistency checks, and TSV/JSON (de)serialization shared
// by the CLI commands.

// ---------------------------------------------------------------------------
// Rationals <-> JSON/strings.
// ---------------------------------------------------------------------------
inline Rat parse_rat(const nlohmann::json& v, const std::string& where) {
    try {
        if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
        if (v.is_string()) {
            Rat r(v.get<std::string>());
            r.canonicalize();
            return r;
        }
    } catch (const std::exception&) {
    }
    throw schema_error(where + ": expected an integer or a \"num/den\" string");
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// FormSpec.
// ---------------------------------------------------------------------------
struct FormSpec {
    std::string label;
    Int N;
    long k = 2;
    std::string character = "trivial";
    std::vector<Int> field_poly{Int(0), Int(1)};  // monic; [0,1] => Q
    std::map<long, std::vector<Rat>> an;          // prime -> power-basis coordinates
    Int p;
    long prime_index = 0;

    bool rational() const { return field_poly.size() == 2; }
    int degree() const { return static_cast<int>(field_poly.size()) - 1; }

    // a_p coordinates if present.
    const std::vector<Rat>* ap_coords() const {
        auto it = an.find(mpz_get_si(p.get_mpz_t()));
        return it == an.end() ? nullptr : &it->second;
    }
    bool ap_is_zero() const {
        const auto* c = ap_coords();
        if (!c) return false;
        for (const auto& x : *c) {
            if (x != 0) return false;
        }
        return true;
    }
};

inline FormSpec parse_form_spec(const nlohmann::json& j) {
    FormSpec spec;
    if (!j.is_object()) throw schema_error("form spec: not a JSON object");
    try {
        spec.label = j.at("label").get<std::string>();
        spec.N = Int(static_cast<long>(j.at("level").get<long long>()));
        spec.k = static_cast<long>(j.at("weight").get<long long>());
        spec.p = Int(static_cast<long>(j.at("p").get<long long>()));
    } catch (const nlohmann::json::exception& e) {
        throw schema_error(std::string("form spec: ") + e.what());
    }
    if (j.contains("character")) spec.character = j["character"].get<std::string>();
    if (spec.character != "trivial") {
        throw unsupported_character("form spec: only the trivial character is supported");
    }
    if (j.contains("field_poly")) {
        spec.field_poly.clear();
        for (const auto& c : j["field_poly"]) {
            spec.field_poly.push_back(Int(static_cast<long>(c.get<long long>())));
        }
        if (spec.field_poly.size() < 2 || spec.field_poly.back() != 1) {
            throw schema_error("form spec: field_poly must be monic of degree >= 1");
        }
    }
    if (j.contains("prime_index")) {
        spec.prime_index = static_cast<long>(j["prime_index"].get<long long>());
    }
    if (!j.contains("an") || !j["an"].is_object()) {
        throw missing_eigenvalues("form spec: missing the an map");
    }
    for (const auto& [key, val] : j["an"].items()) {
        long ell = 0;
        try {
            ell = std::stol(key);
        } catch (const std::exception&) {
            throw schema_error("form spec: an key '" + key + "' is not a prime index");
        }
        std::vector<Rat> coords;
        if (val.is_array()) {
            for (const auto& c : val) coords.push_back(parse_rat(c, "an[" + key + "]"));
        } else {
            coords.push_back(parse_rat(val, "an[" + key + "]"));
        }
        if (coords.empty() || static_cast<int>(coords.size()) > spec.degree()) {
            throw schema_error("form spec: an[" + key + "] has " +
                               std::to_string(coords.size()) + " coordinates, field degree is " +
                               std::to_string(spec.degree()));
        }
        spec.an[ell] = std::move(coords);
    }
    if (spec.k < 2) throw schema_error("form spec: weight >= 2 required");
    if (spec.N < 1) throw schema_error("form spec: level >= 1 required");
    if (gcd_int(spec.N, spec.p) != 1) {
        throw level_divisible_by_p("form spec: level " + spec.N.get_str() +
                                   " is divisible by p = " + spec.p.get_str());
    }
    bool have_cut = false;
    for (const auto& [ell, c] : spec.an) {
        if (gcd_int(Int(ell), spec.N) == 1) have_cut = true;
    }
    if (!have_cut) {
        throw missing_eigenvalues("form spec: need a_ell for at least one prime ell coprime "
                                  "to the level");
    }
    return spec;
}

inline FormSpec ingest_form(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open form file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw schema_error("form file " + path + ": " + e.what());
    }
    return parse_form_spec(j);
}

// Primes usable in the eigenvalue cut (coprime to the level), in order.
struct HeckeCut {
    std::vector<Int> primes;
    std::vector<std::vector<Rat>> coords;
};

inline HeckeCut select_cut(const FormSpec& spec) {
    HeckeCut cut;
    for (const auto& [ell, c] : spec.an) {
        if (gcd_int(Int(ell), spec.N) != 1) continue;
        cut.primes.push_back(Int(ell));
        cut.coords.push_back(c);
    }
    return cut;
}

// ---------------------------------------------------------------------------
// Eigensymbol construction (+ disk cache for rational forms).
// ---------------------------------------------------------------------------
template <class S>
SymbolPair<S> build_pair_core(const FormSpec& spec, const PrimeContext& ctx,
                              const std::vector<S>& evs, const HeckeCut& cut) {
    auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(spec.N, spec.k));
    std::vector<QMat> mats;
    mats.reserve(cut.primes.size());
    for (const auto& ell : cut.primes) mats.push_back(spp->plan_matrix(spp->hecke_plan(ell)));
    QMat iota = spp->plan_matrix(spp->iota_plan());
    SymbolPair<S> F;
    F.space = spp;
    F.k = spec.k;
    F.label = spec.label;
    for (size_t i = 0; i < cut.primes.size(); ++i) {
        if (cut.primes[i] == spec.p) F.ap = evs[i];
    }
    F.plus = make_eigensymbol<S>(spp, mats, evs, iota, +1, ctx, spec.label);
    F.minus = make_eigensymbol<S>(spp, mats, evs, iota, -1, ctx, spec.label);
    return F;
}

// Cache key: label, level, weight, p, and the full eigenvalue cut.
inline std::string cache_key(const FormSpec& spec) {
    std::ostringstream blob;
    for (const auto& c : spec.field_poly) blob << c.get_str() << ",";
    for (const auto& [ell, co] : spec.an) {
        blob << ell << ":";
        for (const auto& x : co) blob << rat_str(x) << ",";
    }
    std::ostringstream key;
    key << spec.label << "-N" << spec.N.get_str() << "k" << spec.k << "p" << spec.p.get_str()
        << "-" << std::hex << std::hash<std::string>{}(blob.str());
    std::string s = key.str();
    for (char& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return s;
}

inline std::string cache_directory() {
    if (const char* env = std::getenv("MT_CACHE_DIR")) return env;
    return ".mt-cache";
}

inline SymbolPair<Rat> build_rational_pair(const FormSpec& spec, const PrimeContext& ctx,
                                           bool use_cache = true) {
    HeckeCut cut = select_cut(spec);
    std::vector<Rat> evs;
    for (const auto& c : cut.coords) {
        if (c.size() != 1) {
            throw schema_error("rational form with multi-coordinate eigenvalue");
        }
        evs.push_back(c[0]);
    }
    namespace fs = std::filesystem;
    fs::path cfile = fs::path(cache_directory()) / (cache_key(spec) + ".json");
    if (use_cache && fs::exists(cfile)) {
        try {
            std::ifstream in(cfile);
            nlohmann::json j;
            in >> j;
            auto spp = std::make_shared<const SymbolSpace>(SymbolSpace::build(spec.N, spec.k));
            if (j.at("flat_dim").get<long long>() == spp->flat_dim()) {
                SymbolPair<Rat> F;
                F.space = spp;
                F.k = spec.k;
                F.label = spec.label;
                for (size_t i = 0; i < cut.primes.size(); ++i) {
                    if (cut.primes[i] == spec.p) F.ap = evs[i];
                }
                for (int sign : {+1, -1}) {
                    const auto& je = j.at(sign > 0 ? "plus" : "minus");
                    EigenSymbolT<Rat> es;
                    es.space = spp;
                    es.sign = sign;
                    es.form_label = spec.label;
                    es.scale = parse_rat(je.at("scale"), "cache scale");
                    QVec flat(spp->flat_dim());
                    const auto& arr = je.at("flat");
                    if (static_cast<long>(arr.size()) != spp->flat_dim()) {
                        throw schema_error("cache: flat size mismatch");
                    }
                    for (long i = 0; i < spp->flat_dim(); ++i) {
                        flat(i) = parse_rat(arr[i], "cache flat");
                    }
                    if (!spp->in_space(flat)) throw schema_error("cache: stale symbol");
                    es.flat = flat;
                    (sign > 0 ? F.plus : F.minus) = es;
                }
                return F;
            }
        } catch (const std::exception&) {
            // fall through to a cold rebuild
        }
    }
    SymbolPair<Rat> F = build_pair_core<Rat>(spec, ctx, evs, cut);
    if (use_cache) {
        std::error_code ec;
        fs::create_directories(cfile.parent_path(), ec);
        nlohmann::json j;
        j["flat_dim"] = F.space->flat_dim();
        for (int sign : {+1, -1}) {
            const EigenSymbolT<Rat>& es = F.by_sign(sign);
            nlohmann::json je;
            je["scale"] = rat_str(es.scale);
            nlohmann::json arr = nlohmann::json::array();
            for (long i = 0; i < es.flat.size(); ++i) arr.push_back(rat_str(es.flat(i)));
            je["flat"] = std::move(arr);
            j[sign > 0 ? "plus" : "minus"] = std::move(je);
        }
        // Atomic publish: write a temp file, then rename over the target.
        fs::path tmp = cfile;
        tmp += ".tmp";
        {
            std::ofstream out(tmp);
            out << j.dump();
        }
        fs::rename(tmp, cfile, ec);
    }
    return F;
}

inline SymbolPair<NFElem> build_nf_pair(const FormSpec& spec, PrimeContext& ctx) {
    auto K = std::make_shared<const NumberField>(NumberField{spec.field_poly});
    ctx.attach_field(K, spec.prime_index);
    HeckeCut cut = select_cut(spec);
    std::vector<NFElem> evs;
    for (const auto& c : cut.coords) {
        std::vector<Rat> coords = c;
        coords.resize(spec.degree(), Rat(0));
        evs.emplace_back(K, std::move(coords));
    }
    return build_pair_core<NFElem>(spec, ctx, evs, cut);
}

// ---------------------------------------------------------------------------
// Table computation with consistency checks.
// ---------------------------------------------------------------------------
struct ComputedRow {
    long n = 0;
    long lambda = 0;
    Rat mu;
};

template <class S>
std::vector<ComputedRow> compute_table(const SymbolPair<S>& F, const PrimeContext& ctx,
                                       long n_max, long j, bool checks) {
    std::vector<ThetaElement<S>> th;
    th.reserve(n_max + 1);
    for (long n = 0; n <= n_max; ++n) th.push_back(theta(F, ctx, n, j));
    std::vector<ComputedRow> rows;
    for (long n = 1; n <= n_max; ++n) {
        InvariantPair inv = theta_invariants(th[n], ctx);
        if (checks) {
            if (!augmentation_consistent(th[n])) {
                throw divisibility_fails("augmentation check failed at n = " +
                                         std::to_string(n));
            }
            // The interpolation zeros are forced by a_p = 0; ordinary forms
            // (computable here with --checks off semantics for this item)
            // need not vanish at these characters.
            if (s_is_zero(F.ap) && !interpolation_zero_check(th[n], ctx)) {
                throw divisibility_fails("interpolation-zero divisibility failed at n = " +
                                         std::to_string(n));
            }
            if (n >= 1 && n + 1 <= n_max) {
                auto r = three_term_residual(th[n - 1], th[n], th[n + 1], F.ap, F.eps_p, F.k,
                                             ctx);
                if (!three_term_holds(r)) {
                    throw divisibility_fails("three-term relation failed at n = " +
                                             std::to_string(n));
                }
            }
        }
        ComputedRow row;
        row.n = n;
        row.lambda = inv.lambda;
        row.mu = inv.mu;
        rows.push_back(row);
    }
    return rows;
}

template <class S>
std::vector<ComputedRow> compute_table_twisted(const SymbolPair<S>& F, const PrimeContext& ctx,
                                               long n_max, long j, long psi_exp, bool checks) {
    std::vector<ThetaElement<Zq>> th;
    th.reserve(n_max + 1);
    for (long n = 0; n <= n_max; ++n) th.push_back(theta_twisted(F, ctx, n, j, psi_exp));
    std::vector<ComputedRow> rows;
    for (long n = 1; n <= n_max; ++n) {
        InvariantPair inv = theta_invariants(th[n], ctx);
        if (checks) {
            if (!augmentation_consistent(th[n])) {
                throw divisibility_fails("augmentation check failed at n = " +
                                         std::to_string(n));
            }
            if (!interpolation_zero_check(th[n], ctx)) {
                throw divisibility_fails("interpolation-zero divisibility failed at n = " +
                                         std::to_string(n));
            }
            if (n + 1 <= n_max && s_is_zero(F.ap)) {
                auto r = three_term_residual(th[n - 1], th[n], th[n + 1], Zq{}, F.eps_p, F.k,
                                             ctx);
                if (!three_term_holds(r)) {
                    throw divisibility_fails("three-term relation failed at n = " +
                                             std::to_string(n));
                }
            }
        }
        ComputedRow row;
        row.n = n;
        row.lambda = inv.lambda;
        row.mu = inv.mu;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// TSV tables ("n\tlambda\tmu?") and JSON artifacts.
// ---------------------------------------------------------------------------
inline ThetaTable read_table_tsv(const std::string& path, const Int& p, long k, long j,
                                 long psi_exp) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open table file: " + path);
    ThetaTable T;
    T.p = p;
    T.k = k;
    T.j = j;
    T.psi_exp = psi_exp;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string f0, f1, f2;
        ls >> f0 >> f1;
        if (f0 == "n") continue;  // header
        ThetaTableRow row;
        try {
            row.n = std::stol(f0);
            row.lambda = Int(f1);
        } catch (const std::exception&) {
            throw schema_error("table " + path + ": bad row '" + line + "'");
        }
        if (ls >> f2 && f2 != "-") {
            Rat mu(f2);
            mu.canonicalize();
            row.mu = mu;
        }
        T.rows.push_back(row);
    }
    if (T.rows.empty()) throw schema_error("table " + path + ": no rows");
    return T;
}

inline nlohmann::json rows_to_json(const std::vector<ComputedRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"n", r.n}, {"lambda", r.lambda}, {"mu", rat_str(r.mu)}});
    }
    return arr;
}

inline nlohmann::json theta_to_json(const ThetaElement<Rat>& th) {
    nlohmann::json meta{{"form", th.form_label}, {"p", th.p.get_str()},    {"n", th.n},
                        {"j", th.j},             {"psi_exp", th.psi_exp},  {"sign", th.sign},
                        {"gamma", th.gamma.get_str()}};
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : th.poly.c) coeffs.push_back(rat_str(c));
    nlohmann::json exps = nlohmann::json::array();
    for (const auto& e : th.exps) exps.push_back(rat_str(e));
    return nlohmann::json{{"meta", meta}, {"coeffs", coeffs}, {"group_ring", exps}};
}

inline nlohmann::json parity_to_json(const ParityResult& pr) {
    nlohmann::json residuals = nlohmann::json::array();
    for (const auto& [n, v] : pr.residuals) residuals.push_back({{"n", n}, {"r", v.get_str()}});
    nlohmann::json out{{"stable", pr.stable},
                       {"lambda", pr.stable ? pr.lambda.get_str() : ""},
                       {"iota", pr.iota.get_str()},
                       {"branch", pr.branch},
                       {"n0", pr.n0},
                       {"residuals", residuals}};
    if (pr.mu) out["mu"] = rat_str(*pr.mu);
    return out;
}

inline nlohmann::json report_to_json(const ExtractionReport& rep) {
    return nlohmann::json{{"plus", parity_to_json(rep.plus)},
                          {"minus", parity_to_json(rep.minus)},
                          {"branch", rep.branch},
                          {"n0", rep.n0}};
}

inline nlohmann::json constants_to_json(const PrimeContext& ctx, long k) {
    WeightConstants wc = weight_constants(ctx, k);
    nlohmann::json j{{"p", ctx.p.get_str()},
                     {"k", k},
                     {"gamma", ctx.gamma.get_str()},
                     {"nu", wc.nu.get_str()},
                     {"nu_minus", wc.nu_minus.get_str()},
                     {"nu_plus", wc.nu_plus.get_str()},
                     {"l", wc.l.get_str()},
                     {"a", wc.a.get_str()},
                     {"b", wc.b.get_str()},
                     {"branch_pair", wc.branch_pair},
                     {"C_plus", wc.C_plus.get_str()},
                     {"C_minus", wc.C_minus.get_str()}};
    if (wc.branch_pair) {
        j["iota_ge"] = wc.iota_ge.get_str();
        j["iota_lt"] = wc.iota_lt.get_str();
    } else {
        j["iota"] = wc.iota.get_str();
    }
    return j;
}

// Precision policy for twisted computations: enough headroom over the default
// for Teichmueller powers and weight-driven growth.
inline long working_precision(long k) { return std::max(24L, 20L + k); }

}  // namespace mt

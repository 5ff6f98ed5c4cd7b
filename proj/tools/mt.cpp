// mt: Mazur-Tate elements, layer invariants, and signed-invariant extraction
// for p-nonordinary eigenforms with a_p = 0.

#include <CLI11.hpp>

#include <iostream>
#include <random>

#include "mt/cli_io.hpp"
#include "mt/iwasawa.hpp"

using namespace mt;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::kCheckFailure:
            return 2;
        case ErrorKind::kPrecision:
            return 3;
        default:
            return 1;
    }
}

long rat_ceil(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return mpz_get_si(q.get_mpz_t());
}

QSeries qs(std::vector<Rat> c) {
    QSeries F;
    F.c = std::move(c);
    return F;
}

// Random series with unit-times-p-power coefficients (p-unit guaranteed).
QSeries random_series(std::mt19937_64& rng, const Int& p, long deg, long max_extra_val) {
    QSeries F;
    F.c.resize(deg + 1);
    for (long i = 0; i <= deg; ++i) {
        long unit = static_cast<long>(rng() % 1000) + 1;
        if (rng() % 3 == 0) unit = -unit;
        while (mpz_divisible_p(Int(unit).get_mpz_t(), p.get_mpz_t())) ++unit;
        long v = static_cast<long>(rng() % (max_extra_val + 1));
        F.c[i] = Rat(Int(unit) * pow_int(p, v));
    }
    return F;
}

void emit_metadata(const FormSpec& spec, const PrimeContext& ctx, const Rat& scale_plus,
                   const Rat& scale_minus) {
    std::cout << "# form=" << spec.label << " level=" << spec.N.get_str()
              << " weight=" << spec.k << " p=" << ctx.p.get_str()
              << " gamma=" << ctx.gamma.get_str() << "\n";
    if (ctx.embedding) {
        std::cout << "# prime_factor_mod_p=[";
        for (size_t i = 0; i < ctx.embedding->factor_mod_p.size(); ++i) {
            std::cout << (i ? "," : "") << ctx.embedding->factor_mod_p[i].get_str();
        }
        std::cout << "] prime_index=" << spec.prime_index << " f=" << ctx.f_res
                  << " e=" << ctx.e << "\n";
    }
    std::cout << "# normalization_scale_plus=" << rat_str(scale_plus)
              << " normalization_scale_minus=" << rat_str(scale_minus) << "\n";
}

void emit_rows(const std::vector<ComputedRow>& rows) {
    std::cout << "n\tlambda\tmu\n";
    for (const auto& r : rows) {
        std::cout << r.n << "\t" << r.lambda << "\t" << rat_str(r.mu) << "\n";
    }
}

struct ComputeArgs {
    std::string form_path;
    long p_override = 0;
    long n_max = 3;
    long j = 0;
    long psi = 0;
    std::string checks = "on";
    std::string json_out;
    std::string theta_dir;
    bool no_cache = false;
};

template <class S>
std::vector<ComputedRow> run_pipeline(const SymbolPair<S>& F, const PrimeContext& ctx,
                                      const ComputeArgs& a) {
    if (a.psi == 0) return compute_table(F, ctx, a.n_max, a.j, a.checks == "on");
    return compute_table_twisted(F, ctx, a.n_max, a.j, a.psi, a.checks == "on");
}

int cmd_compute(const ComputeArgs& a) {
    FormSpec spec = ingest_form(a.form_path);
    if (a.p_override != 0 && Int(a.p_override) != spec.p) {
        throw schema_error("--p disagrees with the p recorded in the form file");
    }
    if (!spec.ap_is_zero()) {
        std::cerr << "warning: a_p is missing or nonzero; the signed theory assumes a_p = 0\n";
    }
    auto ctx = PrimeContext::make(spec.p, working_precision(spec.k));
    std::vector<ComputedRow> rows;
    Rat sp, sm;
    if (spec.rational()) {
        SymbolPair<Rat> F = build_rational_pair(spec, ctx, !a.no_cache);
        sp = F.plus.scale;
        sm = F.minus.scale;
        rows = run_pipeline(F, ctx, a);
        if (!a.theta_dir.empty() && a.psi == 0) {
            std::filesystem::create_directories(a.theta_dir);
            for (long n = 1; n <= a.n_max; ++n) {
                auto th = theta(F, ctx, n, a.j);
                std::ofstream out(std::filesystem::path(a.theta_dir) /
                                  (spec.label + "-n" + std::to_string(n) + ".json"));
                out << theta_to_json(th).dump(2) << "\n";
            }
        }
    } else {
        SymbolPair<NFElem> F = build_nf_pair(spec, ctx);
        sp = F.plus.scale;
        sm = F.minus.scale;
        rows = run_pipeline(F, ctx, a);
    }
    emit_metadata(spec, ctx, sp, sm);
    emit_rows(rows);
    if (!a.json_out.empty()) {
        nlohmann::json j{{"form", spec.label},
                         {"p", spec.p.get_str()},
                         {"k", spec.k},
                         {"j", a.j},
                         {"psi_exp", a.psi},
                         {"gamma", ctx.gamma.get_str()},
                         {"normalization_scale_plus", rat_str(sp)},
                         {"normalization_scale_minus", rat_str(sm)},
                         {"rows", rows_to_json(rows)}};
        std::ofstream out(a.json_out);
        out << j.dump(2) << "\n";
    }
    return 0;
}

struct ExtractArgs {
    std::string table_path;
    std::string form_path;
    long p = 0;
    long k = 0;
    long j = 0;
    long psi = 0;
    long n_max = 4;
    std::string json_out;
};

int cmd_extract(const ExtractArgs& a) {
    ThetaTable T;
    if (!a.table_path.empty()) {
        if (a.p == 0 || a.k == 0) throw schema_error("extract --table requires --p and --k");
        T = read_table_tsv(a.table_path, Int(a.p), a.k, a.j, a.psi);
    } else if (!a.form_path.empty()) {
        FormSpec spec = ingest_form(a.form_path);
        auto ctx0 = PrimeContext::make(spec.p, working_precision(spec.k));
        std::vector<ComputedRow> rows;
        if (spec.rational()) {
            rows = compute_table(build_rational_pair(spec, ctx0), ctx0, a.n_max, a.j, true);
        } else {
            auto F = build_nf_pair(spec, ctx0);
            rows = compute_table(F, ctx0, a.n_max, a.j, true);
        }
        T.p = spec.p;
        T.k = spec.k;
        T.j = a.j;
        T.label = spec.label;
        for (const auto& r : rows) {
            ThetaTableRow row;
            row.n = r.n;
            row.lambda = Int(r.lambda);
            row.mu = r.mu;
            T.rows.push_back(row);
        }
    } else {
        throw schema_error("extract: need --table or --form");
    }
    auto ctx = PrimeContext::make(T.p, working_precision(T.k));
    ExtractionReport rep = extract_signed_invariants(T, ctx);
    std::cout << "branch=" << rep.branch << " n0=" << rep.n0 << "\n";
    std::cout << "lambda_plus=" << rep.plus.lambda.get_str()
              << " iota_plus=" << rep.plus.iota.get_str();
    if (rep.plus.mu) std::cout << " mu_plus=" << rat_str(*rep.plus.mu);
    std::cout << "\n";
    std::cout << "lambda_minus=" << rep.minus.lambda.get_str()
              << " iota_minus=" << rep.minus.iota.get_str();
    if (rep.minus.mu) std::cout << " mu_minus=" << rat_str(*rep.minus.mu);
    std::cout << "\n";
    if (!a.json_out.empty()) {
        std::ofstream out(a.json_out);
        out << report_to_json(rep).dump(2) << "\n";
    }
    return 0;
}

struct PredictArgs {
    long p = 3;
    long k = 2;
    long j = 0;
    std::string lambda_plus = "0";
    std::string lambda_minus = "0";
    std::string mu_plus = "0";
    std::string mu_minus = "0";
    long n_min = 1;
    long n_max = 6;
};

int cmd_predict(const PredictArgs& a) {
    auto ctx = PrimeContext::make(Int(a.p), working_precision(a.k));
    SignedInvariants sig;
    sig.lambda_plus = Int(a.lambda_plus);
    sig.lambda_minus = Int(a.lambda_minus);
    sig.mu_plus = Rat(a.mu_plus);
    sig.mu_plus.canonicalize();
    sig.mu_minus = Rat(a.mu_minus);
    sig.mu_minus.canonicalize();
    std::cout << "# p=" << a.p << " k=" << a.k << " j=" << a.j
              << " gamma=" << ctx.gamma.get_str() << "\n";
    std::cout << "n\tlambda\tmu\n";
    for (long n = a.n_min; n <= a.n_max; ++n) {
        InvariantPair inv = predict_theta_invariants(ctx, a.k, a.j, sig, n);
        std::cout << n << "\t" << inv.lambda << "\t" << rat_str(inv.mu) << "\n";
    }
    return 0;
}

struct OracleArgs {
    std::string check;
    long p = 3;
    long n = 2;
    long trials = 200;
    unsigned long seed = 1;
};

int oracle_division(const PrimeContext& ctx, long n) {
    long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
    long Nmax = 2 * pn;
    auto table = division_terms(ctx, n, Nmax);
    long failures = 0;
    for (long N = 0; N <= Nmax; ++N) {
        QSeries mono = qs(std::vector<Rat>(pn + N + 1, Rat(0)));
        mono.c[pn + N] = 1;
        QSeries red = project(mono, ctx, n);
        for (long i = 1; i <= pn - 1; ++i) {
            Rat want = (i < static_cast<long>(red.c.size())) ? red.c[i] : Rat(0);
            if (Rat(table[N][i - 1]) != want) ++failures;
        }
        auto rq = remainder_quotient(Int(N), ctx, n);
        Int edge = rq.R + ctx.p_pow(n - 1);
        for (long i = 1; i <= pn - 1; ++i) {
            Val v = ordp(table[N][i - 1], ctx.p);
            Val want = (Int(i) == edge) ? Val::of(Rat(rq.Q) + 1)
                                        : Val::of(Rat(rq.Q) + (Int(i) < edge ? 2 : 1));
            if (Int(i) == edge ? (v != want) : (v < want)) ++failures;
        }
    }
    std::cout << "division p=" << ctx.p.get_str() << " n=" << n << " rows=0.." << Nmax
              << (failures == 0 ? " pass" : " FAIL") << "\n";
    return failures == 0 ? 0 : 1;
}

int oracle_smalllam(const PrimeContext& ctx, long n_cap, long trials, unsigned long seed) {
    std::mt19937_64 rng(seed);
    long pass = 0, run = 0;
    for (long t = 0; t < trials; ++t) {
        long n = 1 + static_cast<long>(rng() % n_cap);
        long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
        long lam = static_cast<long>(rng() % pn);
        QSeries F = random_series(rng, ctx.p, lam + 4 + static_cast<long>(rng() % 6), 3);
        for (long i = 0; i < lam; ++i) F.c[i] = F.c[i] * Rat(ctx.p);
        F.c[lam] = Rat(1 + static_cast<long>(rng() % 100) * mpz_get_si(ctx.p.get_mpz_t()));
        InvariantPair before = invariants(F, ctx);
        if (before.lambda >= pn) continue;
        ++run;
        if (invariants(project(F, ctx, n), ctx) == before) ++pass;
    }
    std::cout << "smalllam p=" << ctx.p.get_str() << " " << pass << "/" << run
              << (pass == run ? " pass" : " FAIL") << "\n";
    return pass == run ? 0 : 1;
}

// A random p-large series: T^{p^n} with admissible lower-order noise.
QSeries random_p_large(std::mt19937_64& rng, const PrimeContext& ctx, long n) {
    long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
    QSeries F = qs(std::vector<Rat>(pn + 1, Rat(0)));
    F.c[pn] = 1;
    PLargeProfile prof = p_large_profile(F, ctx, n);
    for (long i = 0; i < pn; ++i) {
        if (rng() % 2 == 0) continue;
        long v = rat_ceil(prof.v[i]) + static_cast<long>(rng() % 2);
        F.c[i] = Rat(pow_int(ctx.p, v)) * Rat(1 + static_cast<long>(rng() % 5));
    }
    return F;
}

int oracle_mainpl(const PrimeContext& ctx, long n_cap, long trials, unsigned long seed) {
    std::mt19937_64 rng(seed);
    long pass = 0;
    for (long t = 0; t < trials; ++t) {
        long n = 1 + static_cast<long>(rng() % n_cap);
        QSeries F = random_p_large(rng, ctx, n);
        if (!is_p_large(F, ctx, n)) continue;
        InvariantPair via = layer_invariants_via_theorem(F, ctx, n);
        if (via == invariants(project(F, ctx, n), ctx)) ++pass;
    }
    // Counterexample guard at p = 3: T^3 + 3T is not p-large and the layer
    // formula genuinely fails for it.
    bool guard = true;
    if (ctx.p == 3) {
        QSeries bad = qs({Rat(0), Rat(3), Rat(0), Rat(1)});
        guard = !is_p_large(bad, ctx, 1);
    }
    std::cout << "mainpl p=" << ctx.p.get_str() << " " << pass << "/" << trials
              << (pass == trials && guard ? " pass" : " FAIL") << "\n";
    return (pass == trials && guard) ? 0 : 1;
}

int oracle_newton(const PrimeContext& ctx, long n_cap, long trials, unsigned long seed) {
    std::mt19937_64 rng(seed);
    long pass = 0, run = 0;
    for (long t = 0; t < trials; ++t) {
        long n = 1 + static_cast<long>(rng() % n_cap);
        long pn = mpz_get_si(ctx.p_pow(n).get_mpz_t());
        QSeries F;
        if (rng() % 2 == 0) {
            F = random_p_large(rng, ctx, n);
        } else {
            F = random_series(rng, ctx.p, pn + static_cast<long>(rng() % 4), n + 1);
            F.c.back() = 1;
        }
        if (Int(invariants(F, ctx).lambda) < ctx.p_pow(n)) continue;
        ++run;
        // Newton polygon inside the B-region forces p-largeness.
        if (!b_region_contains(F, ctx, n) || is_p_large(F, ctx, n)) ++pass;
    }
    std::cout << "newton p=" << ctx.p.get_str() << " " << pass << "/" << run
              << (pass == run ? " pass" : " FAIL") << "\n";
    return pass == run ? 0 : 1;
}

// The closed form holds for n >> 0; the empirical stabilization rule requires
// the top two tested layers to match, and logs (never asserts) earlier
// mismatches.  Layers 1..n_cap+1 are tested so the rule has headroom.
int oracle_lfkn(const PrimeContext& ctx, long n_cap) {
    long pl = mpz_get_si(ctx.p.get_mpz_t());
    long k_cap = pl * pl + pl + 2;
    std::vector<std::pair<std::string, QSeries>> ells = {
        {"1", qs({Rat(1)})},
        {"T", qs({Rat(0), Rat(1)})},
        {"T^2", qs({Rat(0), Rat(0), Rat(1)})},
        {"p+T", qs({Rat(ctx.p), Rat(1)})}};
    const long n_top = n_cap + 1;
    long pass = 0, run = 0, logged = 0;
    for (long k = 2; k <= k_cap; ++k) {
        for (long j : {0L, 1L}) {
            if (j > k - 2) continue;
            for (const auto& [name, L] : ells) {
                std::vector<bool> match(n_top + 1, false);
                for (long n = 1; n <= n_top; ++n) {
                    match[n] = lfkn_oracle(ctx, k, n, j, L).match;
                }
                long n0 = n_top + 1;
                for (long n = n_top; n >= 1 && match[n]; --n) n0 = n;
                ++run;
                if (n0 <= n_top - 1) {
                    ++pass;
                    for (long n = 1; n < n0; ++n) {
                        if (!match[n]) ++logged;
                    }
                } else {
                    std::cout << "lfkn mismatch persists: k=" << k << " j=" << j
                              << " L=" << name << "\n";
                }
            }
        }
    }
    std::cout << "lfkn p=" << ctx.p.get_str() << " " << pass << "/" << run
              << " stable (" << logged << " pre-stabilization mismatches logged)"
              << (pass == run ? " pass" : " FAIL") << "\n";
    return pass == run ? 0 : 1;
}

int cmd_oracle(const OracleArgs& a) {
    auto ctx = PrimeContext::make(Int(a.p), 32);
    int rc = 0;
    if (a.check == "division") {
        for (long n = 1; n <= a.n; ++n) rc |= oracle_division(ctx, n);
    } else if (a.check == "smalllam") {
        rc = oracle_smalllam(ctx, a.n, a.trials, a.seed);
    } else if (a.check == "mainpl") {
        rc = oracle_mainpl(ctx, a.n, a.trials, a.seed);
    } else if (a.check == "newton") {
        rc = oracle_newton(ctx, a.n, a.trials, a.seed);
    } else if (a.check == "lfkn") {
        rc = oracle_lfkn(ctx, a.n);
    } else {
        throw schema_error("oracle: unknown --check '" + a.check + "'");
    }
    if (rc != 0) throw divisibility_fails("oracle check '" + a.check + "' failed");
    return 0;
}

int cmd_selfcheck() {
    int rc = 0;
    for (long pl : {2L, 3L}) {
        auto ctx = PrimeContext::make(Int(pl), 24);
        rc |= oracle_division(ctx, 1);
        rc |= oracle_smalllam(ctx, 2, 50, 7);
        rc |= oracle_mainpl(ctx, 2, 50, 7);
        if (pl == 2) rc |= oracle_lfkn(ctx, 4);  // the p = 3 grid lives in `oracle`
        // q_n recursion: p q_n = t_n + q'_n.
        bool qok = true;
        for (long n = 2; n <= 8; ++n) {
            if (ctx.p * qn(ctx, n) != ctx.t_n(n) + qn_prime(ctx, n)) qok = false;
        }
        std::cout << "qn-recursion p=" << pl << (qok ? " pass" : " FAIL") << "\n";
        if (!qok) rc = 1;
    }
    if (rc != 0) throw divisibility_fails("selfcheck failed");
    std::cout << "selfcheck pass\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mazur-Tate elements and signed Iwasawa invariants"};
    app.require_subcommand(1);

    ComputeArgs ca;
    auto* compute = app.add_subcommand("compute", "Compute a theta invariant table for a form");
    compute->add_option("--form", ca.form_path, "FormSpec JSON file")->required();
    compute->add_option("--p", ca.p_override, "Prime (must match the form file)");
    compute->add_option("--n-max", ca.n_max, "Largest layer n");
    compute->add_option("--j", ca.j, "Twist degree j in [0, k-2]");
    compute->add_option("--psi", ca.psi, "Teichmueller twist exponent i (psi = omega^i)");
    compute->add_option("--checks", ca.checks, "on|off: consistency checks")
        ->check(CLI::IsMember({"on", "off"}));
    compute->add_option("--json", ca.json_out, "Write the table as JSON here");
    compute->add_option("--theta-dir", ca.theta_dir, "Export theta elements as JSON here");
    compute->add_flag("--no-cache", ca.no_cache, "Skip the eigensymbol disk cache");

    ExtractArgs ea;
    auto* extract = app.add_subcommand("extract", "Extract signed invariants from a table");
    extract->add_option("--table", ea.table_path, "TSV table (n\\tlambda\\tmu?)");
    extract->add_option("--form", ea.form_path, "Compute the table from this form first");
    extract->add_option("--p", ea.p, "Prime (with --table)");
    extract->add_option("--k", ea.k, "Weight (with --table)");
    extract->add_option("--j", ea.j, "Twist degree j");
    extract->add_option("--psi", ea.psi, "Teichmueller twist exponent");
    extract->add_option("--n-max", ea.n_max, "Layers to compute (with --form)");
    extract->add_option("--json", ea.json_out, "Write the report as JSON here");

    PredictArgs pa;
    auto* predict = app.add_subcommand("predict", "Forward-predict theta invariants");
    predict->add_option("--p", pa.p, "Prime")->required();
    predict->add_option("--k", pa.k, "Weight")->required();
    predict->add_option("--j", pa.j, "Twist degree");
    predict->add_option("--lambda-plus", pa.lambda_plus, "lambda^+")->required();
    predict->add_option("--lambda-minus", pa.lambda_minus, "lambda^-")->required();
    predict->add_option("--mu-plus", pa.mu_plus, "mu^+");
    predict->add_option("--mu-minus", pa.mu_minus, "mu^-");
    predict->add_option("--n-min", pa.n_min, "First layer");
    predict->add_option("--n-max", pa.n_max, "Last layer");

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "Randomized/enumerated identity checks");
    oracle->add_option("--check", oa.check, "division|smalllam|mainpl|newton|lfkn")->required();
    oracle->add_option("--p", oa.p, "Prime");
    oracle->add_option("--n", oa.n, "Layer cap");
    oracle->add_option("--trials", oa.trials, "Random trials");
    oracle->add_option("--seed", oa.seed, "RNG seed (mandatory determinism)");

    long cp = 3, ck = 2;
    auto* constants = app.add_subcommand("constants", "Dump weight constants as JSON");
    constants->add_option("--p", cp, "Prime")->required();
    constants->add_option("--k", ck, "Weight")->required();

    app.add_subcommand("selfcheck", "Fast cross-module consistency suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (compute->parsed()) return cmd_compute(ca);
        if (extract->parsed()) return cmd_extract(ea);
        if (predict->parsed()) return cmd_predict(pa);
        if (oracle->parsed()) return cmd_oracle(oa);
        if (constants->parsed()) {
            auto ctx = PrimeContext::make(Int(cp), working_precision(ck));
            std::cout << constants_to_json(ctx, ck).dump(2) << "\n";
            return 0;
        }
        return cmd_selfcheck();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

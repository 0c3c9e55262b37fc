#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "thurston/identities.hpp"
#include "thurston/lemma.hpp"
#include "thurston/thurston.hpp"

namespace thurston::cli {

enum ExitCode : int { success = 0, assertion_failure = 1, parse_failure = 2, closure_failure = 3, usage_failure = 4 };

using Json = nlohmann::ordered_json;

inline constexpr const char* convention_env = "THURSTON_CONVENTION";

/// One machine-readable report; `extra` carries command-specific fields.
struct Report {
    std::string command;
    std::string geometry;
    std::string convention;
    std::string input;
    std::vector<std::string> chain;
    std::optional<int> order;
    std::optional<Residuals> residuals;
    std::string status = "ok";
    Json extra = Json::object();
};

inline Json to_json(const Report& r) {
    Json j;
    j["command"] = r.command;
    j["geometry"] = r.geometry;
    j["convention"] = r.convention;
    j["input"] = r.input;
    j["chain"] = r.chain;
    j["order"] = r.order ? Json(*r.order) : Json(nullptr);
    if (r.residuals) {
        j["residuals"] = {{"max_rel", r.residuals->max_rel}, {"points", r.residuals->points}};
    } else {
        j["residuals"] = nullptr;
    }
    j["status"] = r.status;
    for (const auto& [k, v] : r.extra.items()) j[k] = v;
    return j;
}

inline void print_text(const Report& r, std::ostream& out) {
    out << "command: " << r.command << '\n';
    if (!r.geometry.empty()) out << "geometry: " << r.geometry << '\n';
    if (!r.convention.empty()) out << "convention: " << r.convention << '\n';
    if (!r.input.empty()) out << "input: " << r.input << '\n';
    for (std::size_t k = 0; k < r.chain.size(); ++k) out << "tau^" << k << ": " << r.chain[k] << '\n';
    for (const auto& [k, v] : r.extra.items()) {
        if (v.is_string()) {
            out << k << ": " << v.get<std::string>() << '\n';
        } else {
            out << k << ": " << v.dump() << '\n';
        }
    }
    if (r.order) {
        out << "order: " << *r.order << '\n';
    }
    if (r.residuals) out << "residuals: max_rel=" << r.residuals->max_rel << " points=" << r.residuals->points << '\n';
    out << "status: " << r.status << '\n';
}

namespace detail {

inline std::vector<std::string> printed(const std::vector<Expr>& chain) {
    std::vector<std::string> out;
    out.reserve(chain.size());
    for (const auto& e : chain) out.push_back(to_string(e));
    return out;
}

inline std::optional<int> first_zero(const std::vector<Expr>& chain) {
    if (!chain.empty() && chain.front().is_zero()) return 0;
    for (std::size_t k = 1; k < chain.size(); ++k)
        if (chain[k].is_zero()) return static_cast<int>(k);
    return std::nullopt;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\n") - b + 1);
}

/// Comma-separated exact literals.
inline std::vector<GaussianRational> parse_list(const std::string& text) {
    std::vector<GaussianRational> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_constant(item));
    return out;
}

inline std::vector<std::string> split_terms(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw UsageError("empty term in ansatz list");
        out.push_back(item);
    }
    return out;
}

inline Convention resolve_convention(const std::string& flag) {
    if (!flag.empty()) return parse_convention(flag);
    if (const char* env = std::getenv(convention_env); env != nullptr && *env != '\0') return parse_convention(env);
    return Convention::metric_derived;
}

/// An argument like "-log1m * t" would otherwise be taken for a short option.
inline bool looks_like_expression(const std::string& arg) {
    if (arg.size() < 2 || arg[0] != '-' || arg[1] == '-') return false;
    return arg[1] != 'r' && arg[1] != 'n' && arg[1] != 'h' && arg[1] != 'g';
}

inline void emit(const Report& r, const std::string& format, std::ostream& out) {
    if (format == "json") {
        out << to_json(r).dump(2) << '\n';
    } else {
        print_text(r, out);
    }
}

struct Common {
    std::string geometry;
    std::string convention;
    std::string format = "text";
};

inline void add_common(CLI::App* sub, Common& c, bool with_geometry = true) {
    if (with_geometry) sub->add_option("--geometry,-g", c.geometry, "geometry id (sol, nil, sl2, h2, s2p, h2xr, s2pxr, line, product:AxB)");
    sub->add_option("--convention", c.convention, "operator convention on H^2 / S^2 charts: metric or paper")
        ->envname(convention_env);
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json"}));
}

inline GeometryPtr geometry_of(const Common& c) {
    if (c.geometry.empty()) throw UsageError("--geometry is required");
    return make_geometry(c.geometry, resolve_convention(c.convention));
}

}  // namespace detail

/// Runs the command line `args` (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact polyharmonic function toolkit for Thurston geometries", "thurston"};
    app.require_subcommand(1);

    detail::Common common;
    std::string expr_text;
    int r = 1;
    int r_max = default_r_max;
    std::uint64_t seed = 20171212;

    auto* tension_cmd = app.add_subcommand("tension", "print f, tau f, ..., tau^r f");
    detail::add_common(tension_cmd, common);
    tension_cmd->add_option("expr", expr_text, "expression")->required();
    tension_cmd->add_option("-r", r, "number of iterations")->check(CLI::Range(1, 64));

    bool classify_oracle = false;
    std::size_t classify_samples = 20;
    auto* classify_cmd = app.add_subcommand("classify", "smallest r with tau^r f = 0");
    detail::add_common(classify_cmd, common);
    classify_cmd->add_option("expr", expr_text, "expression")->required();
    classify_cmd->add_option("--r-max", r_max, "iteration bound")->check(CLI::Range(1, 64));
    classify_cmd->add_flag("--oracle", classify_oracle, "cross-check tau f against finite differences");
    classify_cmd->add_option("--samples", classify_samples, "oracle sample points");
    classify_cmd->add_option("--seed", seed, "oracle seed");

    std::string family_id, params, hol, antihol, ansatz, f1_text, f2_text, axis = "x";
    int n = 0;
    int ansatz_order = 1;
    auto* generate_cmd = app.add_subcommand("generate", "build a family member or solve an ansatz");
    detail::add_common(generate_cmd, common);
    generate_cmd->add_option("family", family_id, "family id");
    generate_cmd->add_option("--params", params, "comma-separated exact parameters; missing trailing ones are 0");
    generate_cmd->add_option("-n", n, "degree or tower index");
    generate_cmd->add_option("--axis", axis, "axis of sol.axis")->check(CLI::IsMember({"x", "y"}));
    generate_cmd->add_option("--hol", hol, "coefficients of the holomorphic polynomial");
    generate_cmd->add_option("--antihol", antihol, "coefficients of the antiholomorphic polynomial");
    generate_cmd->add_option("--f1", f1_text, "first factor (product.generic)");
    generate_cmd->add_option("--f2", f2_text, "second factor (product.generic)");
    generate_cmd->add_option("--ansatz", ansatz, "comma-separated basis terms");
    generate_cmd->add_option("--order", ansatz_order, "ansatz order r (solve tau^r f = 0)")->check(CLI::Range(1, 16));
    generate_cmd->add_option("--r-max", r_max, "classification bound")->check(CLI::Range(1, 64));

    oracle::OracleConfig ocfg;
    int orders = 1;
    auto* oracle_cmd = app.add_subcommand("oracle", "compare symbolic tau with finite differences of the metric");
    detail::add_common(oracle_cmd, common);
    oracle_cmd->add_option("expr", expr_text, "expression")->required();
    oracle_cmd->add_option("--step", ocfg.step, "finite-difference step");
    oracle_cmd->add_option("--levels", ocfg.richardson_levels, "Richardson levels");
    oracle_cmd->add_option("--rel-tol", ocfg.rel_tol, "relative tolerance");
    oracle_cmd->add_option("--abs-floor", ocfg.abs_floor, "absolute floor of the residual denominator");
    oracle_cmd->add_option("--samples", ocfg.samples, "sample points");
    oracle_cmd->add_option("--seed", ocfg.seed, "sampling seed");
    oracle_cmd->add_option("--orders", orders, "compare tau^k for k = 1..orders")->check(CLI::Range(1, 8));

    LemmaOptions lopts;
    auto* lemma_cmd = app.add_subcommand("lemma-check", "randomised binomial expansion check on products");
    detail::add_common(lemma_cmd, common, false);
    lemma_cmd->add_option("-n", lopts.n, "power of tau (<= 4)");
    lemma_cmd->add_option("--trials", lopts.trials, "random pairs per product");
    lemma_cmd->add_option("--seed", lopts.seed, "seed");

    std::string suite_convention;
    auto* verify_cmd = app.add_subcommand("verify-paper", "run the regression suite of published identities");
    verify_cmd->add_option("--convention", suite_convention, "both, metric or paper")->envname(convention_env);
    verify_cmd->add_option("--format", common.format, "output format")->check(CLI::IsMember({"text", "json"}));
    verify_cmd->add_option("--r-max", r_max, "classification bound")->check(CLI::Range(1, 64));
    verify_cmd->add_option("--seed", seed, "seed");

    std::vector<std::string> argv_store{"thurston"};
    for (const auto& a : args) argv_store.push_back(detail::looks_like_expression(a) ? " " + a : a);
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return success;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage_failure;
    }

    try {
        if (tension_cmd->parsed()) {
            const auto g = detail::geometry_of(common);
            const Expr f = parse(expr_text, g->atoms());
            const auto chain = iterated_tension(*g, f, r);
            Report rep{"tension", g->id(), std::string(to_string(g->convention())), detail::trim(expr_text),
                       detail::printed(chain), detail::first_zero(chain)};
            detail::emit(rep, common.format, out);
            return success;
        }

        if (classify_cmd->parsed()) {
            const auto g = detail::geometry_of(common);
            const Expr f = parse(expr_text, g->atoms());
            const auto report = classify(*g, f, r_max);
            Report rep{"classify", g->id(), std::string(to_string(g->convention())), detail::trim(expr_text),
                       detail::printed(report.chain), report.order};
            if (report.zero_function) {
                rep.status = "zero-function";
            } else if (report.exceeds_bound()) {
                rep.status = "exceeds-bound";
            } else {
                rep.status = "proper-" + std::to_string(*report.order) + "-harmonic";
            }
            if (classify_oracle && !f.is_zero()) {
                oracle::OracleConfig cfg;
                cfg.samples = classify_samples;
                cfg.seed = seed;
                const auto cv = oracle::cross_validate(*g, f, cfg);
                rep.residuals = Residuals{cv.max_rel, cv.points};
            }
            detail::emit(rep, common.format, out);
            return success;
        }

        if (generate_cmd->parsed()) {
            if (!ansatz.empty()) {
                if (!family_id.empty()) throw UsageError("give either a family id or --ansatz, not both");
                const auto g = detail::geometry_of(common);
                std::vector<Expr> basis;
                for (const auto& term : detail::split_terms(ansatz)) basis.push_back(parse(term, g->atoms()));
                const auto sys = make_ansatz(g, basis, ansatz_order);
                std::vector<Expr> kernel;
                for (const auto& k : generate_kernel(sys)) kernel.push_back(primitive_normalized(k));

                Report rep{"generate", g->id(), std::string(to_string(g->convention())), detail::trim(ansatz)};
                Json matrix = Json::array();
                for (std::size_t i = 0; i < sys.matrix.rows(); ++i) {
                    Json row = Json::array();
                    for (std::size_t j = 0; j < sys.matrix.cols(); ++j) row.push_back(to_string(sys.matrix(i, j)));
                    matrix.push_back(row);
                }
                rep.extra["basis"] = detail::printed(sys.basis);
                rep.extra["rows"] = detail::printed(sys.image_basis);
                rep.extra["matrix"] = matrix;
                rep.extra["kernel"] = detail::printed(kernel);
                if (kernel.empty()) {
                    rep.status = "empty-kernel";
                } else {
                    const auto report = classify(*g, kernel.front(), r_max);
                    rep.chain = detail::printed(report.chain);
                    rep.order = report.order;
                }
                detail::emit(rep, common.format, out);
                return success;
            }
            if (family_id.empty()) throw UsageError("generate needs a family id or --ansatz");
            const auto& family = find_family(family_id);
            FamilyArgs fargs;
            fargs.params = detail::parse_list(params);
            fargs.n = n;
            fargs.axis = axis == "y" ? Axis::y : Axis::x;
            fargs.hol = detail::parse_list(hol);
            fargs.antihol = detail::parse_list(antihol);
            fargs.geometry = common.geometry;
            fargs.f1 = f1_text;
            fargs.f2 = f2_text;
            if (family.id != "product.generic" && !common.geometry.empty() && common.geometry != family.geometry)
                throw UsageError("family " + family.id + " lives on " + family.geometry);
            const auto inst = family.build(fargs, detail::resolve_convention(common.convention));
            const auto report = classify(*inst.geometry, inst.function, r_max);

            Report rep{"generate", inst.geometry->id(), std::string(to_string(inst.geometry->convention())),
                       family.id, detail::printed(report.chain), report.order};
            rep.extra["function"] = to_string(inst.function);
            rep.extra["claimed_order"] = inst.claimed_order;
            if (inst.degenerate) rep.extra["degenerate"] = true;
            if (report.exceeds_bound()) {
                rep.status = "exceeds-bound";
            } else if (*report.order != inst.claimed_order) {
                rep.status = "order-mismatch";
                detail::emit(rep, common.format, out);
                err << "assertion failed: " << family.id << " has order " << *report.order << ", claimed "
                    << inst.claimed_order << '\n';
                return assertion_failure;
            }
            detail::emit(rep, common.format, out);
            return success;
        }

        if (oracle_cmd->parsed()) {
            const auto g = detail::geometry_of(common);
            const Expr f = parse(expr_text, g->atoms());
            const auto cv = oracle::cross_validate(*g, f, ocfg, orders);
            const auto chain = iterated_tension(*g, f, orders);
            Report rep{"oracle", g->id(), std::string(to_string(g->convention())), detail::trim(expr_text),
                       detail::printed(chain), detail::first_zero(chain)};
            rep.residuals = Residuals{cv.max_rel, cv.points};
            rep.extra["ratio"] = cv.median_ratio;
            int code = success;
            if (cv.passed) {
                rep.status = "agree";
            } else if (g->convention() == Convention::metric_derived || !g->has_conformal_factor()) {
                rep.status = "fail";
                code = assertion_failure;
            } else if (std::abs(cv.median_ratio - 4.0) < 1e-4) {
                rep.status = "expected-mismatch";
            } else {
                rep.status = "convention-mismatch";
            }
            detail::emit(rep, common.format, out);
            if (code != success) err << "oracle tolerance exceeded: max_rel " << cv.max_rel << '\n';
            return code;
        }

        if (lemma_cmd->parsed()) {
            lopts.convention = detail::resolve_convention(common.convention);
            const auto results = lemma_check(lopts);
            bool ok = true;
            Report rep{"lemma-check", "", std::string(to_string(lopts.convention)), "n=" + std::to_string(lopts.n)};
            Json checks = Json::array();
            for (const auto& res : results) {
                ok = ok && res.passed;
                Json c = {{"check", res.check},
                          {"geometry", res.geometry},
                          {"trials", res.trials},
                          {"status", res.passed ? "pass" : "fail"}};
                if (!res.passed) c["witness"] = res.witness;
                checks.push_back(c);
            }
            rep.status = ok ? "pass" : "fail";
            if (common.format == "json") {
                Json j = to_json(rep);
                j["checks"] = checks;
                out << j.dump(2) << '\n';
            } else {
                for (const auto& res : results) {
                    out << (res.passed ? "PASS " : "FAIL ") << res.check << ' ' << res.geometry << " trials=" << res.trials;
                    if (!res.passed) out << " witness: " << res.witness;
                    out << '\n';
                }
                out << "status: " << rep.status << '\n';
            }
            if (!ok) {
                for (const auto& res : results)
                    if (!res.passed) err << "counterexample (" << res.check << ", " << res.geometry << "): " << res.witness << '\n';
                return assertion_failure;
            }
            return success;
        }

        if (verify_cmd->parsed()) {
            identities::SuiteOptions sopts;
            sopts.r_max = r_max;
            sopts.seed = seed;
            std::string label = "both";
            if (!suite_convention.empty() && suite_convention != "both") {
                sopts.conventions = {parse_convention(suite_convention)};
                label = std::string(to_string(sopts.conventions.front()));
            }
            const auto results = identities::run(sopts);
            const bool ok = identities::all_passed(results);
            if (common.format == "json") {
                Json list = Json::array();
                for (const auto& res : results)
                    list.push_back({{"anchor", res.anchor},
                                    {"convention", res.convention},
                                    {"description", res.description},
                                    {"status", identities::to_string(res.status)},
                                    {"detail", res.detail}});
                Json j;
                j["command"] = "verify-paper";
                j["convention"] = label;
                j["r_max"] = r_max;
                j["seed"] = seed;
                j["identities"] = list;
                j["status"] = ok ? "pass" : "fail";
                out << j.dump(2) << '\n';
            } else {
                for (const auto& res : results) {
                    out << identities::to_string(res.status) << ' ' << res.anchor << " [" << res.convention << "]";
                    if (!res.detail.empty()) out << ": " << res.detail;
                    out << '\n';
                }
                out << "status: " << (ok ? "pass" : "fail") << '\n';
            }
            if (!ok) {
                for (const auto& res : results)
                    if (res.status == identities::Status::fail)
                        err << "failed: " << res.anchor << " [" << res.convention << "] " << res.detail << '\n';
                return assertion_failure;
            }
            return success;
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return parse_failure;
    } catch (const ClosureError& e) {
        err << "closure error: " << e.what() << '\n';
        return closure_failure;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage_failure;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return usage_failure;
    } catch (const Error& e) {
        err << "assertion failed: " << e.what() << '\n';
        return assertion_failure;
    }
    return usage_failure;
}

}  // namespace thurston::cli

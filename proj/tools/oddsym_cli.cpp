// Command-line surface of the odd symplectic calculus engine: expression
// evaluation, the operator verbs, matrix/transformation files, and the seeded
// property-check suites.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "oddsym/oddsym.hpp"

using namespace oddsym;

namespace {

std::string read_arg_or_stdin(const std::string& arg) {
    if (arg != "-")
        return arg;
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct VerbContext {
    int n = 1;
    int thetas = 2;
    std::string format = "text";

    Chart chart() const { return make_chart("c", n, thetas); }
};

void emit_result(const VerbContext& ctx, const std::string& value) {
    if (ctx.format == "structured")
        std::cout << nlohmann::json{{"result", value}}.dump() << "\n";
    else
        std::cout << value << "\n";
}

void add_chart_flags(CLI::App* cmd, VerbContext& ctx) {
    cmd->add_option("--n", ctx.n, "base dimension of the chart")->check(CLI::Range(1, 8));
    cmd->add_option("--theta-budget", ctx.thetas, "number of auxiliary odd constants")
        ->check(CLI::Range(0, 16));
    cmd->add_option("--format", ctx.format, "output format")
        ->check(CLI::IsMember({"text", "structured"}));
}

int dispatch(int argc, char** argv) {
    CLI::App app{"oddsym: exact calculus on odd symplectic supermanifolds"};
    app.require_subcommand(1);

    VerbContext ctx;
    std::string expr_a, expr_b, file_arg, kind_arg = "multivector-density";

    auto* eval = app.add_subcommand("eval", "parse an expression and print its canonical form");
    add_chart_flags(eval, ctx);
    eval->add_option("expr", expr_a, "expression (or - for stdin)")->required();

    auto* delta = app.add_subcommand("delta", "odd Laplacian of a half-density body");
    add_chart_flags(delta, ctx);
    delta->add_option("expr", expr_a)->required();

    auto* div = app.add_subcommand("div", "divergence of a multivector density body");
    add_chart_flags(div, ctx);
    div->add_option("expr", expr_a)->required();

    auto* bracket = app.add_subcommand("bracket", "odd Schouten bracket of two multivector fields");
    add_chart_flags(bracket, ctx);
    bracket->add_option("f", expr_a)->required();
    bracket->add_option("g", expr_b)->required();

    auto* dcmd = app.add_subcommand("d", "de Rham differential of a form");
    add_chart_flags(dcmd, ctx);
    dcmd->add_option("expr", expr_a)->required();

    auto* omega = app.add_subcommand("omega", "multiplication by the symplectic form");
    add_chart_flags(omega, ctx);
    omega->add_option("expr", expr_a)->required();

    auto* homotopy = app.add_subcommand("homotopy", "Koszul homotopy operator on a form");
    add_chart_flags(homotopy, ctx);
    homotopy->add_option("expr", expr_a)->required();

    auto* iprod = app.add_subcommand("iprod", "interior product of a form by a multivector field");
    add_chart_flags(iprod, ctx);
    iprod->add_option("field", expr_a)->required();
    iprod->add_option("form", expr_b)->required();

    auto* lie_form = app.add_subcommand("lie-form", "Lie derivative of a form along a field");
    add_chart_flags(lie_form, ctx);
    lie_form->add_option("field", expr_a)->required();
    lie_form->add_option("form", expr_b)->required();

    auto* lie_dens = app.add_subcommand("lie-dens", "Lie derivative of a density along a field");
    add_chart_flags(lie_dens, ctx);
    lie_dens->add_option("field", expr_a)->required();
    lie_dens->add_option("density", expr_b)->required();

    auto* fourier = app.add_subcommand("fourier", "fiberwise Fourier transform of a density");
    add_chart_flags(fourier, ctx);
    fourier->add_option("expr", expr_a)->required();

    auto* invfourier = app.add_subcommand("invfourier", "inverse Fourier transform of a base form");
    add_chart_flags(invfourier, ctx);
    invfourier->add_option("expr", expr_a)->required();

    auto* ber = app.add_subcommand("ber", "Berezinian of a supermatrix file");
    ber->add_option("--format", ctx.format)->check(CLI::IsMember({"text", "structured"}));
    ber->add_option("file", file_arg, "matrix file (or - for stdin)")->required();

    auto* symp = app.add_subcommand("symplectic", "odd symplectic check with certificate");
    symp->alias("symplectic?");
    symp->add_option("--format", ctx.format)->check(CLI::IsMember({"text", "structured"}));
    symp->add_option("file", file_arg)->required();

    std::string transform_file;
    auto* pullback = app.add_subcommand("pullback", "pull a geometric object back along a "
                                                    "transformation file");
    pullback->add_option("--format", ctx.format)->check(CLI::IsMember({"text", "structured"}));
    pullback->add_option("--transform", transform_file, "transformation file")->required();
    pullback
        ->add_option("--kind", kind_arg, "object kind")
        ->check(CLI::IsMember(
            {"multivector-field", "multivector-density", "form", "volume-form"}));
    pullback->add_option("expr", expr_a, "object body in the target chart")->required();

    auto* d2cmd = app.add_subcommand("d2", "second spectral differential on an E1 class");
    add_chart_flags(d2cmd, ctx);
    d2cmd->add_option("expr", expr_a, "class representative s(x, xi)")->required();

    int coh_degree = 3;
    bool coh_theta = false;
    auto* coh = app.add_subcommand("cohomology", "bounded-degree Delta-cohomology of a slice");
    add_chart_flags(coh, ctx);
    coh->add_option("--degree-max", coh_degree, "x-degree bound of the slice")
        ->check(CLI::Range(0, 6));
    coh->add_flag("--with-theta", coh_theta, "include theta monomials in the slice");

    CheckSuiteConfig cfg;
    std::string suite_arg, check_format = "text";
    auto* check = app.add_subcommand("check", "run a seeded property-check suite");
    check->add_option("suite", suite_arg,
                      "berezinian | delta-invariance | homotopy | spectral | lie-algebra | "
                      "fourier | conventions")
        ->required();
    check->add_option("--trials", cfg.trials)->check(CLI::Range(1, 100000));
    check->add_option("--seed", cfg.seed);
    check->add_option("--n-max", cfg.n_max)->check(CLI::Range(1, 4));
    check->add_option("--degree-max", cfg.degree_max)->check(CLI::Range(0, 6));
    check->add_option("--theta-budget", cfg.theta_budget)->check(CLI::Range(0, 8));
    check->add_option("--format", check_format)->check(CLI::IsMember({"text", "structured"}));

    CLI11_PARSE(app, argc, argv);

    Chart chart = ctx.chart();
    auto parse_arg = [&](const std::string& a) {
        return parse_polynomial(read_arg_or_stdin(a), chart.gens);
    };

    if (eval->parsed()) {
        emit_result(ctx, to_string(parse_arg(expr_a)));
    } else if (delta->parsed()) {
        emit_result(ctx, to_string(odd_laplacian(make_density(chart, parse_arg(expr_a))).body));
    } else if (div->parsed()) {
        emit_result(ctx, to_string(divergence(make_density(chart, parse_arg(expr_a))).body));
    } else if (bracket->parsed()) {
        auto r = schouten_bracket(make_field(chart, parse_arg(expr_a)),
                                  make_field(chart, parse_arg(expr_b)));
        emit_result(ctx, to_string(r.body));
    } else if (dcmd->parsed()) {
        emit_result(ctx, to_string(de_rham(make_form(chart, parse_arg(expr_a))).body));
    } else if (omega->parsed()) {
        emit_result(ctx, to_string(omega_multiply(make_form(chart, parse_arg(expr_a))).body));
    } else if (homotopy->parsed()) {
        emit_result(ctx, to_string(koszul_homotopy(make_form(chart, parse_arg(expr_a))).body));
    } else if (iprod->parsed()) {
        auto r = interior_product(make_field(chart, parse_arg(expr_a)),
                                  make_form(chart, parse_arg(expr_b)));
        emit_result(ctx, to_string(r.body));
    } else if (lie_form->parsed()) {
        auto r = lie_derivative_form(make_field(chart, parse_arg(expr_a)),
                                     make_form(chart, parse_arg(expr_b)));
        emit_result(ctx, to_string(r.body));
    } else if (lie_dens->parsed()) {
        auto r = lie_derivative_density(make_field(chart, parse_arg(expr_a)),
                                        make_density(chart, parse_arg(expr_b)));
        emit_result(ctx, to_string(r.body));
    } else if (fourier->parsed()) {
        emit_result(ctx, to_string(fourier_transform(make_density(chart, parse_arg(expr_a))).body));
    } else if (invfourier->parsed()) {
        emit_result(ctx, to_string(inverse_fourier(make_form(chart, parse_arg(expr_a))).body));
    } else if (ber->parsed()) {
        SuperMatrix j = supermatrix_from_text(file_arg == "-" ? read_arg_or_stdin("-")
                                                              : read_file(file_arg));
        emit_result(ctx, to_string(berezinian(j)));
    } else if (symp->parsed()) {
        SuperMatrix j = supermatrix_from_text(file_arg == "-" ? read_arg_or_stdin("-")
                                                              : read_file(file_arg));
        auto rep = is_symplectic(j);
        if (ctx.format == "structured") {
            nlohmann::json out{{"symplectic", rep.symplectic},
                               {"symp1", rep.symp1},
                               {"symp2", rep.symp2},
                               {"symp3", rep.symp3},
                               {"id", rep.id_evaluated ? (rep.id_constraint ? "holds" : "fails")
                                                       : "not evaluated"}};
            std::cout << out.dump() << "\n";
        } else {
            std::cout << (rep.symplectic ? "true" : "false");
            auto failed = rep.failed();
            if (!failed.empty()) {
                std::cout << "  failed:";
                for (const auto& f : failed)
                    std::cout << " " << f;
            }
            std::cout << "\n";
        }
    } else if (pullback->parsed()) {
        auto f = transformation_from_text(read_file(transform_file));
        const Chart& target = f.target();
        SuperPolynomial body = parse_polynomial(read_arg_or_stdin(expr_a), target.gens);
        GeometricObject obj =
            kind_arg == "multivector-field"
                ? make_field(target, body)
                : (kind_arg == "form" ? make_form(target, body)
                                      : (kind_arg == "volume-form" ? make_volume(target, body)
                                                                   : make_density(target, body)));
        emit_result(ctx, to_string(f.pullback(obj).body));
    } else if (d2cmd->parsed()) {
        E1Class cls{chart, parse_arg(expr_a)};
        emit_result(ctx, to_string(d2(cls).representative));
    } else if (coh->parsed()) {
        auto result = delta_cohomology(density_slice(chart, coh_degree, coh_theta));
        if (ctx.format == "structured") {
            nlohmann::json reps = nlohmann::json::array();
            for (const auto& r : result.representatives)
                reps.push_back(to_string(r));
            std::cout << nlohmann::json{{"dimension", result.dimension},
                                        {"representatives", reps}}
                             .dump()
                      << "\n";
        } else {
            std::cout << "dimension: " << result.dimension << "\n";
            for (const auto& r : result.representatives)
                std::cout << "class: " << to_string(r) << "\n";
        }
    } else if (check->parsed()) {
        cfg.suite = suite_from_name(suite_arg);
        CheckReport report = run_suite(cfg);
        if (check_format == "structured")
            std::cout << report_to_json(report).dump(2) << "\n";
        else
            std::cout << render_report_text(report);
        return report.pass() ? 0 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ParseError& e) {
        nlohmann::json err{{"error",
                            {{"code", static_cast<int>(e.code())},
                             {"kind", "parse"},
                             {"message", e.what()},
                             {"position", e.position()}}}};
        std::cerr << err.dump() << "\n";
        return static_cast<int>(e.code());
    } catch (const Error& e) {
        const char* kind = e.code() == errc::precondition
                               ? "precondition"
                               : (e.code() == errc::io_error ? "io" : "usage");
        nlohmann::json err{{"error",
                            {{"code", static_cast<int>(e.code())},
                             {"kind", kind},
                             {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        nlohmann::json err{
            {"error", {{"code", 70}, {"kind", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 70;
    }
}

// Integration tests of the command-line tool: run the built binary (path in
// ODDSYM_CLI), check outputs and the error-code contract.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "oddsym/supermatrix.hpp"
#include "oddsym/transform.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& stdin_data = "") {
    const char* bin = std::getenv("ODDSYM_CLI");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args + " 2>&1";
    if (!stdin_data.empty()) {
        std::string tmp = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                          "/oddsym_cli_stdin.txt";
        std::ofstream(tmp) << stdin_data;
        cmd = "cat " + tmp + " | " + cmd;
    }
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe))
        r.out += buf.data();
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" +
                       name;
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST_CASE("operator verbs") {
    CHECK(run_cli("delta \"x1*xi1\" --n 1").out == "1\n");
    CHECK(run_cli("eval \"x1*xi1 - 2*xi1*x1\" --n 1").out == "-x1*xi1\n");
    CHECK(run_cli("eval \"i*i\"").out == "-1\n");
    CHECK(run_cli("bracket x1 xi1 --n 1").out == "-1\n");
    CHECK(run_cli("d x1 --n 1").out == "dx1\n");
    CHECK(run_cli("omega 1 --n 1").out == "dxi1*dx1\n");
    CHECK(run_cli("homotopy \"dx1*dxi1\" --n 1").out == "1\n");
    CHECK(run_cli("iprod xi1 dx1 --n 1").out == "-i\n");
    CHECK(run_cli("lie-dens xi1 \"x1^3\" --n 1").out == "3*x1^2\n");
    CHECK(run_cli("fourier 1 --n 1").out == "i*dx1\n");
    CHECK(run_cli("invfourier \"i*dx1\" --n 1").out == "1\n");
}

TEST_CASE("stdin input") {
    auto r = run_cli("eval - --n 2", "x1*x2 + xi1*xi2\n");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "x1*x2 + xi1*xi2\n");
}

TEST_CASE("matrix file verbs") {
    using namespace oddsym;
    auto j = sample_symplectic(2, 3, 77);
    auto path = write_temp("accept_matrix.txt", to_text(j));
    auto ber = run_cli("ber " + path);
    CHECK(ber.exit_code == 0);
    auto d00 = det_even(j.j00);
    CHECK(ber.out == to_string(d00 * d00) + "\n");

    auto symp = run_cli("symplectic " + path);
    CHECK(symp.exit_code == 0);
    CHECK(symp.out == "true\n");

    SuperMatrix k = SuperMatrix::identity(1, GeneratorSet::make(1, 0));
    k.j00[0][0] = parse_polynomial("2", k.gens);
    auto path2 = write_temp("bad_matrix.txt", to_text(k));
    auto symp2 = run_cli("symplectic " + path2);
    CHECK(symp2.exit_code == 0);
    CHECK(symp2.out.find("false") == 0);
    CHECK(symp2.out.find("symp3") != std::string::npos);
}

TEST_CASE("pullback verb replays a transformation file") {
    using namespace oddsym;
    Chart c = make_chart("c", 1, 1);
    auto f = compose(CanonicalTransformation::make_fiber_shift(c, parse_polynomial("th1*x1", c.gens)),
                     CanonicalTransformation::make_diffeo(c, {parse_polynomial("2*x1", c.gens)},
                                                          {parse_polynomial("1/2*x1", c.gens)}));
    auto path = write_temp("accept_transform.txt", to_text(f));
    auto r = run_cli("pullback --transform " + path + " --kind volume-form \"1\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "4\n");
    auto r2 = run_cli("pullback --transform " + path + " --kind multivector-density \"1\"");
    CHECK(r2.out == "2\n");
}

TEST_CASE("spectral verbs") {
    CHECK(run_cli("d2 \"x1*xi1\" --n 1").out == "-1\n");
    auto r = run_cli("cohomology --n 2 --degree-max 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("dimension: 1") == 0);
}

TEST_CASE("check verb and exit codes") {
    auto r = run_cli("check spectral --trials 5 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("status: PASS") != std::string::npos);

    auto structured = run_cli("check homotopy --trials 4 --seed 9 --format structured");
    CHECK(structured.exit_code == 0);
    CHECK(structured.out.find("\"schema_version\": 1") != std::string::npos);

    // determinism: byte-identical structured output modulo the elapsed field
    auto a = run_cli("check fourier --trials 5 --seed 21 --format structured");
    auto b = run_cli("check fourier --trials 5 --seed 21 --format structured");
    auto strip = [](std::string s) {
        auto pos = s.find("\"elapsed_ms\"");
        if (pos != std::string::npos) {
            auto end = s.find_first_of(",}", pos);
            s.erase(pos, end - pos);
        }
        return s;
    };
    CHECK(strip(a.out) == strip(b.out));
}

TEST_CASE("error code contract") {
    // parse error -> 2 with a structured error on stderr
    auto parse_err = run_cli("eval \"x1 +\"");
    CHECK(parse_err.exit_code == 2);
    CHECK(parse_err.out.find("\"kind\":\"parse\"") != std::string::npos);
    CHECK(parse_err.out.find("\"position\"") != std::string::npos);

    // precondition violation -> 3 (odd square is fine; homotopy rejects top term)
    auto precond = run_cli("homotopy \"dx1\" --n 1");
    CHECK(precond.exit_code == 3);
    CHECK(precond.out.find("\"kind\":\"precondition\"") != std::string::npos);

    // io error -> 4
    auto io_err = run_cli("ber /nonexistent/matrix.txt");
    CHECK(io_err.exit_code == 4);

    // unknown suite -> 5
    auto usage = run_cli("check nonsense");
    CHECK(usage.exit_code == 5);
}

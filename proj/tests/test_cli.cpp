#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include "test_util.hpp"
#include "trsat/extsolver.hpp"

using namespace trsat;
using namespace trsat::testutil;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string work_dir() {
    static std::string dir = [] {
        std::string d = "/tmp/trsat_cli_test_" + std::to_string(::getpid());
        ::mkdir(d.c_str(), 0755);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    std::string out_path = work_dir() + "/stdout.txt";
    std::string err_path = work_dir() + "/stderr.txt";
    std::string cmd = std::string(TRSAT_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("bogus_subcommand").code == 2);
    CHECK(run_cli("oracle --cnf x.cnf --not-a-flag").code == 2);
}

TEST_CASE("missing input files exit with code 3") {
    RunResult r = run_cli("oracle --cnf " + work_dir() + "/absent.cnf");
    CHECK(r.code == 3);
    CHECK(r.err.find("error code=3") != std::string::npos);
}

TEST_CASE("malformed DIMACS exits with code 5") {
    std::string bad = work_dir() + "/bad.cnf";
    write_file(bad, "p cnf 2 1\n1 5 0\n");
    RunResult r = run_cli("oracle --cnf " + bad);
    CHECK(r.code == 5);
    CHECK(r.err.find("error code=5") != std::string::npos);
}

TEST_CASE("oracle prints the optimum and a witness") {
    std::string cnf = work_dir() + "/fig2.cnf";
    write_file(cnf, write_dimacs(fig2_formula()));
    RunResult r = run_cli("oracle --cnf " + cnf + " --manifest " + work_dir() + "/m_oracle.json");
    CHECK(r.code == 0);
    CHECK(r.out.find("max_satisfied 3 of 3") != std::string::npos);
    CHECK(r.out.find("v -1 -2 3 -4 0") != std::string::npos);
}

TEST_CASE("oracle enforces the enumeration cap with exit code 4") {
    std::string cnf = work_dir() + "/wide.cnf";
    write_file(cnf, write_dimacs(gen_random_3sat(30, 10, 1)));
    RunResult r = run_cli("oracle --cnf " + cnf);
    CHECK(r.code == 4);
    RunResult ok = run_cli("oracle --cnf " + cnf + " --cap 30");
    CHECK(ok.code == 0);
}

TEST_CASE("gen rand3 writes instances and a manifest with checksums") {
    std::string d1 = work_dir() + "/gen1";
    std::string m1 = work_dir() + "/m_gen1.json";
    RunResult r = run_cli("gen rand3 --vars 10 --clauses 30 --count 3 --seed 5 --out " + d1 +
                          " --manifest " + m1);
    CHECK(r.code == 0);
    for (int i = 0; i < 3; ++i) {
        std::string f = d1 + "/rand3_000" + std::to_string(i) + ".cnf";
        CnfFormula parsed = parse_dimacs_file(f);
        CHECK(parsed.num_variables == 10);
        CHECK(parsed.num_clauses() == 30);
    }
    std::string man = slurp(m1);
    CHECK(man.find("\"command\": \"gen\"") != std::string::npos);
    CHECK(man.find("rand3_0002.cnf") != std::string::npos);
    CHECK(man.find("\"checksums\"") != std::string::npos);
    CHECK(man.find("\"base\": 5") != std::string::npos);
    CHECK(man.find("wall_seconds") != std::string::npos);
}

TEST_CASE("gen is reproducible: same seed, same bytes") {
    std::string d1 = work_dir() + "/rep1", d2 = work_dir() + "/rep2", d3 = work_dir() + "/rep3";
    CHECK(run_cli("gen rand3 --vars 8 --clauses 20 --count 2 --seed 9 --out " + d1).code == 0);
    CHECK(run_cli("gen rand3 --vars 8 --clauses 20 --count 2 --seed 9 --out " + d2).code == 0);
    CHECK(run_cli("gen rand3 --vars 8 --clauses 20 --count 2 --seed 10 --out " + d3).code == 0);
    CHECK(slurp(d1 + "/rand3_0000.cnf") == slurp(d2 + "/rand3_0000.cnf"));
    CHECK(slurp(d1 + "/rand3_0001.cnf") == slurp(d2 + "/rand3_0001.cnf"));
    CHECK(slurp(d1 + "/rand3_0000.cnf") != slurp(d3 + "/rand3_0000.cnf"));
}

TEST_CASE("gen graph encodings write valid files") {
    std::string d = work_dir() + "/graphgen";
    CHECK(run_cli("gen color --n 5 --k 3 --p 0.5 --seed 2 --out " + d).code == 0);
    CnfFormula f = parse_dimacs_file(d + "/color_0000.cnf");
    CHECK(f.num_variables == 15);
    CHECK(run_cli("gen cover --n 5 --k 2 --p 0.5 --seed 2 --out " + d).code == 0);
    CHECK(parse_dimacs_file(d + "/cover_0000.cnf").num_variables == 15);
    CHECK(run_cli("gen clique --n 5 --k 2 --p 0.5 --seed 2 --out " + d).code == 0);
    CHECK(parse_dimacs_file(d + "/clique_0000.cnf").num_variables == 10);
}

TEST_CASE("gen circuit encodes a netlist with constraints") {
    std::string nl = work_dir() + "/not.nl";
    write_file(nl, "INPUT a\nGATE NOT z a\nOUTPUT z\n");
    std::string out = work_dir() + "/not.cnf";
    RunResult r = run_cli("gen circuit --netlist " + nl + " --constrain z=1 --out " + out);
    CHECK(r.code == 0);
    CnfFormula f = parse_dimacs_file(out);
    CHECK(f.num_variables == 2);
    MaxSatOracleResult o = brute_force_max_sat(f);
    CHECK(o.best_count == f.num_clauses());
    CHECK(o.witness == Assignment{false, true});  // a=0 forces z=1
    // Missing netlist flag is a usage error.
    CHECK(run_cli("gen circuit --out " + out).code == 2);
}

TEST_CASE("train, solve, eval and bench round trip") {
    std::string data = work_dir() + "/train_data";
    CHECK(run_cli("gen rand3 --vars 6 --clauses 14 --count 4 --seed 3 --out " + data).code == 0);

    std::string ckpt = work_dir() + "/model.ckpt";
    std::string hist = work_dir() + "/history.csv";
    RunResult tr = run_cli("train --data " + data + " --out " + ckpt + " --history " + hist +
                           " --epochs 2 --warmup 5 --channels 8 --heads 2 --encoder-layers 1"
                           " --decoder-layers 1 --ffn-hidden 16 --manifest " +
                           work_dir() + "/m_train.json");
    CHECK(tr.code == 0);
    CHECK(tr.out.find("trained 2 epochs") != std::string::npos);
    std::string csv = slurp(hist);
    CHECK(csv.rfind("epoch,loss,train_rate,val_rate,lr\n", 0) == 0);

    std::string cnf = data + "/rand3_0000.cnf";
    RunResult sv = run_cli("solve --model " + ckpt + " --cnf " + cnf + " --mode maxsat");
    CHECK(sv.code == 0);
    CHECK(sv.out.find("status ") != std::string::npos);
    CHECK(sv.out.find("v ") != std::string::npos);

    RunResult se = run_cli("solve --model " + ckpt + " --cnf " + cnf + " --mode exact --seed 4");
    CHECK(se.code == 0);
    CHECK(se.out.find("iterations ") != std::string::npos);

    CHECK(run_cli("solve --model " + ckpt + " --cnf " + cnf + " --mode bogus").code == 2);

    RunResult ev = run_cli("eval --model " + ckpt + " --data " + data + " --name train_set");
    CHECK(ev.code == 0);
    CHECK(ev.out.find("train_set ") != std::string::npos);
    CHECK(ev.out.find(" 4\n") != std::string::npos);

    RunResult be = run_cli("bench --model " + ckpt + " --data " + data + " --max-flips 200");
    CHECK(be.code == 0);
    CHECK(be.out.find("# instance model_s walksat_s speedup") != std::string::npos);

    // Solve with a missing checkpoint reports code 3.
    CHECK(run_cli("solve --model " + work_dir() + "/nope.ckpt --cnf " + cnf).code == 3);
}

TEST_CASE("solve writes a report file when asked") {
    std::string data = work_dir() + "/train_data";  // created by the previous test
    std::string ckpt = work_dir() + "/model.ckpt";
    std::string report = work_dir() + "/report.txt";
    RunResult r = run_cli("solve --model " + ckpt + " --cnf " + data +
                          "/rand3_0001.cnf --mode exact --out " + report + " --manifest " +
                          work_dir() + "/m_solve.json");
    CHECK(r.code == 0);
    CHECK(slurp(report).find("status ") != std::string::npos);
    CHECK(slurp(work_dir() + "/m_solve.json").find("report.txt") != std::string::npos);
}

TEST_CASE("external solver adapter parses standard output") {
    std::string script = work_dir() + "/fake_solver.sh";
    write_file(script, "#!/bin/sh\necho 's SATISFIABLE'\necho 'v 1 -2 0'\n");
    ::chmod(script.c_str(), 0755);
    std::string cnf = work_dir() + "/ext.cnf";
    write_file(cnf, "p cnf 2 1\n1 0\n");
    ExternalResult r = run_external_solver(script, cnf, 2);
    CHECK(r.status == ExternalStatus::satisfiable);
    REQUIRE(r.assignment.has_value());
    CHECK(*r.assignment == Assignment{true, false});

    write_file(script, "#!/bin/sh\necho 's UNSATISFIABLE'\n");
    ExternalResult u = run_external_solver(script, cnf, 2);
    CHECK(u.status == ExternalStatus::unsatisfiable);
    CHECK(!u.assignment.has_value());
}

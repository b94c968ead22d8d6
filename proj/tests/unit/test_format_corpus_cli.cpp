#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "helpers.hpp"
#include "rbcm/format.hpp"

using namespace rbcm;

namespace {

const char* kHeader = "machine x\nkind dcm\ncounters 2\nalphabet a\nstates s f\ninitial s\nfinal f\n";

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun invoke(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = rbcm::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("guard wildcard expands to every pattern")
{
    CounterMachine m = parse_machine(std::string(kHeader) + "trans s a ** -> f R 0 0\n");
    CHECK(m.transitions.size() == 4);
    CounterMachine p = parse_machine(std::string(kHeader) + "trans s a z* -> f R +1 0\n");
    REQUIRE(p.transitions.size() == 2);
    for (const auto& t : p.transitions) {
        CHECK_FALSE(t.guard.is_positive(0));
    }
}

TEST_CASE("parse errors carry line numbers")
{
    try {
        parse_machine(std::string(kHeader) + "\n# comment\ntrans s a ** -> nowhere R 0 0\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 10);
    }
    CHECK_THROWS_AS(parse_machine("machine x\nkind dcm\ncounters one\n"), ParseError);
    CHECK_THROWS_AS(parse_machine(std::string(kHeader) + "trans s a ** -> f R 0\n"), ParseError);
    CHECK_THROWS_AS(parse_machine(std::string(kHeader) + "trans s a ** -> f R 0 2\n"), ParseError);
    CHECK_THROWS_AS(parse_machine(std::string(kHeader) + "colour blue\n"), ParseError);
    CHECK_THROWS_AS(parse_machine(std::string(kHeader) + "trans s a ** -> f R 0 0 output \"a\"\n"), ParseError);
    CHECK_THROWS_AS(parse_transducer(kHeader), ParseError);
}

TEST_CASE("serialization round trip")
{
    for (const auto& n : corpus_names()) {
        CorpusEntry e = load_corpus(n);
        if (e.file.transducer) {
            CounterTransducer t = e.file.as_transducer();
            CHECK(parse_transducer(serialize_transducer(t)) == t);
        } else {
            std::string s = serialize_machine(e.file.machine);
            CounterMachine back = parse_machine(s);
            CHECK(back == e.file.machine);
            CHECK(serialize_machine(back) == s);
        }
    }
    // Generated machines with clashing state names still round trip.
    CounterMachine m = corpus_machine("M_ab");
    m.add_state("s0");
    std::string s = serialize_machine(m);
    CHECK(parse_machine(s).num_states() == m.num_states());
    CHECK(serialize_machine(parse_machine(s)) == s);
}

TEST_CASE("corpus rows hold and budgets match the files")
{
    const auto names = corpus_names();
    CHECK(names.size() >= 12);
    for (const auto& n : names) {
        CorpusEntry e = load_corpus(n);
        CHECK_MESSAGE(validate_machine(e.file.machine).ok(), n);
        CHECK_FALSE(e.description.empty());
        CHECK(parse_machine_file(e.text).machine == e.file.machine);
        for (const auto& row : e.expected) {
            CHECK_MESSAGE(testkit::oracle_accepts(e.file.machine, row.word) == row.accept, n << " on " << row.word);
        }
    }
    CHECK(load_corpus("M_neq").file.machine.counters == 2);
    CHECK(load_corpus("M_ab").file.machine.reversal_bound == 1);
    CHECK_THROWS_AS(load_corpus("nope"), UnknownEntry);
}

TEST_CASE("cli commands")
{
    CliRun r = invoke({"run", "corpus:M_ab", "--word", "aabb"});
    CHECK(r.code == cli::kTrue);
    CHECK(invoke({"run", "corpus:M_ab", "--word", "aab"}).code == cli::kFalse);
    CHECK(invoke({"run", "corpus:T_shuffle", "--word", "acbd"}).out.find("ab") != std::string::npos);

    CliRun e = invoke({"enum", "corpus:M_ab", "--max-len", "4"});
    CHECK(e.code == cli::kTrue);
    CHECK(e.out.find("aabb") != std::string::npos);

    CliRun j = invoke({"--json", "empty", "corpus:M_ab", "--witness"});
    CHECK(j.code == cli::kFalse);
    auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["command"] == "empty");
    CHECK(doc["verdict"] == false);
    REQUIRE(doc.contains("witness"));
    CHECK(testkit::oracle_accepts(corpus_machine("M_ab"), doc["witness"].get<std::string>()));

    CliRun p = invoke({"parikh", "corpus:M_ab"});
    CHECK(p.code == cli::kTrue);
    CHECK(p.out.find("linear base=") != std::string::npos);

    CHECK(invoke({"compare", "corpus:astar", "corpus:M_ab", "--mode", "subset"}).code == cli::kFalse);
    CHECK(invoke({"corpus", "list"}).out.find("T_shuffle") != std::string::npos);
    CHECK(invoke({"op", "not", "corpus:M_ab"}).out.find("machine") != std::string::npos);
    CHECK(invoke({"nonsense"}).code == cli::kUsage);
    CHECK(invoke({"op", "make_non_exiting", "corpus:M_ab"}).code == cli::kPrecondition);
    CHECK(invoke({"corpus", "get", "nope"}).code == cli::kUsage);
    CHECK(cli::op_names().size() >= 20);
}

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "rbcm/constructions.hpp"
#include "rbcm/corpus.hpp"
#include "rbcm/decide.hpp"
#include "rbcm/errors.hpp"
#include "rbcm/format.hpp"
#include "rbcm/regular.hpp"
#include "rbcm/semilinear.hpp"
#include "rbcm/transduce.hpp"

namespace rbcm::cli {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// `corpus:NAME` loads a built-in entry; anything else is a path.
MachineFile load_file(const std::string& spec)
{
    if (spec.rfind("corpus:", 0) == 0) {
        return load_corpus(spec.substr(7)).file;
    }
    std::ifstream in(spec, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read " + spec);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_machine_file(buf.str());
}

CounterMachine load_machine(const std::string& spec)
{
    return load_file(spec).machine;
}

CounterTransducer load_transducer(const std::string& spec)
{
    MachineFile f = load_file(spec);
    if (!f.transducer) {
        throw PreconditionViolated(spec + " is not a transducer");
    }
    return f.as_transducer();
}

Dfa load_dfa(const std::string& spec)
{
    return machine_to_dfa(load_machine(spec));
}

std::string show_word(const std::string& w)
{
    return w.empty() ? std::string("\"\"") : w;
}

struct OpResult {
    std::optional<CounterMachine> machine;
    std::optional<CounterTransducer> transducer;
};

struct OpArgs {
    std::vector<std::string> inputs;
    std::string word;
    int gaps = 1;
};

struct OpSpec {
    std::size_t arity;
    std::string usage;
    std::function<OpResult(const OpArgs&)> run;
};

OpResult machine_result(CounterMachine m)
{
    return OpResult{std::move(m), std::nullopt};
}

OpSpec unary(std::function<CounterMachine(const CounterMachine&)> f)
{
    return {1, "<m>", [f](const OpArgs& a) { return machine_result(f(load_machine(a.inputs[0]))); }};
}

OpSpec binary(std::function<CounterMachine(const CounterMachine&, const CounterMachine&)> f)
{
    return {2, "<m1> <m2>", [f](const OpArgs& a) {
                return machine_result(f(load_machine(a.inputs[0]), load_machine(a.inputs[1])));
            }};
}

OpSpec insertion(InsertionOp op)
{
    return {1, "<m> [--gaps n]", [op](const OpArgs& a) {
                return machine_result(inverse_insertion_ncm(load_machine(a.inputs[0]), op, a.gaps));
            }};
}

const std::map<std::string, OpSpec>& op_table()
{
    static const std::map<std::string, OpSpec> table = {
        {"not", unary([](const CounterMachine& m) { return boolean_dcm(m, nullptr, BooleanOp::Not); })},
        {"and", binary([](const CounterMachine& a, const CounterMachine& b) {
             return boolean_dcm(a, &b, BooleanOp::And);
         })},
        {"or", binary([](const CounterMachine& a, const CounterMachine& b) {
             return boolean_dcm(a, &b, BooleanOp::Or);
         })},
        {"intersect_ncm", binary(intersect_machines)},
        {"intersect_regular",
         {2, "<m> <dfa>",
          [](const OpArgs& a) {
              return machine_result(intersect_regular(load_machine(a.inputs[0]), load_dfa(a.inputs[1])));
          }}},
        {"strip_end_marker", unary(strip_end_marker_one_counter)},
        {"make_non_exiting", unary(make_non_exiting)},
        {"concat_pf_dcmne_dcm", binary(concat_pf_dcmne_dcm)},
        {"concat_dcmne_regular",
         {2, "<m> <dfa>",
          [](const OpArgs& a) {
              return machine_result(concat_dcmne_regular(load_machine(a.inputs[0]), load_dfa(a.inputs[1])));
          }}},
        {"concat_dcm1_regular",
         {2, "<m> <dfa>",
          [](const OpArgs& a) {
              return machine_result(concat_dcm1_regular(load_machine(a.inputs[0]), load_dfa(a.inputs[1])));
          }}},
        {"concat_pf_regular_dcm",
         {2, "<dfa> <m>",
          [](const OpArgs& a) {
              return machine_result(concat_pf_regular_dcm(load_dfa(a.inputs[0]), load_machine(a.inputs[1])));
          }}},
        {"inverse_prefix_dcm1", unary([](const CounterMachine& m) {
             return concat_dcm1_regular(m, universal_dfa(m.alphabet));
         })},
        {"left_quotient",
         {1, "<m> --word w",
          [](const OpArgs& a) { return machine_result(left_quotient_word(load_machine(a.inputs[0]), a.word)); }}},
        {"concat_ncm", binary(concat_ncm)},
        {"inverse_prefix", insertion(InsertionOp::Prefix)},
        {"inverse_suffix", insertion(InsertionOp::Suffix)},
        {"inverse_infix", insertion(InsertionOp::Infix)},
        {"inverse_outfix", insertion(InsertionOp::Outfix)},
        {"inverse_embed", insertion(InsertionOp::Embed)},
        {"inverse_apply",
         {2, "<transducer> <m>",
          [](const OpArgs& a) {
              return machine_result(inverse_apply(load_transducer(a.inputs[0]), load_machine(a.inputs[1])));
          }}},
        {"forward_image",
         {2, "<transducer> <m>",
          [](const OpArgs& a) {
              return machine_result(forward_image_ncm(load_transducer(a.inputs[0]), load_machine(a.inputs[1])));
          }}},
        {"to_null_transducer",
         {1, "<m>",
          [](const OpArgs& a) {
              return OpResult{std::nullopt, to_null_transducer(load_machine(a.inputs[0]))};
          }}},
        {"to_one_reversal", unary(to_one_reversal)},
        {"enforce_reversal_control", unary(enforce_reversal_control)},
    };
    return table;
}

// Prints a verdict either as text or as a JSON object and returns its exit
// code.
struct Reporter {
    std::ostream& out;
    bool as_json;
    std::string command;

    int verdict(bool value, const std::string& text, const std::optional<std::string>& witness = std::nullopt,
                const json& details = json::object())
    {
        if (as_json) {
            json j{{"command", command}, {"verdict", value}, {"details", details}};
            if (witness) {
                j["witness"] = *witness;
            }
            out << j.dump() << "\n";
        } else {
            out << text << "\n";
            if (witness) {
                out << "witness: " << show_word(*witness) << "\n";
            }
        }
        return value ? kTrue : kFalse;
    }
};

} // namespace

std::vector<std::string> op_names()
{
    std::vector<std::string> names;
    for (const auto& [name, spec] : op_table()) {
        names.push_back(name);
    }
    return names;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Reversal-bounded counter machines", "rbcm"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "print verdicts as JSON");

    std::string file;
    std::string file2;
    std::string word;
    bool trace = false;
    bool witness = false;
    std::size_t max_len = 0;
    std::string mode = "equal";
    std::string op_name;
    std::vector<std::string> op_inputs;
    std::string out_path;
    int gaps = 1;
    std::string corpus_action;
    std::string corpus_name;

    auto* validate = app.add_subcommand("validate", "check a machine file");
    validate->add_option("file", file)->required();

    auto* run = app.add_subcommand("run", "deterministic run");
    run->add_option("file", file)->required();
    run->add_option("--word", word)->required();
    run->add_flag("--trace", trace);

    auto* member_cmd = app.add_subcommand("member", "membership test");
    member_cmd->add_option("file", file)->required();
    member_cmd->add_option("--word", word)->required();

    auto* enumerate = app.add_subcommand("enum", "list accepted words in shortlex order");
    enumerate->add_option("file", file)->required();
    enumerate->add_option("--max-len", max_len)->required();

    auto* empty = app.add_subcommand("empty", "emptiness test");
    empty->add_option("file", file)->required();
    empty->add_flag("--witness", witness);

    auto* infinite = app.add_subcommand("infinite", "finiteness test");
    infinite->add_option("file", file)->required();

    auto* parikh = app.add_subcommand("parikh", "Parikh image as a semilinear set");
    parikh->add_option("file", file)->required();

    auto* cmp = app.add_subcommand("compare", "language inclusion or equality");
    cmp->add_option("file1", file)->required();
    cmp->add_option("file2", file2)->required();
    cmp->add_option("--mode", mode)->check(CLI::IsMember({"subset", "equal"}));

    auto* op = app.add_subcommand("op", "apply a construction");
    op->add_option("name", op_name)->required();
    op->add_option("inputs", op_inputs);
    op->add_option("-o,--output", out_path);
    op->add_option("--word", word);
    op->add_option("--gaps", gaps);

    auto* corpus = app.add_subcommand("corpus", "built-in machines");
    corpus->add_option("action", corpus_action)->required()->check(CLI::IsMember({"list", "get"}));
    corpus->add_option("name", corpus_name);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kTrue;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kUsage;
    }

    Reporter report{out, as_json, app.get_subcommands().front()->get_name()};
    try {
        if (*validate) {
            MachineFile f = load_file(file);
            ValidationReport r = f.transducer ? validate_transducer(f.as_transducer()) : validate_machine(f.machine);
            for (const auto& v : r.violations) {
                if (!as_json) {
                    out << v << "\n";
                }
            }
            return report.verdict(r.ok(), r.ok() ? "valid" : "invalid", std::nullopt,
                                  json{{"violations", r.violations}});
        }
        if (*run) {
            MachineFile f = load_file(file);
            RunOptions opts;
            opts.record_trace = trace;
            if (!structurally_deterministic(f.machine)) {
                throw NondeterministicInput("run needs a deterministic machine; use member");
            }
            RunTrace t = run_deterministic(f.machine, word, opts);
            const CounterMachine& m = f.machine;
            if (trace && !as_json) {
                for (const auto& s : t.steps) {
                    out << m.states[s.config.state] << " consumed=" << s.config.consumed << " counters=(";
                    for (std::size_t i = 0; i < s.config.values.size(); ++i) {
                        out << (i ? "," : "") << s.config.values[i];
                    }
                    out << ")\n";
                }
            }
            const char* names[] = {"accept", "reject", "diverge"};
            std::string text = names[static_cast<int>(t.verdict)];
            json details{{"result", text}};
            if (f.transducer && t.verdict == Verdict::Accept) {
                text += "\noutput: " + show_word(t.output);
                details["output"] = t.output;
            }
            if (t.certificate) {
                details["certificate"] = {{"first", t.certificate->first},
                                          {"second", t.certificate->second},
                                          {"growth", t.certificate->growth}};
            }
            return report.verdict(t.verdict == Verdict::Accept, text, std::nullopt, details);
        }
        if (*member_cmd) {
            bool r = member(load_machine(file), word);
            return report.verdict(r, r ? "accept" : "reject");
        }
        if (*enumerate) {
            auto words = enumerate_words(load_machine(file), max_len);
            if (as_json) {
                out << json{{"command", "enum"}, {"verdict", true}, {"details", {{"words", words}}}}.dump() << "\n";
            } else {
                for (const auto& w : words) {
                    out << show_word(w) << "\n";
                }
            }
            return kTrue;
        }
        if (*empty) {
            EmptinessResult r = is_empty(load_machine(file));
            return report.verdict(r.empty, r.empty ? "empty" : "nonempty",
                                  witness ? r.witness : std::optional<std::string>{});
        }
        if (*infinite) {
            bool r = is_infinite(load_machine(file));
            return report.verdict(r, r ? "infinite" : "finite");
        }
        if (*parikh) {
            CounterMachine m = load_machine(file);
            std::string set = format_semilinear_set(parikh_image(m));
            while (!set.empty() && set.back() == '\n') {
                set.pop_back();
            }
            return report.verdict(true, "letters " + m.alphabet + "\n" + set, std::nullopt,
                                  json{{"alphabet", m.alphabet}, {"set", set}});
        }
        if (*cmp) {
            CompareResult r = compare(load_machine(file), load_machine(file2),
                                      mode == "subset" ? CompareMode::Subset : CompareMode::Equal);
            return report.verdict(r.holds, r.holds ? "holds" : "fails", r.counterexample);
        }
        if (*op) {
            auto it = op_table().find(op_name);
            if (it == op_table().end()) {
                throw UsageError("unknown op " + op_name);
            }
            if (op_inputs.size() != it->second.arity) {
                throw UsageError("usage: op " + op_name + " " + it->second.usage);
            }
            OpResult r = it->second.run(OpArgs{op_inputs, word, gaps});
            std::string text = r.machine ? serialize_machine(*r.machine) : serialize_transducer(*r.transducer);
            if (out_path.empty()) {
                out << text;
            } else {
                std::ofstream o(out_path, std::ios::binary);
                if (!o) {
                    throw UsageError("cannot write " + out_path);
                }
                o << text;
            }
            return kTrue;
        }
        if (*corpus) {
            if (corpus_action == "list") {
                for (const auto& n : corpus_names()) {
                    out << n << "  " << load_corpus(n).description << "\n";
                }
                return kTrue;
            }
            if (corpus_name.empty()) {
                throw UsageError("usage: corpus get <name>");
            }
            out << load_corpus(corpus_name).text;
            return kTrue;
        }
    } catch (const UsageError& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const UnknownEntry& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const PreconditionViolated& e) {
        err << "precondition violated: " << e.what() << "\n";
        return kPrecondition;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kPrecondition;
    }
    return kUsage;
}

} // namespace rbcm::cli

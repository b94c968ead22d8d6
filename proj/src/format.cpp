#include "rbcm/format.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace rbcm {

namespace {

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i == line.size()) {
            break;
        }
        std::size_t j = i;
        if (line[i] == '"') {
            // Quoted token runs to the closing quote.
            j = line.find('"', i + 1);
            j = j == std::string_view::npos ? line.size() : j + 1;
        } else {
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
                ++j;
            }
        }
        out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

int parse_int(const std::string& s, std::size_t line, const char* what)
{
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, std::string("expected a number for ") + what + ", got '" + s + "'");
    }
}

struct PendingTransition {
    std::size_t line;
    std::vector<std::string> tokens;
};

} // namespace

MachineFile parse_machine_file(std::string_view text)
{
    MachineFile file;
    CounterMachine& m = file.machine;
    std::map<std::string, std::size_t> header_line;
    std::optional<std::string> kind;
    std::vector<std::string> state_names;
    std::string initial_name;
    std::vector<std::string> final_names;
    std::size_t final_line = 0;
    std::size_t initial_line = 0;
    bool have_outalphabet = false;
    std::vector<PendingTransition> pending;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        auto tokens = split(line);
        if (tokens.empty() || tokens.front()[0] == '#') {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const std::string& key = tokens.front();
        if (key == "trans") {
            pending.push_back({line_no, std::move(tokens)});
        } else {
            if (!header_line.emplace(key, line_no).second) {
                throw ParseError(line_no, "duplicate '" + key + "' line");
            }
            auto args = std::vector<std::string>(tokens.begin() + 1, tokens.end());
            auto single = [&](const char* what) {
                if (args.size() != 1) {
                    throw ParseError(line_no, std::string("'") + what + "' takes exactly one value");
                }
                return args.front();
            };
            if (key == "machine") {
                m.name = single("machine");
            } else if (key == "kind") {
                kind = single("kind");
                if (*kind != "dcm" && *kind != "ncm" && *kind != "transducer") {
                    throw ParseError(line_no, "kind must be dcm, ncm or transducer");
                }
            } else if (key == "acceptance") {
                std::string v = single("acceptance");
                if (v != "marked" && v != "unmarked") {
                    throw ParseError(line_no, "acceptance must be marked or unmarked");
                }
                m.marked = v == "marked";
            } else if (key == "counters") {
                m.counters = parse_int(single("counters"), line_no, "counters");
                if (m.counters < 0 || m.counters > kMaxCounters) {
                    throw ParseError(line_no, "counter count out of range");
                }
            } else if (key == "reversals") {
                std::string v = single("reversals");
                m.reversal_bound = v == "inf" ? kUnbounded : parse_int(v, line_no, "reversals");
                if (m.reversal_bound < 0 && m.reversal_bound != kUnbounded) {
                    throw ParseError(line_no, "reversal bound must be non-negative or inf");
                }
            } else if (key == "alphabet" || key == "outalphabet") {
                std::string letters;
                for (const auto& a : args) {
                    if (a.size() != 1 || a == "$" || a == "\"") {
                        throw ParseError(line_no, "alphabet symbols are single characters other than $ and \"");
                    }
                    if (letters.find(a[0]) != std::string::npos) {
                        throw ParseError(line_no, "duplicate alphabet symbol " + a);
                    }
                    letters += a;
                }
                if (key == "alphabet") {
                    m.alphabet = letters;
                } else {
                    file.output_alphabet = letters;
                    have_outalphabet = true;
                }
            } else if (key == "states") {
                if (args.empty()) {
                    throw ParseError(line_no, "at least one state is required");
                }
                state_names = args;
            } else if (key == "initial") {
                initial_name = single("initial");
                initial_line = line_no;
            } else if (key == "final") {
                final_names = args;
                final_line = line_no;
            } else {
                throw ParseError(line_no, "unknown keyword '" + key + "'");
            }
        }
        if (end == text.size()) {
            break;
        }
    }

    for (const char* required : {"machine", "kind", "counters", "alphabet", "states", "initial"}) {
        if (!header_line.count(required)) {
            throw ParseError(line_no, std::string("missing '") + required + "' line");
        }
    }
    file.transducer = *kind == "transducer";
    if (have_outalphabet && !file.transducer) {
        throw ParseError(header_line.at("outalphabet"), "'outalphabet' is only allowed for transducers");
    }

    std::unordered_map<std::string, StateId> ids;
    for (const auto& s : state_names) {
        if (ids.count(s)) {
            throw ParseError(header_line.at("states"), "duplicate state " + s);
        }
        ids.emplace(s, m.add_state(s, false));
    }
    auto lookup = [&](const std::string& s, std::size_t line) {
        auto it = ids.find(s);
        if (it == ids.end()) {
            throw ParseError(line, "unknown state " + s);
        }
        return it->second;
    };
    m.initial = lookup(initial_name, initial_line);
    for (const auto& f : final_names) {
        m.final_states[lookup(f, final_line)] = true;
    }

    const int k = m.counters;
    for (const auto& [line, tk] : pending) {
        // trans q sym guard -> p S|R deltas... [output "w"]
        std::size_t expected = 7 + static_cast<std::size_t>(k);
        bool has_output = tk.size() == expected + 2 && tk[expected] == "output";
        if (tk.size() != expected && !has_output) {
            throw ParseError(line, "malformed transition: expected 'trans q sym guard -> p S|R' and " +
                                       std::to_string(k) + " deltas");
        }
        if (tk[4] != "->") {
            throw ParseError(line, "expected '->' in transition");
        }
        Transition t;
        t.from = lookup(tk[1], line);
        t.to = lookup(tk[5], line);
        if (tk[2] == "$") {
            t.symbol = kEot;
        } else if (tk[2].size() == 1 && m.alphabet.find(tk[2][0]) != std::string::npos) {
            t.symbol = static_cast<unsigned char>(tk[2][0]);
        } else {
            throw ParseError(line, "symbol '" + tk[2] + "' is not in the alphabet");
        }
        const std::string& guard = tk[3];
        if (k == 0 ? guard != "-" : guard.size() != static_cast<std::size_t>(k)) {
            throw ParseError(line, "guard must have one character per counter ('-' without counters)");
        }
        if (tk[6] == "S" || tk[6] == "R") {
            t.move = tk[6] == "S" ? Move::Stay : Move::Right;
        } else {
            throw ParseError(line, "move must be S or R");
        }
        for (int i = 0; i < k; ++i) {
            const std::string& d = tk[7 + i];
            if (d == "+1" || d == "1") {
                t.deltas.push_back(1);
            } else if (d == "0") {
                t.deltas.push_back(0);
            } else if (d == "-1") {
                t.deltas.push_back(-1);
            } else {
                throw ParseError(line, "delta must be +1, 0 or -1, got '" + d + "'");
            }
        }
        if (has_output) {
            const std::string& q = tk[expected + 1];
            if (q.size() < 2 || q.front() != '"' || q.back() != '"') {
                throw ParseError(line, "output word must be quoted");
            }
            if (!file.transducer) {
                throw ParseError(line, "outputs are only allowed for transducers");
            }
            t.output = q.substr(1, q.size() - 2);
        }
        // Expand '*' guards.
        std::vector<std::uint32_t> guards{0};
        for (int i = 0; i < k; ++i) {
            char g = guard[i];
            if (g != 'z' && g != 'p' && g != '*') {
                throw ParseError(line, std::string("guard character must be z, p or *, got '") + g + "'");
            }
            std::vector<std::uint32_t> next;
            for (std::uint32_t bits : guards) {
                if (g != 'p') {
                    next.push_back(bits);
                }
                if (g != 'z') {
                    next.push_back(bits | (1U << i));
                }
            }
            guards = std::move(next);
        }
        for (std::uint32_t bits : guards) {
            Transition copy = t;
            copy.guard = Guard{bits};
            m.transitions.push_back(std::move(copy));
        }
    }
    m.canonicalize();
    if (*kind == "transducer") {
        m.deterministic = structurally_deterministic(m);
    } else {
        m.deterministic = *kind == "dcm";
    }
    return file;
}

CounterMachine parse_machine(std::string_view text)
{
    return parse_machine_file(text).machine;
}

CounterTransducer parse_transducer(std::string_view text)
{
    MachineFile f = parse_machine_file(text);
    if (!f.transducer) {
        throw ParseError(1, "file does not describe a transducer");
    }
    return f.as_transducer();
}

namespace {

std::string serialize_impl(const CounterMachine& m, const std::string* output_alphabet)
{
    // Names must be unique tokens to survive a round trip.
    std::vector<std::string> names = m.states;
    std::set<std::string> used;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty()) {
            names[i] = "q";
        }
        for (char& c : names[i]) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                c = '_';
            }
        }
        std::string base = names[i];
        for (int n = 1; !used.insert(names[i]).second; ++n) {
            names[i] = base + "~" + std::to_string(n);
        }
    }
    std::ostringstream out;
    out << "machine " << (m.name.empty() ? "M" : m.name) << "\n";
    out << "kind " << (output_alphabet ? "transducer" : m.deterministic ? "dcm" : "ncm") << "\n";
    out << "acceptance " << (m.marked ? "marked" : "unmarked") << "\n";
    out << "counters " << m.counters << "\n";
    out << "reversals ";
    if (m.reversal_bound == kUnbounded) {
        out << "inf";
    } else {
        out << m.reversal_bound;
    }
    out << "\n";
    out << "alphabet";
    for (char c : m.alphabet) {
        out << ' ' << c;
    }
    out << "\n";
    if (output_alphabet) {
        out << "outalphabet";
        for (char c : *output_alphabet) {
            out << ' ' << c;
        }
        out << "\n";
    }
    out << "states";
    for (const auto& s : names) {
        out << ' ' << s;
    }
    out << "\n";
    out << "initial " << names[m.initial] << "\n";
    out << "final";
    for (StateId q = 0; q < m.num_states(); ++q) {
        if (m.is_final(q)) {
            out << ' ' << names[q];
        }
    }
    out << "\n";
    std::vector<Transition> sorted = m.transitions;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& t : sorted) {
        out << "trans " << names[t.from] << ' ' << (t.symbol == kEot ? std::string("$") : std::string(1, char(t.symbol)))
            << ' ' << guard_to_string(t.guard, m.counters) << " -> " << names[t.to] << ' '
            << (t.move == Move::Stay ? 'S' : 'R');
        for (int d : t.deltas) {
            out << ' ' << delta_to_string(d);
        }
        if (output_alphabet) {
            out << " output \"" << t.output << '"';
        }
        out << "\n";
    }
    return out.str();
}

} // namespace

std::string serialize_machine(const CounterMachine& m)
{
    return serialize_impl(m, nullptr);
}

std::string serialize_transducer(const CounterTransducer& a)
{
    return serialize_impl(a.machine, &a.output_alphabet);
}

} // namespace rbcm

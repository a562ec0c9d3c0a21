#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fibra/abelian.hpp"
#include "fibra/compiler.hpp"
#include "fibra/linrep.hpp"
#include "fibra/serialize.hpp"
#include "fibra/summary.hpp"
#include "fibra/words.hpp"

namespace fibra {

// One interactive or batch session: word/relation registries, named results,
// and the command set of the front end. The built-in words F, R and V are
// preloaded; the verified relations fab and zc are built on first use.
class Session {
public:
    struct Options {
        int64_t state_cap = 2'000'000;
        std::optional<int64_t> timeout_seconds;
        bool quiet = false;
        std::ostream* out = &std::cout;
        std::ostream* log = nullptr; // extra sink for compile logs
    };

    Session() : Session(Options()) {}
    explicit Session(Options opts) : opts_(std::move(opts)) {
        env_.dfaos["F"] = fibonacci_dfao();
        env_.dfaos["R"] = rote_dfao();
        env_.dfaos["V"] = tmf_dfao();
    }

    CompileEnv& env() { return env_; }
    Options& options() { return opts_; }
    const std::map<std::string, Dfa>& results() const { return results_; }
    const std::map<std::string, LinearRepresentation>& representations() const { return reps_; }

    // Execute one command line. Throws on failure.
    void command(const std::string& line) {
        std::vector<std::string> words = split(line);
        if (words.empty()) return;
        const std::string& cmd = words[0];
        if (cmd == "eval") {
            need(words, 3, "eval <name> \"<predicate>\"");
            eval(words[1], words[2]);
        } else if (cmd == "count") {
            need(words, 4, "count <name> <param-var> \"<predicate>\"");
            count(words[1], words[2], words[3]);
        } else if (cmd == "value") {
            need(words, 3, "value <name> <n>");
            value(words[1], parse_nat(words[2]));
        } else if (cmd == "monoid") {
            if (words.size() != 2 && words.size() != 3) throw SemanticError("usage: monoid <name> [cap]");
            monoid(words[1], words.size() == 3 ? parse_nat(words[2]) : 100000);
        } else if (cmd == "range") {
            need(words, 2, "range <name>");
            range(words[1]);
        } else if (cmd == "load-word") {
            need(words, 3, "load-word <name> <path>");
            if (env_.dfaos.count(words[1])) throw SemanticError("word '" + words[1] + "' already defined");
            env_.dfaos[words[1]] = load_word(words[1], words[2]).dfao;
        } else if (cmd == "load-relation") {
            need(words, 3, "load-relation <name> <path>");
            load_relation(words[1], words[2]);
        } else if (cmd == "load-numsys") {
            need(words, 2, "load-numsys <path>");
            load_numsys(words[1]);
        } else if (cmd == "export-dot") {
            need(words, 3, "export-dot <name> <path>");
            export_dot(words[1], words[2]);
        } else if (cmd == "save") {
            need(words, 3, "save <name> <path>");
            save(words[1], words[2]);
        } else if (cmd == "run") {
            need(words, 2, "run <scriptfile>");
            run_script(words[1]);
        } else if (cmd == "help") {
            *opts_.out << "commands: eval count value monoid range load-word load-relation"
                          " load-numsys export-dot save run quit\n";
        } else {
            throw SemanticError("unknown command '" + cmd + "'");
        }
    }

    // Batch execution; a failing command prints its script line and
    // rethrows, aborting the rest of the script.
    bool run_script(const std::string& path) {
        if (script_depth_ > 16) throw SemanticError("script recursion too deep");
        std::ifstream in(path);
        if (!in) throw IoError("cannot open script '" + path + "'");
        ++script_depth_;
        std::string line;
        int lineno = 0;
        try {
            while (std::getline(in, line)) {
                ++lineno;
                std::string trimmed = trim(line);
                if (trimmed.empty() || trimmed[0] == '#') continue;
                command(trimmed);
            }
        } catch (...) {
            --script_depth_;
            std::cerr << path << ":" << lineno << ": in command: " << trim(line) << '\n';
            throw;
        }
        --script_depth_;
        return true;
    }

    CompileResult compile_predicate(const std::string& text) {
        ensure_builtins(text);
        CompileOptions copts;
        copts.state_cap = opts_.state_cap;
        if (opts_.timeout_seconds)
            copts.deadline = std::chrono::steady_clock::now() + std::chrono::seconds(*opts_.timeout_seconds);
        copts.on_step = [this](const CompileStep& s, int index) {
            std::string line = format_step(s, index);
            if (!opts_.quiet) *opts_.out << line << '\n';
            if (opts_.log) *opts_.log << line << '\n';
        };
        return compile(text, env_, copts);
    }

private:
    static std::string trim(const std::string& s) {
        size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    // whitespace words, with double-quoted strings kept whole
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i >= line.size()) break;
            if (line[i] == '"') {
                size_t j = line.find('"', i + 1);
                if (j == std::string::npos) throw SyntaxError("unterminated quote in command");
                out.push_back(line.substr(i + 1, j - i - 1));
                i = j + 1;
            } else {
                size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
                out.push_back(line.substr(i, j - i));
                i = j;
            }
        }
        return out;
    }

    static void need(const std::vector<std::string>& words, size_t n, const char* usage) {
        if (words.size() != n) throw SemanticError(std::string("usage: ") + usage);
    }

    static uint64_t parse_nat(const std::string& s) {
        uint64_t v = 0;
        if (s.empty()) throw SemanticError("expected a natural number");
        for (char c : s) {
            if (!std::isdigit(static_cast<unsigned char>(c))) throw SemanticError("expected a natural number, got '" + s + "'");
            v = v * 10 + (c - '0');
        }
        return v;
    }

    // fab and zc are costly to build, so they register lazily when a
    // predicate first mentions them
    void ensure_builtins(const std::string& text) {
        if (!env_.dfaos.count("fab") && text.find("fab") != std::string::npos) env_.dfaos["fab"] = fab_dfao();
        if (!env_.relations.count("zc") && text.find("zc") != std::string::npos)
            env_.relations["zc"] = zc_automaton().dfa;
    }

    void finish_log(const CompileLog& log) {
        std::string overall = "overall time: " + std::to_string(log.total_ms) + "ms";
        std::string peak = "largest intermediate automaton: " + std::to_string(log.peak_states) + " states";
        if (!opts_.quiet) *opts_.out << overall << '\n' << peak << '\n';
        if (opts_.log) *opts_.log << overall << '\n' << peak << '\n';
    }

    void eval(const std::string& name, const std::string& text) {
        CompileResult r = compile_predicate(text);
        finish_log(r.log);
        results_[name] = r.dfa;
        print_summary(r.dfa);
    }

    void print_summary(const Dfa& dfa) {
        std::ostream& out = *opts_.out;
        if (dfa.tracks.empty()) {
            out << "result: " << (dfa.accepting[dfa.initial] ? "true" : "false") << '\n';
            return;
        }
        if (is_empty(dfa)) {
            out << "language: empty\n";
            return;
        }
        if (language_finite(dfa)) {
            out << "language:";
            for (const TupleWord& w : list_language(dfa)) {
                std::vector<std::string> values = decode(w);
                out << ' ';
                if (values.size() == 1) {
                    out << values[0];
                } else {
                    out << '(';
                    for (size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
                    out << ')';
                }
            }
            out << '\n';
            return;
        }
        out << "language: infinite, minimal automaton has " << dfa.num_states() << " states\n";
        if (dfa.num_states() <= 8) out << "language matches: " << regex_summary(dfa) << '\n';
        out << serialize(dfa, env_.numsys.name);
    }

    // decoded integers when the numeration system can decode, raw digit
    // strings otherwise
    std::vector<std::string> decode(const TupleWord& w) const {
        std::vector<std::string> values;
        for (int t = 0; t < w.track_count; ++t) {
            DigitString d = w.track(t);
            if (env_.numsys.decode) {
                values.push_back(std::to_string(env_.numsys.decode(d)));
            } else {
                std::string text;
                for (uint8_t b : d) text += static_cast<char>('0' + b);
                values.push_back(text.empty() ? "eps" : text);
            }
        }
        return values;
    }

    void count(const std::string& name, const std::string& param, const std::string& text) {
        CompileResult r = compile_predicate(text);
        finish_log(r.log);
        if (std::find(r.dfa.tracks.begin(), r.dfa.tracks.end(), param) == r.dfa.tracks.end())
            throw SemanticError("count: '" + param + "' is not a free variable of the predicate");
        reps_[name] = linrep_from_dfa(r.dfa, param);
        *opts_.out << "linear representation '" << name << "' of rank " << reps_[name].rank << '\n';
    }

    const LinearRepresentation& rep(const std::string& name) const {
        auto it = reps_.find(name);
        if (it == reps_.end()) throw SemanticError("no linear representation named '" + name + "'");
        return it->second;
    }

    void value(const std::string& name, uint64_t n) {
        BigInt v = evaluate(rep(name), n);
        *opts_.out << name << "(" << n << ") = " << v.to_string() << '\n';
    }

    void monoid(const std::string& name, uint64_t cap) {
        MonoidClosure c = monoid_closure(rep(name), cap);
        if (!c.closed) {
            *opts_.out << "monoid of '" << name << "' not closed within cap " << cap << " (explored " << c.size()
                       << " matrices)\n";
            return;
        }
        closures_[name] = std::move(c);
        *opts_.out << "monoid of '" << name << "' has " << closures_[name].size() << " elements\n";
    }

    void range(const std::string& name) {
        if (!closures_.count(name)) {
            MonoidClosure c = monoid_closure(rep(name));
            if (!c.closed) throw SemanticError("monoid of '" + name + "' is not finite within the default cap");
            closures_[name] = std::move(c);
        }
        std::set<BigInt> vals = value_range(rep(name), closures_[name]);
        *opts_.out << "value range of '" << name << "': {";
        bool first = true;
        for (const auto& v : vals) {
            *opts_.out << (first ? "" : ", ") << v.to_string();
            first = false;
        }
        *opts_.out << "}\n";
    }

    void load_relation(const std::string& name, const std::string& path) {
        if (env_.relations.count(name)) throw SemanticError("relation '" + name + "' already defined");
        AutomatonFile f = read_file(path);
        if (f.is_dfao()) throw SemanticError(path + ": relations are plain DFAs; use load-word for DFAOs");
        Dfa rel = f.dfa();
        std::vector<std::string> names;
        for (int i = 0; i < rel.k(); ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
        rel = instantiate(rel, names); // positional tracks, sorted names
        env_.relations[name] = pad_normalize(rel);
    }

    void load_numsys(const std::string& path) {
        if (path == "fib") {
            swap_numsys(fib_bundle());
            *opts_.out << "numeration system: fib\n";
            return;
        }
        std::ifstream in(path);
        if (!in) throw IoError("cannot open numeration manifest '" + path + "'");
        std::filesystem::path base = std::filesystem::path(path).parent_path();
        NumerationBundle b;
        b.name = "";
        std::string line;
        int lineno = 0;
        std::string add_path, less_path, canonical_path;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::istringstream ls(t);
            std::string key, val;
            if (!(ls >> key >> val)) throw SyntaxError("numeration manifest: bad line", lineno, 0);
            if (key == "name") b.name = val;
            else if (key == "add") add_path = (base / val).string();
            else if (key == "less") less_path = (base / val).string();
            else if (key == "canonical") canonical_path = (base / val).string();
            else throw SyntaxError("numeration manifest: unknown key '" + key + "'", lineno, 0);
        }
        if (b.name.empty() || add_path.empty() || less_path.empty() || canonical_path.empty())
            throw SyntaxError("numeration manifest needs name, add, less and canonical entries");
        auto load_dfa = [](const std::string& p, int arity, const std::vector<std::string>& names) {
            AutomatonFile f = read_file(p);
            if (f.is_dfao()) throw SemanticError(p + ": expected a DFA");
            if (f.dfa().k() != arity)
                throw SemanticError(p + ": expected " + std::to_string(arity) + " tracks");
            return instantiate(f.dfa(), names);
        };
        b.add = load_dfa(add_path, 3, {"x", "y", "z"});
        b.less = load_dfa(less_path, 2, {"x", "y"});
        b.canonical = minimize(load_dfa(canonical_path, 1, {"x"}));
        CompileOptions copts;
        copts.state_cap = opts_.state_cap;
        for (const auto& check : numeration_checks(b, copts))
            if (!check.ok)
                throw VerificationError("numeration system '" + b.name + "' rejected: " + check.name +
                                        " check failed (" + check.predicate + ")");
        swap_numsys(std::move(b));
        *opts_.out << "numeration system: " << env_.numsys.name << " (all checks passed)\n";
    }

    void swap_numsys(NumerationBundle b) {
        CompileEnv fresh;
        fresh.numsys = std::move(b);
        fresh.dfaos = env_.dfaos;
        fresh.relations = env_.relations;
        env_ = std::move(fresh);
    }

    void export_dot(const std::string& name, const std::string& path) {
        std::ofstream out(path);
        if (!out) throw IoError("cannot open '" + path + "' for writing");
        if (results_.count(name)) out << to_dot(results_.at(name));
        else if (env_.dfaos.count(name)) out << to_dot(env_.dfaos.at(name));
        else if (env_.relations.count(name)) out << to_dot(env_.relations.at(name));
        else throw SemanticError("nothing named '" + name + "' to export");
    }

    void save(const std::string& name, const std::string& path) {
        if (results_.count(name)) {
            write_file(results_.at(name), path, env_.numsys.name);
        } else if (reps_.count(name)) {
            std::ofstream out(path);
            if (!out) throw IoError("cannot open '" + path + "' for writing");
            out << serialize(reps_.at(name));
        } else if (env_.dfaos.count(name)) {
            write_file(env_.dfaos.at(name), path, env_.numsys.name);
        } else if (env_.relations.count(name)) {
            write_file(env_.relations.at(name), path, env_.numsys.name);
        } else {
            throw SemanticError("nothing named '" + name + "' to save");
        }
    }

    Options opts_;
    CompileEnv env_;
    std::map<std::string, Dfa> results_;
    std::map<std::string, LinearRepresentation> reps_;
    std::map<std::string, MonoidClosure> closures_;
    int script_depth_ = 0;
};

} // namespace fibra

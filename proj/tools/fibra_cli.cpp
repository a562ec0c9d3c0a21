#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fibra/session.hpp"

namespace {

// exit codes: 0 ok, 1 logical/compile error, 2 resource exhaustion, 3 I/O
int classify(const std::exception& e) {
    if (dynamic_cast<const fibra::ResourceError*>(&e)) return 2;
    if (dynamic_cast<const fibra::IoError*>(&e)) return 3;
    return 1;
}

int repl(fibra::Session& session) {
    std::string line;
    std::cout << "fibra> " << std::flush;
    while (std::getline(std::cin, line)) {
        std::string t = line;
        if (t == "quit" || t == "exit") break;
        try {
            session.command(line);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
        }
        std::cout << "fibra> " << std::flush;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compile first-order predicates over Fibonacci-automatic words into automata"};
    std::string batch, numsys = "fib", logpath;
    int64_t max_states = 2'000'000;
    int64_t timeout = -1;
    bool quiet = false;
    app.add_option("--batch", batch, "run a command script and exit");
    app.add_option("--max-states", max_states, "state cap for intermediate automata");
    app.add_option("--timeout", timeout, "per-command timeout in seconds (batch default 900)");
    app.add_option("--numsys", numsys, "numeration system: fib or a manifest path");
    app.add_option("--log", logpath, "append compile logs to this file");
    app.add_flag("--quiet", quiet, "suppress per-step compile logs");
    CLI11_PARSE(app, argc, argv);

    std::ofstream logfile;
    fibra::Session::Options opts;
    opts.state_cap = max_states;
    opts.quiet = quiet;
    if (!logpath.empty()) {
        logfile.open(logpath, std::ios::app);
        if (!logfile) {
            std::cerr << "error: cannot open log file '" << logpath << "'\n";
            return 3;
        }
        opts.log = &logfile;
    }
    if (timeout >= 0) opts.timeout_seconds = timeout;
    else if (!batch.empty()) opts.timeout_seconds = 900;

    try {
        fibra::Session session(opts);
        if (numsys != "fib") session.command("load-numsys " + numsys);
        if (!batch.empty()) {
            session.run_script(batch);
            return 0;
        }
        return repl(session);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(e);
    }
}

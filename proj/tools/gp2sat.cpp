// gp2sat: satisfiability of a guarded two-variable sentence with local
// counting constraints.  Reads one sentence from a file or standard input
// and prints a JSON report.  Exit status: 0 sat, 1 unsat, 2 error.

#include "gp2/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"Decide satisfiability of a guarded two-variable sentence with local counting"};
    gp2::RunConfig cfg;
    std::string input = "-";
    std::string mode = "sat";
    std::string semantics = "nat";
    std::string solver = "builtin";
    std::string mod_cap = "65536";

    app.add_option("input", input, "Input file, or - for standard input")->capture_default_str();
    app.add_option("--mode", mode, "sat | witness | prefix | normalize-only | graph-dump")
        ->check(CLI::IsMember({"sat", "witness", "prefix", "normalize-only", "graph-dump"}))
        ->capture_default_str();
    app.add_option("--semantics", semantics, "nat | nat-infinity")
        ->check(CLI::IsMember({"nat", "nat-infinity"}))
        ->capture_default_str();
    app.add_option("--solver", solver, "builtin | external:<cmd>")->capture_default_str();
    app.add_option("--prefix-len", cfg.prefix_len, "Elements to process in prefix mode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for deletion order and prefix choices")->capture_default_str();
    app.add_flag("--stats", cfg.stats, "Report sweeps, removals and solver calls");
    app.add_flag("--trace", cfg.trace, "Report every deletion with its linear system");
    app.add_option("--jobs", cfg.jobs, "Worker threads for the solver")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--type-cap", cfg.type_cap, "Largest number of type bits to enumerate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--node-budget", cfg.node_budget, "Branch-and-bound node budget per system")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--mod-cap", mod_cap, "Largest modulus accepted by the solver")->capture_default_str();
    app.add_option("--element-cap", cfg.element_cap, "Largest prefix, in elements")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    static const std::map<std::string, gp2::Mode> modes{{"sat", gp2::Mode::Sat},
                                                        {"witness", gp2::Mode::Witness},
                                                        {"prefix", gp2::Mode::Prefix},
                                                        {"normalize-only", gp2::Mode::NormalizeOnly},
                                                        {"graph-dump", gp2::Mode::GraphDump}};
    cfg.mode = modes.at(mode);
    cfg.semantics = semantics == "nat" ? gp2::Semantics::Nat : gp2::Semantics::NatInfinity;
    if (solver.rfind("external:", 0) == 0) {
        cfg.external = solver.substr(9);
    } else if (solver != "builtin") {
        std::cerr << "--solver must be builtin or external:<cmd>\n";
        return gp2::exit_error;
    }
    try {
        cfg.mod_cap = gp2::BigInt(mod_cap);
    } catch (const std::exception&) {
        std::cerr << "--mod-cap must be an integer\n";
        return gp2::exit_error;
    }
    if (cfg.mod_cap <= 0) {
        std::cerr << "--mod-cap must be positive\n";
        return gp2::exit_error;
    }

    std::string text;
    if (input == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(input);
        if (!in) {
            std::cerr << "cannot open " << input << '\n';
            return gp2::exit_error;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return gp2::run(cfg, text, std::cout, std::cerr);
}

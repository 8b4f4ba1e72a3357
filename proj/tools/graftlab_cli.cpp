// Command-line entry point: converge / spacetime / selftest / panel.
//
// Exit codes: 0 success (converge: verdict true), 1 failed verdict or
// self-test failure, 2 configuration/usage error, 3 numeric failure.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <graftlab/runner.hpp>

namespace {

void usage() {
    std::fprintf(stderr,
                 "usage: graftlab <command> [args]\n"
                 "  converge <cfg>   run the Thurston-boundary convergence "
                 "experiment\n"
                 "  spacetime <cfg>  cosmological time on a flat regular domain\n"
                 "  selftest         run the module invariant suites\n"
                 "  panel <cfg>      print the curve panel with validation\n"
                 "flags: --out <dir> (default 'out'), --seed <n>, --threads <n>\n");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace graftlab;
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string out = "out";
    unsigned seed = 1;
    std::vector<std::string> positional;
    for (std::size_t i = 0; i < args.size(); ++i) {
        auto flag_value = [&](const char* name) -> std::string {
            if (i + 1 >= args.size()) {
                std::fprintf(stderr, "graftlab: %s requires a value\n", name);
                std::exit(2);
            }
            return args[++i];
        };
        if (args[i] == "--out")
            out = flag_value("--out");
        else if (args[i] == "--seed")
            seed = static_cast<unsigned>(std::stoul(flag_value("--seed")));
        else if (args[i] == "--threads")
            (void)flag_value("--threads");  // wall-time only; output is fixed
        else if (args[i].rfind("--", 0) == 0) {
            std::fprintf(stderr, "graftlab: unknown flag %s\n", args[i].c_str());
            usage();
            return 2;
        } else
            positional.push_back(args[i]);
    }
    if (positional.empty()) {
        usage();
        return 2;
    }
    const std::string cmd = positional[0];
    try {
        if (cmd == "selftest") {
            return runner::cmd_selftest(seed);
        }
        if (cmd == "converge" || cmd == "spacetime" || cmd == "panel") {
            if (positional.size() != 2) {
                usage();
                return 2;
            }
            const runner::Config cfg = runner::load_config(positional[1]);
            if (cmd == "converge") return runner::cmd_converge(cfg, out);
            if (cmd == "spacetime") return runner::cmd_spacetime(cfg, out);
            return runner::cmd_panel(cfg);
        }
        std::fprintf(stderr, "graftlab: unknown command '%s'\n", cmd.c_str());
        usage();
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "graftlab: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "graftlab: %s\n", e.what());
        return 3;
    }
}

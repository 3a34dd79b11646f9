#include <cstdio>
#include <filesystem>
#include <iostream>

#include <unistd.h>

#include <CLI11.hpp>

#include "patmine/session.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"patmine: declarative pattern set mining"};
    app.require_subcommand(1);

    unsigned workers = 1;
    std::size_t limit = 0;
    std::string format = "table";
    std::string data_dir;
    bool stats = false;
    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--workers", workers, "solver threads")->check(CLI::PositiveNumber);
        cmd->add_option("--limit", limit, "stop after N solutions per solve")->check(CLI::PositiveNumber);
        cmd->add_option("--format", format, "solution output format")->check(CLI::IsMember({"table", "json", "csv"}));
        cmd->add_option("--data-dir", data_dir, "directory for relative load paths")->check(CLI::ExistingDirectory);
        cmd->add_flag("--stats", stats, "print search statistics after each solve");
    };

    auto* run = app.add_subcommand("run", "execute a .pmq script");
    std::string script;
    run->add_option("script", script, "script file")->required();
    common(run);

    auto* repl = app.add_subcommand("repl", "interactive session");
    bool no_history = false;
    repl->add_flag("--no-history", no_history, "do not record statements to .patmine_history");
    common(repl);

    CLI11_PARSE(app, argc, argv);

    patmine::SessionOptions options;
    options.workers = workers;
    if (limit)
        options.limit = limit;
    options.format = *patmine::parse_format(format);
    if (!data_dir.empty())
        options.data_dir = data_dir;
    options.stats = stats;

    if (*run)
        return patmine::run_script(script, std::cout, std::cerr, options);

    patmine::ReplOptions ropts;
    ropts.prompt = isatty(fileno(stdin));
    if (!no_history)
        ropts.history = std::filesystem::current_path() / ".patmine_history";
    patmine::interactive_loop(std::cin, std::cout, std::cerr, options, ropts);
    return patmine::exit_ok;
}

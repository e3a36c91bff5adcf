// glam: check, run and observe guarded lambda-calculus programs.

#include <unistd.h>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glam/cli.hpp"

namespace {

// A count given either positionally or by flag; exactly one is required.
std::uint64_t pick(const std::optional<std::uint64_t>& positional, const std::optional<std::uint64_t>& flag,
                   const char* what) {
  if (positional && flag && *positional != *flag) {
    throw glam::UsageError(std::string("conflicting values for ") + what);
  }
  if (positional) return *positional;
  if (flag) return *flag;
  throw glam::UsageError(std::string("missing ") + what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glam: a toolchain for the guarded lambda-calculus"};
  app.require_subcommand(1);

  std::string prelude_path;
  app.add_option("--prelude", prelude_path, "use this prelude instead of the built-in one");

  std::string path, expr, name;
  std::uint64_t fuel = 0;
  std::optional<std::uint64_t> pos_n, flag_n, pos_index, flag_index;
  std::vector<std::string> args;

  auto* check = app.add_subcommand("check", "type check a program and print its definitions");
  check->add_option("file", path, "program file")->required();

  auto* run = app.add_subcommand("run", "evaluate a closed expression to a value");
  run->add_option("file", path, "program file")->required();
  run->add_option("expr", expr, "definition name or expression")->required();
  run->add_option("--fuel", fuel, "step limit (default: GLAM_FUEL or 1000000)");

  auto* take = app.add_subcommand("take", "print the first n elements of a stream");
  take->add_option("file", path, "program file")->required();
  take->add_option("expr", expr, "stream expression")->required();
  take->add_option("count", pos_n, "number of elements");
  take->add_option("--n", flag_n, "number of elements");
  take->add_option("--fuel", fuel, "total step limit");

  auto* denote = app.add_subcommand("denote", "print the denotation at a finite index");
  denote->add_option("file", path, "program file")->required();
  denote->add_option("expr", expr, "expression")->required();
  denote->add_option("stage", pos_index, "stage index, at least 1");
  denote->add_option("--index", flag_index, "stage index, at least 1");

  auto* bde_compile = app.add_subcommand("bde-compile", "compile a BDE to guarded and coinductive terms");
  bde_compile->add_option("file", path, ".bde file")->required();
  bde_compile->add_option("name", name, "BDE name")->required();

  auto* bde_run = app.add_subcommand("bde-run", "compare a compiled BDE against the reference evaluator");
  bde_run->add_option("file", path, ".bde file")->required();
  bde_run->add_option("name", name, "BDE name")->required();
  bde_run->add_option("count", pos_n, "number of elements");
  bde_run->add_option("args", args, "argument streams (prelude expressions)");
  bde_run->add_option("--n", flag_n, "number of elements");
  bde_run->add_option("--fuel", fuel, "total step limit");

  auto* repl = app.add_subcommand("repl", "interactive session");
  std::string repl_file;
  repl->add_option("file", repl_file, "program to load first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? glam::kExitOk : glam::kExitUsage;
  }

  glam::CliOptions opts;
  if (!prelude_path.empty()) opts.prelude_path = prelude_path;

  glam::Command command;
  try {
    if (*check) {
      command = glam::cmd::Check{path};
    } else if (*run) {
      command = glam::cmd::Run{path, expr, fuel};
    } else if (*take) {
      command = glam::cmd::Take{path, expr, pick(pos_n, flag_n, "n"), fuel};
    } else if (*denote) {
      command = glam::cmd::Denote{path, expr, static_cast<unsigned>(pick(pos_index, flag_index, "index"))};
    } else if (*bde_compile) {
      command = glam::cmd::BdeCompile{path, name};
    } else if (*bde_run) {
      command = glam::cmd::BdeRun{path, name, args, pick(pos_n, flag_n, "n"), fuel};
    } else {
      glam::cmd::Repl r;
      if (!repl_file.empty()) r.path = repl_file;
      r.in = &std::cin;
      r.prompt = isatty(STDIN_FILENO);
      command = r;
    }
  } catch (const glam::UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return glam::kExitUsage;
  }
  return glam::run_command(command, std::cout, std::cerr, opts);
}

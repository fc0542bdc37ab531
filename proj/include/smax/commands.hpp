#pragma once

namespace smax {

/*
 * CLI entry point: <binary> <subcommand> --config <path> [--out <path>]
 * [--seed <u64>] [--override section.key=value ...] [--threads <n>].
 * Exit 0 when every emitted report passes, 1 when a check fails (failing
 * JSON lines go to stderr), 2 on usage, config, or resource errors.
 */
int run_cli(int argc, char** argv);

}  // namespace smax

#pragma once

namespace polarsep::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kConfigError = 2,
    kDegenerate = 3,
    kVerifyFailed = 4,
};

/// Parses arguments, runs one subcommand and maps failures to exit codes.
int run(int argc, char** argv);

}  // namespace polarsep::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dseq::cli {

enum ExitCode : int { kOk = 0, kError = 1, kFalsified = 2, kGoldenDrift = 3 };

/// Result of one command: the report text and the exit status.
struct Outcome {
    int code = kOk;
    std::string report;
    std::string errors;
    /// Value of --report, empty when the report goes to standard output.
    std::string report_path;
};

/// Runs one command line (without the program name) and returns the report
/// instead of writing it. Never throws.
Outcome execute(const std::vector<std::string>& args);

/// Runs one command line. The report goes to the --report file when given and
/// to `out` otherwise; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct GalleryItem {
    std::string name;
    std::vector<std::string> args;
};

/// Fixtures whose reports are kept as golden files.
std::vector<GalleryItem> gallery_items();

} // namespace dseq::cli

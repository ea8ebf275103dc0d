#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vlcsim/config.hpp"

namespace vlcsim {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    /// Nudges one entry of the QCT family before checking (fault injection).
    double perturb_qct = 0.0;
    /// Where to read CIE tables; defaults to default_data_dir().
    std::optional<std::filesystem::path> data_dir;
};

std::vector<ValidationCheck> run_validation_suite(const ValidationOptions& options = {});

inline constexpr const char* experiment_names[] = {"ber", "papr", "roommap", "illum"};

struct RunResult {
    std::vector<std::filesystem::path> files;
};

/// Runs one experiment and writes its CSV and JSON files into cfg.out_dir.
/// A summary is echoed to `out`.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& experiment, std::ostream& out);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// RFC 4180 field quoting (only when needed).
std::string csv_field(const std::string& text);
std::string csv_number(double v);

/// Exit codes: 0 success, 1 runtime or validation failure, 2 usage or
/// configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vlcsim

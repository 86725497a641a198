#pragma once

#include <iosfwd>
#include <string>

#include "run_support.hpp"

namespace sclust::cli {

// `config_text` is written verbatim to config.toml in the output directory.
void cmd_cluster(const RunOptions& o, const std::string& config_text, std::ostream& out);
void cmd_spectrum(const RunOptions& o, const std::string& config_text, std::ostream& out);
void cmd_stability(const RunOptions& o, const std::string& config_text, std::ostream& out);
void cmd_compare(const RunOptions& o, const std::string& config_text, std::ostream& out);
void cmd_report(const RunOptions& o, const std::string& config_text, std::ostream& out);
void cmd_synth(const RunOptions& o, const std::string& config_text, std::ostream& out);

}  // namespace sclust::cli

#ifndef PULSELAB_LAB_HPP
#define PULSELAB_LAB_HPP

#include <string>

#include "pulselab/reaction.hpp"

namespace pulselab::lab {

/// Builds a reaction from its JSON description (kind tag plus parameters).
/// Unknown keys are rejected.
ReactionPtr reaction_from_json_text(const std::string& json_text);

/// Runs one experiment subcommand against a JSON config file, writing CSV
/// artifacts and a text summary into out_dir. Subcommands: simulate, speed,
/// certify, decay, design, design-nd, terrace, fg, sweep.
///
/// Returns 0 when every stated verdict passes and 1 on a verdict failure.
/// Configuration problems throw ConfigError, numerical failures
/// NumericError; the CLI maps these to exit codes 2 and 3.
int run(const std::string& subcommand, const std::string& config_path,
        const std::string& out_dir, int jobs, unsigned seed);

}  // namespace pulselab::lab

#endif

// Apache License, Version 2.0, refer to LICENSE.txt

// Persisted artifacts and their human-readable rendering.
//
// Metrics files are comma-separated with a '#'-prefixed preamble holding
// the resolved configuration:
//
//   # cdosr metrics
//   # study=sweep
//   # <key>=<value> ...
//   openness,mean_f,std_f,mean_precision,mean_recall,repeats,seed
//
// The epsilon study adds a leading `series` column (closed/open).
//
// Subclass reports use the same preamble followed by one row per
// (group, subclass):
//
//   group,label,subclass,count,proportion,kept
//
// where label is the class id (empty for the test batch) and kept is 1 when
// the entry survives pruning. Summary lines `# delta=`, `# known_subclasses=`
// and `# unknown_subclasses=` follow the preamble.

#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cdosr/metrics.hpp"
#include "cdosr/recognizer.hpp"

namespace cdosr {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

void write_metrics_csv(std::ostream& out, const std::string& study, const std::string& x_column,
                       const std::vector<MetricsRow>& rows, const ConfigEcho& config);

void write_subclass_report(std::ostream& out, const OSRPrediction& prediction,
                           const ConfigEcho& config);

// Class display name: label_names[label] when present, else the number.
std::string class_name(int label, const std::vector<std::string>& label_names);

// Table layout: one block per known class listing its surviving subclasses
// and their percentages, then the test batch split into known and new
// subclasses, then the unknown-class estimate.
void render_subclass_table(std::ostream& out, const OSRPrediction& prediction,
                           const std::vector<std::string>& label_names = {});

void render_metrics(std::ostream& out, const std::string& x_column,
                    const std::vector<MetricsRow>& rows);

// A persisted artifact read back for the `report` subcommand.
struct LoadedArtifact {
  std::string kind;  // "metrics", "subclasses" or "fit"
  std::map<std::string, std::string> preamble;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Throws std::runtime_error on an unrecognized file.
LoadedArtifact read_artifact(std::istream& in);

// Rebuilds the prediction summary (tables, counts, delta) from a subclass
// report; outcomes are not persisted and stay empty.
OSRPrediction prediction_from_report(const LoadedArtifact& artifact);

void render_artifact(std::ostream& out, const LoadedArtifact& artifact);

}  // namespace cdosr

// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/report.hpp"

#include <cstdio>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cdosr {

namespace {

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

void write_preamble(std::ostream& out, const std::string& kind, const ConfigEcho& config) {
  out << "# cdosr " << kind << '\n';
  for (const auto& [k, v] : config) out << "# " << k << '=' << v << '\n';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::string& study, const std::string& x_column,
                       const std::vector<MetricsRow>& rows, const ConfigEcho& config) {
  ConfigEcho full = {{"study", study}};
  full.insert(full.end(), config.begin(), config.end());
  write_preamble(out, "metrics", full);
  const bool series = study == "epsilon";
  if (series) out << "series,";
  out << x_column << ",mean_f,std_f,mean_precision,mean_recall,repeats,seed\n";
  for (const auto& r : rows) {
    if (series) out << r.series << ',';
    out << fmt(r.x, 8) << ',' << fmt(r.mean_f) << ',' << fmt(r.std_f) << ','
        << fmt(r.mean_precision) << ',' << fmt(r.mean_recall) << ',' << r.repeats() << ','
        << r.seed << '\n';
  }
}

void write_subclass_report(std::ostream& out, const OSRPrediction& prediction,
                           const ConfigEcho& config) {
  write_preamble(out, "subclasses", config);
  out << "# delta=" << prediction.delta << '\n'
      << "# known_subclasses=" << prediction.known_subclasses << '\n'
      << "# unknown_subclasses=" << prediction.unknown_subclasses << '\n'
      << "# epsilon=" << fmt(prediction.tables.epsilon, 8) << '\n'
      << "group,label,subclass,count,proportion,kept\n";
  const auto& raw = prediction.tables.raw;
  const auto& pruned = prediction.tables.pruned;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    for (const auto& e : raw[j].entries) {
      out << j << ',';
      if (raw[j].label) out << *raw[j].label;
      out << ',' << e.subclass << ',' << e.count << ',' << fmt(e.proportion) << ','
          << (pruned[j].contains(e.subclass) ? 1 : 0) << '\n';
    }
  }
}

std::string class_name(int label, const std::vector<std::string>& label_names) {
  if (label >= 0 && static_cast<std::size_t>(label) < label_names.size())
    return label_names[static_cast<std::size_t>(label)];
  return std::to_string(label);
}

void render_subclass_table(std::ostream& out, const OSRPrediction& prediction,
                           const std::vector<std::string>& label_names) {
  const auto& pruned = prediction.tables.pruned;
  if (pruned.empty()) return;
  const std::size_t n_known = pruned.size() - 1;

  out << std::left << std::setw(18) << "Group" << std::setw(11) << "#Subclass"
      << "Proportion of the corresponding subclass (%)\n";
  std::set<int> known_set;
  for (std::size_t j = 0; j < n_known; ++j) {
    const auto& t = pruned[j];
    std::ostringstream name;
    name << "Class" << (j + 1) << " ('" << class_name(t.label.value_or(-1), label_names) << "')";
    std::ostringstream ids, props;
    for (const auto& e : t.entries) {
      known_set.insert(e.subclass);
      ids << std::setw(8) << ("S" + std::to_string(e.subclass));
      props << std::setw(8) << fmt(100.0 * e.proportion, 2);
    }
    out << std::setw(18) << name.str() << std::setw(11) << t.entries.size() << ids.str() << '\n'
        << std::setw(29) << "" << props.str() << '\n';
  }

  const auto& test = pruned.back();
  int known_here = 0, new_here = 0;
  double known_share = 0.0, new_share = 0.0;
  for (const auto& e : test.entries) {
    if (known_set.count(e.subclass)) {
      ++known_here;
      known_share += e.proportion;
    } else {
      ++new_here;
      new_share += e.proportion;
    }
  }
  out << std::setw(18) << "Testing-Set" << std::setw(11) << test.entries.size()
      << "Known subclasses (#: " << known_here << "): " << fmt(100.0 * known_share, 2)
      << "   New subclasses (#: " << new_here << "): " << fmt(100.0 * new_share, 2) << '\n';
  out << "known-class subclasses |S_known| = " << prediction.known_subclasses
      << ", new subclasses |S_unknown| = " << prediction.unknown_subclasses << '\n';
  out << "estimated unknown classes: " << prediction.delta << '\n';
}

void render_metrics(std::ostream& out, const std::string& x_column,
                    const std::vector<MetricsRow>& rows) {
  out << std::left;
  const bool series = !rows.empty() && !rows.front().series.empty();
  if (series) out << std::setw(8) << "series";
  out << std::setw(12) << x_column << std::setw(10) << "F" << std::setw(10) << "std"
      << std::setw(11) << "precision" << std::setw(10) << "recall" << "runs\n";
  for (const auto& r : rows) {
    if (series) out << std::setw(8) << r.series;
    out << std::setw(12) << fmt(r.x, 5) << std::setw(10) << fmt(r.mean_f, 4) << std::setw(10)
        << fmt(r.std_f, 4) << std::setw(11) << fmt(r.mean_precision, 4) << std::setw(10)
        << fmt(r.mean_recall, 4) << r.repeats() << '\n';
  }
}

LoadedArtifact read_artifact(std::istream& in) {
  LoadedArtifact a;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      if (a.kind.empty() && body.rfind("cdosr ", 0) == 0) {
        a.kind = body.substr(6);
        continue;
      }
      const auto eq = body.find('=');
      if (eq != std::string::npos) a.preamble[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      a.columns = split_csv(line);
      header_seen = true;
    } else {
      a.rows.push_back(split_csv(line));
      if (a.rows.back().size() != a.columns.size())
        throw std::runtime_error("artifact row has " + std::to_string(a.rows.back().size()) +
                                 " fields, expected " + std::to_string(a.columns.size()));
    }
  }
  if (a.kind != "metrics" && a.kind != "subclasses" && a.kind != "fit")
    throw std::runtime_error("not a cdosr artifact");
  if (!header_seen) throw std::runtime_error("artifact has no column header");
  return a;
}

OSRPrediction prediction_from_report(const LoadedArtifact& a) {
  if (a.kind != "subclasses") throw std::runtime_error("not a subclass report");
  OSRPrediction p;
  auto get = [&a](const char* key) {
    auto it = a.preamble.find(key);
    if (it == a.preamble.end()) throw std::runtime_error(std::string("report lacks ") + key);
    return it->second;
  };
  p.delta = std::stoi(get("delta"));
  p.known_subclasses = std::stoi(get("known_subclasses"));
  p.unknown_subclasses = std::stoi(get("unknown_subclasses"));
  p.tables.epsilon = std::stod(get("epsilon"));

  for (const auto& row : a.rows) {
    const std::size_t j = std::stoul(row[0]);
    while (p.tables.raw.size() <= j) {
      SubclassTable t;
      t.group = p.tables.raw.size();
      p.tables.raw.push_back(t);
      p.tables.pruned.push_back(t);
    }
    SubclassEntry e{std::stoi(row[2]), std::stoi(row[3]), std::stod(row[4])};
    for (auto* t : {&p.tables.raw[j], &p.tables.pruned[j]})
      if (!row[1].empty()) t->label = std::stoi(row[1]);
    p.tables.raw[j].entries.push_back(e);
    p.tables.raw[j].size += e.count;
    if (row[5] == "1") p.tables.pruned[j].entries.push_back(e);
  }
  for (std::size_t j = 0; j < p.tables.pruned.size(); ++j) p.tables.pruned[j].size = p.tables.raw[j].size;
  return p;
}

void render_artifact(std::ostream& out, const LoadedArtifact& a) {
  if (a.kind == "subclasses") {
    render_subclass_table(out, prediction_from_report(a));
    return;
  }
  std::vector<MetricsRow> rows;
  const bool series = !a.columns.empty() && a.columns[0] == "series";
  const std::size_t o = series ? 1 : 0;
  for (const auto& r : a.rows) {
    MetricsRow m;
    if (series) m.series = r[0];
    m.x = std::stod(r[o]);
    m.mean_f = std::stod(r[o + 1]);
    m.std_f = std::stod(r[o + 2]);
    m.mean_precision = std::stod(r[o + 3]);
    m.mean_recall = std::stod(r[o + 4]);
    m.runs.resize(std::stoul(r[o + 5]));
    rows.push_back(std::move(m));
  }
  auto it = a.preamble.find("study");
  if (it != a.preamble.end()) out << "study: " << it->second << '\n';
  render_metrics(out, a.columns.size() > o ? a.columns[o] : "x", rows);
}

}  // namespace cdosr

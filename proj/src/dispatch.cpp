// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/dispatch.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cdosr/log.hpp"

namespace cdosr {

namespace {

class WriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw WriteError("cannot open '" + path.string() + "' for writing");
  f << body;
  f.flush();
  if (!f) throw WriteError("failed writing '" + path.string() + "'");
}

int resolved_unknown_count(const RunConfig& c, const LabeledDataset& ds) {
  if (c.unknown_count >= 0) return c.unknown_count;
  return static_cast<int>(ds.classes().size()) - c.study.omega;
}

std::string fit_artifact(const FitResult& fit, const ConfigEcho& echo) {
  std::ostringstream os;
  os << "# cdosr fit\n";
  for (const auto& [k, v] : echo) os << "# " << k << '=' << v << '\n';
  os << "# best_nu_offset=" << fmt(fit.best.nu_offset) << '\n'
     << "# best_varsigma=" << fmt(fit.best.varsigma, 8) << '\n'
     << "nu_offset,varsigma,closed_f,open_f,score\n";
  for (const auto& c : fit.grid)
    os << fmt(c.nu_offset) << ',' << fmt(c.varsigma, 8) << ',' << fmt(c.closed_f) << ','
       << fmt(c.open_f) << ',' << fmt(c.score) << '\n';
  return os.str();
}

int run(const RunConfig& c, std::ostream& out) {
  if (c.kind == StudyKind::kReport) {
    std::ifstream in(c.input);
    if (!in) throw ConfigError("cannot open '" + c.input.string() + "'");
    const LoadedArtifact a = read_artifact(in);
    if (a.kind == "fit") {
      for (const auto& [k, v] : a.preamble)
        if (k.rfind("best_", 0) == 0) out << k << ": " << v << '\n';
      out << a.rows.size() << " grid points\n";
    } else {
      render_artifact(out, a);
    }
    return kExitOk;
  }

  const LabeledDataset ds = load_dataset(c.dataset);
  const ConfigEcho echo = c.echo();
  const auto path = c.output_dir / artifact_name(c.kind);
  std::ostringstream body;

  switch (c.kind) {
    case StudyKind::kFit: {
      const FitResult fit = fit_hyperparameters(ds, c.study, c.nu_grid, c.varsigma_grid);
      write_file(path, fit_artifact(fit, echo));
      out << "selected nu_offset=" << fmt(fit.best.nu_offset, 2)
          << " varsigma=" << fmt(fit.best.varsigma, 6) << " closed_f=" << fmt(fit.best.closed_f, 4)
          << " open_f=" << fmt(fit.best.open_f, 4) << '\n';
      break;
    }
    case StudyKind::kSweep: {
      const auto rows = run_openness_sweep(ds, c.study, c.unknown_counts);
      write_metrics_csv(body, "sweep", "openness", rows, echo);
      write_file(path, body.str());
      render_metrics(out, "openness", rows);
      break;
    }
    case StudyKind::kBatch: {
      const auto rows =
          run_batch_size_study(ds, c.study, c.fractions, resolved_unknown_count(c, ds));
      write_metrics_csv(body, "batch", "fraction", rows, echo);
      write_file(path, body.str());
      render_metrics(out, "fraction", rows);
      break;
    }
    case StudyKind::kEpsilon: {
      const auto rows = run_epsilon_study(ds, c.study, c.eps_grid, resolved_unknown_count(c, ds));
      write_metrics_csv(body, "epsilon", "epsilon", rows, echo);
      write_file(path, body.str());
      render_metrics(out, "epsilon", rows);
      break;
    }
    case StudyKind::kDiscover: {
      std::function<void(int, int)> progress;
      if (c.verbose)
        progress = [](int sweep, int k) {
          log_info("sweep " + std::to_string(sweep) + ": " + std::to_string(k) + " subclasses");
        };
      const DiscoveryResult d =
          run_discovery(ds, c.study, resolved_unknown_count(c, ds), std::move(progress));
      write_subclass_report(body, d.prediction, echo);
      write_file(path, body.str());
      render_subclass_table(out, d.prediction, ds.label_names);
      out << "openness=" << fmt(d.openness, 4) << " F=" << fmt(d.metrics.f, 4)
          << " precision=" << fmt(d.metrics.precision, 4)
          << " recall=" << fmt(d.metrics.recall, 4) << '\n';
      break;
    }
    case StudyKind::kReport: break;
  }
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

std::string artifact_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::kFit: return "fit.csv";
    case StudyKind::kSweep: return "sweep.csv";
    case StudyKind::kBatch: return "batch.csv";
    case StudyKind::kEpsilon: return "epsilon.csv";
    case StudyKind::kDiscover: return "subclasses.csv";
    case StudyKind::kReport: return "";
  }
  return "";
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    return run(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DatasetError& e) {
    err << "dataset error: " << e.what() << '\n';
    return kExitDataset;
  } catch (const WriteError& e) {
    err << "write error: " << e.what() << '\n';
    return kExitWrite;
  } catch (const std::invalid_argument& e) {
    err << "invalid setting: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace cdosr

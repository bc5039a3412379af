#include "doslab/output.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

namespace doslab {
namespace fs = std::filesystem;

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_curves_csv(std::ostream& out, const SweepResult& result, const TraceTable& traces) {
  const std::string prefix = to_string(result.domain) + "," + std::to_string(result.n) + ",";
  out << kCurvesHeader << '\n';
  for (std::size_t r = 0; r < traces.size(); ++r) {
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
      for (const IterationRecord& rec : traces[r].at(g).iterations) {
        out << prefix << r << ',' << result.grid[g] << ',' << rec.iteration << ','
            << format_real(rec.global_utility) << ',' << format_real(rec.mean_share) << '\n';
      }
    }
  }
}

void write_schelling_csv(std::ostream& out, const SweepResult& result) {
  const std::string prefix = to_string(result.domain) + "," + std::to_string(result.n) + ",";
  out << kSchellingHeader << '\n';
  for (const SchellingRow& row : schelling_points(result)) {
    out << prefix << row.sharers << ',' << to_string(row.role) << ','
        << format_real(row.utility.mean) << ',' << format_real(row.utility.lo) << ','
        << format_real(row.utility.hi) << '\n';
  }
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".dos-lab-write-probe";
  {
    std::ofstream f(probe);
    if (!f || !(f << "probe") || !f.flush()) {
      throw OutputError("output directory " + dir.string() + " is not writable");
    }
  }
  fs::remove(probe, ec);
}

namespace {

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot open " + path.string() + " for writing");
  writer(f);
  f.flush();
  if (!f) throw OutputError("failed writing " + path.string());
}

}  // namespace

void emit_outputs(const SweepOutput& sweep, const ExperimentSpec& spec) {
  const fs::path dir(spec.output_dir);
  prepare_output_dir(dir);
  write_file(dir / "curves.csv",
             [&](std::ostream& o) { write_curves_csv(o, sweep.result, sweep.traces); });
  write_file(dir / "schelling.csv", [&](std::ostream& o) { write_schelling_csv(o, sweep.result); });
  write_file(dir / "meta.json", [&](std::ostream& o) { o << to_json(spec).dump(2) << '\n'; });
}

}  // namespace doslab

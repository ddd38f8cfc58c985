#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "pilotwave/bell.hpp"
#include "pilotwave/double_slit.hpp"
#include "pilotwave/guidance.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave::io {

// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Comma-separated, '\n' line endings, one header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::span<const std::string> header) : os_(os) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) os_ << ',';
      os_ << header[i];
    }
    os_ << '\n';
  }

  void row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) os_ << ',';
      os_ << format_double(values[i]);
    }
    os_ << '\n';
  }

  void row(std::span<const std::string> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) os_ << ',';
      os_ << values[i];
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

inline void write_wavefunction_csv(std::ostream& os, const WaveFunction& wf) {
  const Grid& g = wf.grid();
  std::vector<std::string> header =
      g.dimension() == 1 ? std::vector<std::string>{"x", "re", "im"}
                         : std::vector<std::string>{"x", "y", "re", "im"};
  CsvWriter csv(os, header);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Position p = g.point(k);
    if (g.dimension() == 1) {
      csv.row(std::array<double, 3>{p[0], wf.value(k).real(), wf.value(k).imag()});
    } else {
      csv.row(std::array<double, 4>{p[0], p[1], wf.value(k).real(), wf.value(k).imag()});
    }
  }
}

inline void write_density_csv(std::ostream& os, const Density& d) {
  const Grid& g = d.grid();
  std::vector<std::string> header = g.dimension() == 1
                                        ? std::vector<std::string>{"x", "weight"}
                                        : std::vector<std::string>{"x", "y", "weight"};
  CsvWriter csv(os, header);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Position p = g.point(k);
    if (g.dimension() == 1) {
      csv.row(std::array<double, 2>{p[0], d.weight(k)});
    } else {
      csv.row(std::array<double, 3>{p[0], p[1], d.weight(k)});
    }
  }
}

inline void write_values_csv(std::ostream& os, const Grid& g, std::span<const double> values,
                             const std::string& column) {
  std::vector<std::string> header = g.dimension() == 1
                                        ? std::vector<std::string>{"x", column}
                                        : std::vector<std::string>{"x", "y", column};
  CsvWriter csv(os, header);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Position p = g.point(k);
    if (g.dimension() == 1) {
      csv.row(std::array<double, 2>{p[0], values[k]});
    } else {
      csv.row(std::array<double, 3>{p[0], p[1], values[k]});
    }
  }
}

// Long format traj_id,t,x[,y]. max_trajectories caps the file size; the
// statistics always use the full ensemble.
inline void write_trajectories_csv(std::ostream& os, const TrajectoryEnsemble& ens, int dim,
                                   std::size_t max_trajectories = 0) {
  std::vector<std::string> header = dim == 1 ? std::vector<std::string>{"traj_id", "t", "x"}
                                             : std::vector<std::string>{"traj_id", "t", "x", "y"};
  CsvWriter csv(os, header);
  const std::size_t count =
      max_trajectories == 0 ? ens.count() : std::min(ens.count(), max_trajectories);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < ens.times.size(); ++j) {
      const Position& p = ens.positions[i][j];
      if (dim == 1) {
        csv.row(std::array<double, 3>{static_cast<double>(i), ens.times[j], p[0]});
      } else {
        csv.row(std::array<double, 4>{static_cast<double>(i), ens.times[j], p[0], p[1]});
      }
    }
  }
}

inline void write_pair_counts_csv(std::ostream& os, const NonlocalityReport& report) {
  const std::vector<std::string> header = {"left_axis", "right_axis", "cell", "count",
                                           "expected"};
  CsvWriter csv(os, header);
  static const char* kCells[4] = {"ii", "ij", "ji", "jj"};
  for (const auto& pair : report.pairs) {
    for (std::size_t cell = 0; cell < 4; ++cell) {
      const std::array<std::string, 5> row = {
          format_double(pair.left_angle), format_double(pair.right_angle), kCells[cell],
          std::to_string(pair.counts[cell]), format_double(pair.expected[cell])};
      csv.row(row);
    }
  }
}

// Write through a temp file in the same directory, then rename into place:
// a file either exists complete or not at all.
inline void write_file_atomic(const std::filesystem::path& dir, const std::string& name,
                              const std::function<void(std::ostream&)>& emit) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path tmp = dir / (".tmp." + name);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    emit(os);
    os.flush();
    if (!os) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, dir / name);
}

}  // namespace pilotwave::io

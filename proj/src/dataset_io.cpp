#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "cdkf/error.hpp"
#include "cdkf/models.hpp"

namespace cdkf {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

void write_dataset(const SimulatedDataset& data, const std::filesystem::path& csv_path,
                   const std::filesystem::path& manifest_path) {
  const Eigen::Index n = data.truth.empty() ? 0 : data.truth.front().size();
  const Eigen::Index m = data.measurements.empty() ? 0 : data.measurements.front().size();

  std::ofstream csv = open_out(csv_path);
  csv << "t";
  for (Eigen::Index i = 1; i <= n; ++i) csv << ",x" << i;
  for (Eigen::Index i = 1; i <= m; ++i) csv << ",z" << i;
  csv << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < data.size(); ++k) {
    csv << data.times[k];
    for (Eigen::Index i = 0; i < n; ++i) csv << ',' << data.truth[k](i);
    for (Eigen::Index i = 0; i < m; ++i) csv << ',' << data.measurements[k](i);
    csv << '\n';
  }
  if (!csv) throw Error(ErrorKind::Io, "failed writing '" + csv_path.string() + "'");

  nlohmann::json manifest = {
      {"seed", data.seed},           {"delta_s", data.delta_s},
      {"horizon_s", data.horizon_s()}, {"em_step_s", data.em_step_s},
      {"model", data.model},         {"noise", data.noise},
      {"initial_state", std::vector<double>(data.initial_truth.data(),
                                            data.initial_truth.data() + data.initial_truth.size())},
  };
  std::ofstream js = open_out(manifest_path);
  js << std::setprecision(17) << manifest.dump(2) << '\n';
  if (!js) throw Error(ErrorKind::Io, "failed writing '" + manifest_path.string() + "'");
}

SimulatedDataset read_dataset(const std::filesystem::path& csv_path,
                              const std::filesystem::path& manifest_path) {
  SimulatedDataset data;
  {
    std::ifstream js = open_in(manifest_path);
    nlohmann::json manifest;
    try {
      js >> manifest;
      data.seed = manifest.at("seed").get<std::uint64_t>();
      data.delta_s = manifest.at("delta_s").get<double>();
      data.em_step_s = manifest.at("em_step_s").get<double>();
      data.model = manifest.at("model").get<std::string>();
      data.noise = manifest.at("noise").get<std::string>();
      const auto init = manifest.value("initial_state", std::vector<double>{});
      data.initial_truth = Eigen::Map<const Vector>(init.data(), static_cast<Eigen::Index>(init.size()));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Io, "malformed manifest '" + manifest_path.string() + "': " + e.what());
    }
  }

  std::ifstream csv = open_in(csv_path);
  std::string line;
  if (!std::getline(csv, line)) throw Error(ErrorKind::Io, "empty dataset '" + csv_path.string() + "'");
  int n = 0;
  int m = 0;
  {
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (!cell.empty() && cell[0] == 'x') ++n;
      if (!cell.empty() && cell[0] == 'z') ++m;
    }
  }
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != static_cast<std::size_t>(1 + n + m)) {
      throw Error(ErrorKind::Io, "row with wrong column count in '" + csv_path.string() + "'");
    }
    data.times.push_back(values[0]);
    data.truth.push_back(Eigen::Map<const Vector>(values.data() + 1, n));
    data.measurements.push_back(Eigen::Map<const Vector>(values.data() + 1 + n, m));
  }
  return data;
}

}  // namespace cdkf

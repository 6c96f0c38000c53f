#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jminv/forward.hpp"
#include "jminv/outersolve.hpp"
#include "jminv/refmodel.hpp"

namespace jminv {

using json = nlohmann::json;

/// Everything a run needs; defaults reproduce the worked two-channel example.
struct RunConfig {
  ChannelSet cs{0, 0, 10.0, 0.495, 5};
  double k0 = 6.0;
  AnalyticModelParams model{-2.0, 0.6, 3.0, 10.0};
  std::string data_file;  ///< tabulated S-matrix; overrides the analytic model when set
  IterationOptions iter;
  double kappa_max = 0;   ///< bound-state scan limit, <= 0 selects 10 / rho
  double k_min = 0.2, k_max = 6.0;
  int k_points = 600;
  std::string output_dir = "jminv_out";

  void validate() const;
};

enum class KeyKind { Int, Double, String, Bool };

/// Recognized configuration keys (shared by the file format and the --key flags).
const std::vector<std::pair<std::string, KeyKind>>& config_keys();

/// Overlay `patch` on the defaults; unknown keys or wrong types throw InputError.
RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& c);

/// Convert a flag value to the JSON type of its key.
json parse_flag_value(const std::string& key, const std::string& text);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Provider selected by the config (analytic model or tabulated data file).
std::unique_ptr<SMatrixProvider> make_provider(const RunConfig& c);

std::unique_ptr<TabulatedProvider> read_tabulated(const std::string& path, const ChannelSet& cs);
json tabulated_to_json(const std::vector<SMatrixSample>& samples,
                       const std::vector<BoundStateData>& bound);

json hamiltonian_to_json(const QuasiTridiagonalHamiltonian& h);
QuasiTridiagonalHamiltonian hamiltonian_from_json(const json& j);

json triplets_to_json(const std::vector<SpectralTriplet>& tr,
                      const std::vector<std::string>& region = {});

/// Fixed 12-significant-digit formatting used in every CSV.
std::string fmt(double v);

/// CSV text: header plus rows.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace jminv

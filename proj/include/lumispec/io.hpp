#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lumispec/dsp.hpp"
#include "lumispec/model.hpp"
#include "lumispec/montecarlo.hpp"
#include "lumispec/spectra.hpp"
#include "lumispec/sweep.hpp"
#include "lumispec/system.hpp"
#include "lumispec/validate.hpp"

namespace lumispec {

using Json = nlohmann::json;

/// Embedded in every output file. Holds nothing that varies between identical runs.
struct Provenance {
  Json config = Json::object();
  std::string tool = "lumispec";
  std::string version = LUMISPEC_VERSION;
  std::optional<std::uint64_t> seed;
  bool one_sided = false;

  Json to_json() const;
};

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite values).
std::string format_number(double value);

Json to_json(const LaserParams& params);
Json to_json(const SteadyState& steady);
Json to_json(const LinearNoiseSystem& sys);
LinearNoiseSystem system_from_json(const Json& doc);
Json to_json(const EngineReport& report);

/// Rows with w >= 0, values doubled.
SpectrumCurve one_sided(const SpectrumCurve& curve);
PsdEstimate one_sided(const PsdEstimate& estimate);

/// CSV: '#' provenance lines, then header "omega,<channels>,<closed forms>" and one row per grid point.
void write_spectrum_csv(std::ostream& out, const SpectrumCurve& engine, const std::vector<ClosedFormSpectrum>& closed,
                        const Provenance& provenance);
Json spectrum_json(const SpectrumCurve& engine, const std::vector<ClosedFormSpectrum>& closed,
                   const Provenance& provenance);

/// Same schema as the spectrum CSV plus "<channel>_stderr" columns, imaginary diagnostics for
/// complex ensembles, and optional "<channel>_analytic" columns.
void write_psd_csv(std::ostream& out, const PsdEstimate& estimate, const SpectrumCurve* analytic,
                   const Provenance& provenance);
Json psd_json(const PsdEstimate& estimate, const SpectrumCurve* analytic, const Provenance& provenance);

void write_sweep_csv(std::ostream& out, const SweepResult& result, const Provenance& provenance);
Json sweep_json(const SweepResult& result, const Provenance& provenance);

/// Raw dump: traj, t, state columns, current columns (real and imaginary parts when complex).
template <typename Scalar>
void write_trajectories_csv(std::ostream& out, const Trajectories<Scalar>& ensemble, int max_traj,
                            const Provenance& provenance);

/// gnuplot script plotting every non-omega column of `csv_name` against omega.
std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& columns,
                           const std::string& title);

}  // namespace lumispec

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtdob/discretize.hpp"
#include "dtdob/dob.hpp"
#include "dtdob/lti.hpp"
#include "dtdob/sim.hpp"

namespace dtdob::cli {

/// Malformed or schema-violating configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QSpec {
    enum class Kind { None, Explicit, Direct, Indirect };
    Kind kind = Kind::None;
    std::vector<double> a, c;          ///< Explicit, (z-1) basis, ascending
    int nq = 1;                        ///< Direct
    double safety = 0.8;               ///< Direct
    std::vector<double> ct_a, ct_c;    ///< Indirect, ascending CT coefficients
    std::optional<double> psi;         ///< Indirect: tau / delta given directly
    std::optional<double> tau;         ///< Indirect: CT time constant, psi = tau / delta
};

struct SimSpec {
    double horizon = 10.0;
    int substeps = 20;
    double blowup = 1e6;
    bool record_ct = false;
    SignalSpec reference;
    SignalSpec disturbance;
};

struct ToolConfig {
    std::optional<UncertainPlantFamily> family;
    std::optional<RationalTransfer> nominal;
    std::optional<RationalTransfer> controller;
    DiscretizationMethod nominal_method = DiscretizationMethod::FDM;
    DiscretizationMethod controller_method = DiscretizationMethod::FDM;
    QSpec q;
    std::optional<double> delta;
    std::optional<RationalTransfer> plant;
    std::optional<std::array<double, 3>> plant_parameters;  ///< M1, M2, K when given by parameters
    std::optional<std::array<double, 6>> parameter_box;     ///< M1, M2, K bounds of a two-mass-spring family
    std::optional<DiscretizationMethod> method;             ///< discretize subcommand
    SimSpec simulation;
    std::vector<double> contour_deltas;
    std::vector<double> omegas;
    std::vector<std::string> freq_transfers{"q"};
    int grid_points = 101;
};

ToolConfig parse_config_text(const std::string& text);
ToolConfig load_config(const std::string& path);

}  // namespace dtdob::cli

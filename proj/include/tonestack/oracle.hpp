#pragma once

// Independent checks on the mesh model:
//  * node-voltage (KCL) analysis of the same network, assembled from an
//    explicit element list and solved with Eigen,
//  * the purely resistive high-frequency limit (capacitors shorted),
//  * the DC limit,
//  * a line-by-line replica of the reference MATLAB script.
//
// Node map used by the nodal model:
//   src  -- Rs --  in              (src == in when there is no source resistance)
//   in   -- R1 --  a,   in -- C1 -- top
//   top  -- Rt1 -- out -- Rt2 -- bottom       (out = treble wiper)
//   a    -- C2 --  bottom,  a -- C3 -- wiper_m
//   bottom -- Rb1 -- mid_top -- Rm1 -- wiper_m -- Rm2 -- ground
//   out  -- RL -- ground           (only when loaded)

#include "tonestack/circuit_model.hpp"
#include "tonestack/response.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace tonestack::oracle {

struct NodalSystem {
    std::vector<std::string> unknowns;  ///< name of each unknown node class, "+"-joined when shorted together
    Eigen::MatrixXcd admittance;        ///< siemens
    Eigen::VectorXcd injection;         ///< ampere, from the fixed (source / ground) nodes
    int output_index = -1;              ///< row of the treble wiper, -1 when it is tied to a fixed node
    Complex output_fixed_voltage;       ///< wiper voltage when output_index == -1
};

/// Node equations at one frequency. Zero-valued resistances (pot ends) are
/// treated as shorts by merging their nodes.
NodalSystem assemble_nodal(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                           double vin, const ModelOptions& options = {});

/// Node equations with every capacitor replaced by a short.
NodalSystem assemble_shorted(const ToneStackComponents& components, const ControlSettings& controls, double vin,
                             const ModelOptions& options = {});

Complex solve_output(const NodalSystem& system);

/// Treble wiper voltage from nodal analysis with capacitor admittance jwC.
Complex nodal_response(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                       double vin, const ModelOptions& options = {});

/// |Vout| of the resistive network left when C1, C2, C3 are shorted.
double hf_limit(const ToneStackComponents& components, const ControlSettings& controls, double vin,
                const ModelOptions& options = {});

/// Every input-to-output path passes through a capacitor.
constexpr double dc_limit() noexcept { return 0.0; }

/// The reference script's pipeline: logspace(0, 5, 50) grid, +j*Xc on the
/// diagonal, I = inv(Y)*V, output as the sum of branch-voltage magnitudes,
/// dB as 20*log10(VTotal/Vin).
ResponseCurve script_replica(const ToneStackComponents& components, const ControlSettings& controls, double vin);

}  // namespace tonestack::oracle

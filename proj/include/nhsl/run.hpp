#pragma once

#include "nhsl/config.hpp"
#include "nhsl/localizer.hpp"
#include "nhsl/signature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nhsl::cli {

struct BuiltModel {
    LatticeGeometry geometry;
    SparseComplexMatrix hamiltonian;
    std::optional<SparseComplexMatrix> chiral_operator;
};

BuiltModel build_model(const RunConfig& cfg);

struct MapPoint {
    double x = 0.0, y = 0.0;
    std::optional<int> half_signature; // empty = gap closed at this probe
    double line_gap = 0.0;
    double ms = 0.0;
};

struct MapResult {
    Grid grid;
    std::vector<MapPoint> points; // row-major, x fastest
    double total_ms = 0.0;
};

/// Evaluate the localizer over the probe grid. with_signature = false
/// computes only the gaps (gap-map mode).
MapResult evaluate_map(const RunConfig& cfg, const BuiltModel& model, bool with_signature);

/// Signature at one probe by the configured method.
signature::SignatureReport probe_signature(const RunConfig& cfg, const BuiltModel& model,
                                           const Eigen::Vector2d& probe);

enum class SpectrumTarget { Hamiltonian, Localizer };

struct FlowPathSpec {
    double x_start = 0.0;
    double x_end = 0.0;
    double y = 0.0;
    int steps = 21;
};

/// Command entry points; each writes its data files under cfg.output_dir
/// and returns the primary result for in-process callers.
MapResult cmd_index_map(const RunConfig& cfg);
MapResult cmd_gap_map(const RunConfig& cfg);
std::vector<cd> cmd_spectrum(const RunConfig& cfg, SpectrumTarget target,
                             std::optional<Eigen::Vector2d> probe = std::nullopt);
std::vector<double> cmd_ldos(const RunConfig& cfg);
signature::FlowDiagram cmd_flow(const RunConfig& cfg, const FlowPathSpec& path);
localizer::HypothesisCertificate cmd_certify(const RunConfig& cfg);

struct ChiralReport {
    int half_signature = 0; // odd localizer at the probe
    int ind_a = 0, ind_b = 0, ind_v = 0;
    double line_gap = 0.0; // estimated line-gap of the chain hamiltonian
};
ChiralReport cmd_chiral(const RunConfig& cfg);

/// Reference probe for flow-based signatures: x + (sample diameter + 2 rho).
double flow_reference_offset(const RunConfig& cfg);

} // namespace nhsl::cli

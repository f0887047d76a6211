#pragma once

#include <filesystem>
#include <string>

#include "itc/pmp_checker.hpp"

namespace itc {

namespace fs = std::filesystem;

// Particle clouds: one particle per row, n comma-separated columns.
void write_measure_csv(const fs::path& path, const EmpiricalMeasure& m);
EmpiricalMeasure read_measure_csv(const fs::path& path);
std::string measure_to_json(const EmpiricalMeasure& m);
EmpiricalMeasure measure_from_json(const std::string& text);

// Reduced control: cell index, cell midpoint, alpha, beta components.
void write_control_csv(const fs::path& path, const ReducedControl& ctrl);
ReducedControl read_control_csv(const fs::path& path);

// Trajectories: (s, k, y components) and (s, k, y components, p components).
void write_trajectory_csv(const fs::path& path, const ParticleTrajectory& traj);
void write_original_csv(const fs::path& path, const OriginalTrajectory& traj);
void write_lifted_csv(const fs::path& path, const LiftedTrajectory& lifted);

// Per-cell Hamiltonian trace: cell, s_mid, H1, H0, H at the current control.
void write_hamiltonian_trace_csv(const fs::path& path, const ProblemSpec& spec,
                                 const ReducedControl& ctrl,
                                 const CellHamiltonians& cells, double lambda);

/// Impulsive solution: one JSON document (t_grid, jumps with attached
/// controls, U, V) plus a t-sampled trajectory CSV and one completion CSV
/// per jump, all under `dir`.
void write_impulsive(const fs::path& dir, const std::string& stem,
                     const ImpulsiveSolution& imp);

void write_certificate_json(const fs::path& path, const ExtremalCertificate& cert);
void write_reduced_report_json(const fs::path& path, const ReducedCheckReport& rep);
void write_impulsive_report_json(const fs::path& path,
                                 const ImpulsiveCheckReport& rep);

/// FNV-1a hash of a string, hex-encoded; used for config fingerprints.
std::string fnv1a_hex(const std::string& text);

}  // namespace itc
